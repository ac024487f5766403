#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "splitplan/evaluator.h"
#include "splitplan/planner.h"
#include "test_support.h"

using namespace splitplan;
using splitplan::testing::MakeProblem;
using splitplan::testing::RandomProblem;
using splitplan::testing::SmallInstanceA;
using splitplan::testing::SmallInstanceB;

namespace {

// Latency written out term by term, independent of the evaluator.
int64_t HandLatency(const Placement& pi, const PlanProblem& p) {
  int64_t t = 0;
  for (size_t k = 0; k < pi.size(); ++k) {
    const int prev = k == 0 ? (p.source_at_client ? 1 : 0) : pi[k - 1];
    const int x = pi[k];
    t += x * (p.client_cost[k] + (1 - prev) * p.download_cost[k]);
    t += (1 - x) * (p.server_cost[k] + prev * p.upload_cost[k]);
  }
  return t;
}

// Best client value over all placements, by enumeration.
double BruteForceBest(const PlanProblem& p) {
  const size_t n = p.num_layers();
  double best = -1.0;
  for (uint32_t mask = 0; mask < (1U << n); ++mask) {
    Placement pi(n);
    double v = 0.0;
    for (size_t k = 0; k < n; ++k) {
      pi[k] = (mask >> k) & 1U;
      if (pi[k]) v += p.value[k];
    }
    if (HandLatency(pi, p) <= p.budget) best = std::max(best, v);
  }
  return best;
}

}  // namespace

TEST_CASE("dp on the small instances matches enumeration") {
  const PlanProblem a = SmallInstanceA();
  CHECK(BruteForceBest(a) == 6.0);
  const PlacementPolicy pa = PlanDp(a);
  CHECK(pa.pi == Placement{1, 1, 0});
  CHECK(pa.server_load == 5.0);
  CHECK(pa.integer_latency == 9);
  CHECK(pa.feasible);

  const PlanProblem b = SmallInstanceB();
  CHECK(BruteForceBest(b) == 10.0);
  const PlacementPolicy pb = PlanDp(b);
  CHECK(pb.pi == Placement{0, 0, 1});
  CHECK(pb.server_load == 2.0);
  CHECK(pb.integer_latency == 6);
}

TEST_CASE("dp edge cases") {
  SUBCASE("budget covers the whole model on the client") {
    const PlanProblem p = MakeProblem({3, 4, 5}, {2, 2, 2}, {1, 1, 1}, {7, 7, 7},
                                      {7, 7, 7}, 6);
    const PlacementPolicy pol = PlanDp(p);
    CHECK(pol.pi == Placement{1, 1, 1});
    CHECK(pol.server_load == 0.0);
  }
  SUBCASE("every layer too slow for the client") {
    const PlanProblem p = MakeProblem({3, 4, 5}, {10, 10, 10}, {0, 0, 0},
                                      {0, 0, 0}, {0, 0, 0}, 9);
    const PlacementPolicy pol = PlanDp(p);
    CHECK(pol.pi == Placement{0, 0, 0});
    CHECK(pol.server_load == 12.0);
    CHECK(pol.feasible);
  }
  SUBCASE("nothing fits") {
    const PlanProblem p =
        MakeProblem({1, 1}, {5, 5}, {5, 5}, {5, 5}, {5, 5}, 3);
    const PlacementPolicy pol = PlanDp(p);
    CHECK_FALSE(pol.feasible);
    CHECK(pol.pi == Placement{0, 0});
  }
  SUBCASE("huge budget is clamped") {
    const PlanProblem p = MakeProblem({1, 2}, {5, 5}, {1, 1}, {3, 3}, {3, 3},
                                      int64_t{1} << 50);
    const PlacementPolicy pol = PlanDp(p);
    CHECK(pol.pi == Placement{1, 1});
  }
}

TEST_CASE("dp tables") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const PlanProblem p = RandomProblem(rng, 8, 60);
    const DpTables t = FillDpTables(p);
    for (int64_t j = 0; j <= t.budget(); ++j) {
      CHECK(t.client(0, j) == (p.source_at_client ? 0.0 : kInfeasibleValue));
      CHECK(t.server(0, j) == (p.source_at_client ? kInfeasibleValue : 0.0));
    }
    for (size_t k = 0; k <= t.layers(); ++k) {
      for (int64_t j = 0; j < t.budget(); ++j) {
        CHECK(t.client(k, j) <= t.client(k, j + 1));
        CHECK(t.server(k, j) <= t.server(k, j + 1));
      }
    }
    CHECK(t.client(1, -1) == kInfeasibleValue);
  }
}

TEST_CASE("greedy prefix baseline") {
  const PlacementPolicy b = PlanGreedy(SmallInstanceB());
  CHECK(b.pi == Placement{1, 1, 0});
  CHECK(b.server_load == 10.0);
  CHECK(b.feasible);

  const PlanProblem free = MakeProblem({3, 4}, {2, 2}, {1, 1}, {0, 0}, {0, 0}, 4);
  CHECK(PlanGreedy(free).pi == PlanDp(free).pi);
  CHECK(PlanGreedy(free).pi == Placement{1, 1});

  // Zero budget with data on the server and free server compute.
  const PlanProblem zero = MakeProblem({3, 4}, {2, 2}, {0, 0}, {1, 1}, {1, 1}, 0,
                                       /*source_at_client=*/false);
  const PlacementPolicy z = PlanGreedy(zero);
  CHECK(z.pi == Placement{0, 0});
  CHECK(z.feasible);

  const PlanProblem none = MakeProblem({1}, {5}, {5}, {5}, {5}, 2);
  CHECK_FALSE(PlanGreedy(none).feasible);
}

TEST_CASE("trivial baselines") {
  const PlacementPolicy srv = PlanTrivial(SmallInstanceA(), Side::kServer);
  CHECK(srv.server_load == 11.0);
  CHECK(srv.integer_latency == 1);
  CHECK(srv.feasible);

  const PlacementPolicy cli = PlanTrivial(SmallInstanceA(), Side::kClient);
  CHECK(cli.integer_latency == 12);
  CHECK_FALSE(cli.feasible);
  CHECK(cli.server_load == 0.0);
}

TEST_CASE("oracle") {
  CHECK(PlanOracle(SmallInstanceA()).client_value == PlanDp(SmallInstanceA()).client_value);
  CHECK(PlanOracle(SmallInstanceB()).pi == Placement{0, 0, 1});

  SUBCASE("single layer") {
    CHECK(PlanOracle(MakeProblem({3}, {4}, {0}, {1}, {1}, 4)).pi == Placement{1});
    CHECK(PlanOracle(MakeProblem({3}, {5}, {0}, {1}, {1}, 4)).pi == Placement{0});
    CHECK(PlanOracle(MakeProblem({3}, {3}, {0}, {0}, {2}, 4, false)).pi ==
          Placement{0});
    CHECK(PlanOracle(MakeProblem({0}, {1}, {0}, {0}, {0}, 4)).pi == Placement{0});
  }
  SUBCASE("zero budget and zero costs") {
    const PlanProblem p =
        MakeProblem({1, 2, 3}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, 0);
    CHECK(PlanOracle(p).pi == Placement{1, 1, 1});
  }
  SUBCASE("ties go to the smallest binary placement") {
    const PlanProblem p =
        MakeProblem({0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, 0);
    CHECK(PlanOracle(p).pi == Placement{0, 0, 0});
    // 010, 011, 100 and 101 all reach value 1; 010 is the smallest.
    const PlanProblem q =
        MakeProblem({1, 1, 0}, {1, 1, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}, 1);
    CHECK(PlanOracle(q).pi == Placement{0, 1, 0});
  }
  SUBCASE("size guard") {
    std::vector<double> r(25, 1.0);
    std::vector<int64_t> c(25, 1);
    CHECK_THROWS_AS(PlanOracle(MakeProblem(r, c, c, c, c, 10)), SizeError);
  }
}

TEST_CASE("dp is optimal against the oracle on random instances") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    const PlanProblem p = RandomProblem(rng, 10, 120);
    const PlacementPolicy dp = PlanDp(p);
    const PlacementPolicy oracle = PlanOracle(p);
    REQUIRE(dp.feasible == oracle.feasible);
    if (!oracle.feasible) continue;
    CHECK(dp.client_value == oracle.client_value);
    CHECK(dp.integer_latency <= p.budget);
    CHECK(HandLatency(dp.pi, p) == dp.integer_latency);
    CHECK(BruteForceBest(p) == oracle.client_value);
  }
}

TEST_CASE("terminal-side constraint") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const PlanProblem p = RandomProblem(rng, 9, 100);
    for (Side side : {Side::kClient, Side::kServer}) {
      const DpOptions opts{side};
      const PlacementPolicy dp = PlanDp(p, opts);
      const PlacementPolicy oracle = PlanOracle(p, opts);
      REQUIRE(dp.feasible == oracle.feasible);
      if (!dp.feasible) continue;
      CHECK(dp.client_value == oracle.client_value);
      CHECK(dp.pi.back() == (side == Side::kClient ? 1 : 0));
    }
  }
}

TEST_CASE("planner properties on random instances") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const PlanProblem p = RandomProblem(rng);
    const PlacementPolicy dp = PlanDp(p);
    const PlacementPolicy greedy = PlanGreedy(p);

    // conservation and backtrace consistency
    CHECK(dp.client_value + dp.server_load == doctest::Approx(p.TotalValue()));
    CHECK(IntegerLatency(dp.pi, p) == dp.integer_latency);
    CHECK(ClientValue(dp.pi, p) == dp.client_value);
    if (dp.feasible) CHECK(dp.integer_latency <= p.budget);
    if (greedy.feasible) {
      CHECK(dp.feasible);
      CHECK(dp.server_load <= greedy.server_load);
      CHECK(greedy.integer_latency <= p.budget);
    }

    // more budget never hurts
    PlanProblem looser = p;
    looser.budget += 7;
    const PlacementPolicy dp_loose = PlanDp(looser);
    if (dp.feasible) CHECK(dp_loose.server_load <= dp.server_load);

    // cheaper transfers never hurt
    PlanProblem faster = p;
    for (auto& u : faster.upload_cost) u /= 2;
    for (auto& d : faster.download_cost) d /= 2;
    const PlacementPolicy dp_fast = PlanDp(faster);
    if (dp.feasible) CHECK(dp_fast.server_load <= dp.server_load);

    // scaling the values leaves the placement unchanged
    PlanProblem scaled = p;
    for (double& r : scaled.value) r *= 3.0;
    CHECK(PlanDp(scaled).pi == dp.pi);
  }
}
