#include "splitplan/planner.h"

#include <algorithm>
#include <string>

namespace splitplan {

std::string_view PlannerName(PlannerKind kind) {
  switch (kind) {
    case PlannerKind::kDp: return "dp";
    case PlannerKind::kGreedy: return "greedy";
    case PlannerKind::kOracle: return "oracle";
    case PlannerKind::kAllServer: return "all_server";
    case PlannerKind::kAllClient: return "all_client";
  }
  return "dp";
}

PlannerKind ParsePlannerKind(std::string_view name) {
  if (name == "dp") return PlannerKind::kDp;
  if (name == "greedy") return PlannerKind::kGreedy;
  if (name == "oracle") return PlannerKind::kOracle;
  if (name == "all_server" || name == "all-server") return PlannerKind::kAllServer;
  if (name == "all_client" || name == "all-client") return PlannerKind::kAllClient;
  throw ConfigError("unknown planner '" + std::string(name) + "'");
}

DpTables::DpTables(size_t layers, int64_t budget)
    : layers_(layers),
      budget_(budget),
      client_((layers + 1) * static_cast<size_t>(budget + 1), kInfeasibleValue),
      server_((layers + 1) * static_cast<size_t>(budget + 1), kInfeasibleValue) {}

int64_t LatencyUpperBound(const PlanProblem& p) {
  int64_t bound = 0;
  for (size_t k = 0; k < p.num_layers(); ++k) {
    bound += std::max(p.client_cost[k] + p.download_cost[k],
                      p.server_cost[k] + p.upload_cost[k]);
  }
  return bound;
}

PlacementPolicy EvaluatePlacement(PlannerKind kind, Placement pi,
                                  const PlanProblem& problem) {
  PlacementPolicy policy;
  policy.planner = kind;
  policy.client_value = ClientValue(pi, problem);
  policy.server_load = ServerLoad(pi, problem);
  policy.integer_latency = IntegerLatency(pi, problem);
  policy.feasible = policy.integer_latency <= problem.budget;
  policy.pi = std::move(pi);
  return policy;
}

DpTables FillDpTables(const PlanProblem& p) {
  ValidateProblem(p);
  const size_t n = p.num_layers();
  const int64_t width = std::min(p.budget, LatencyUpperBound(p));
  DpTables t(n, width);
  for (int64_t j = 0; j <= width; ++j) {
    if (p.source_at_client) {
      t.set_client(0, j, 0.0);
    } else {
      t.set_server(0, j, 0.0);
    }
  }
  for (size_t k = 1; k <= n; ++k) {
    const int64_t i = p.client_cost[k - 1];
    const int64_t s = p.server_cost[k - 1];
    const int64_t u = p.upload_cost[k - 1];
    const int64_t d = p.download_cost[k - 1];
    const double r = p.value[k - 1];
    for (int64_t j = 0; j <= width; ++j) {
      const double via_client = std::max(t.client(k - 1, j - i),
                                         t.server(k - 1, j - i - d));
      t.set_client(k, j, via_client == kInfeasibleValue ? kInfeasibleValue
                                                        : via_client + r);
      t.set_server(k, j, std::max(t.server(k - 1, j - s),
                                  t.client(k - 1, j - s - u)));
    }
  }
  return t;
}

PlacementPolicy PlanDp(const PlanProblem& p, const DpOptions& options) {
  const DpTables t = FillDpTables(p);
  const size_t n = p.num_layers();
  const int64_t w = t.budget();

  const double end_client = t.client(n, w);
  const double end_server = t.server(n, w);
  bool at_client = false;
  if (options.must_end_at) {
    at_client = *options.must_end_at == Side::kClient;
  } else {
    at_client = end_client > end_server;
  }
  const double best = at_client ? end_client : end_server;
  if (best == kInfeasibleValue || n == 0) {
    Placement fallback(n, 0);
    if (n == 0) fallback.clear();
    PlacementPolicy policy = EvaluatePlacement(PlannerKind::kDp, fallback, p);
    if (best == kInfeasibleValue) policy.feasible = false;
    return policy;
  }

  // Walk back from (n, w), choosing at each layer the predecessor cell that
  // produced the stored maximum and paying that transition's cost.
  Placement pi(n, 0);
  int64_t j = w;
  for (size_t k = n; k >= 1; --k) {
    pi[k - 1] = at_client ? 1 : 0;
    if (at_client) {
      const int64_t stay = j - p.client_cost[k - 1];
      const int64_t switched = stay - p.download_cost[k - 1];
      const double from_client = t.client(k - 1, stay);
      const double from_server = t.server(k - 1, switched);
      if (from_server >= from_client) {
        at_client = false;
        j = switched;
      } else {
        j = stay;
      }
    } else {
      const int64_t stay = j - p.server_cost[k - 1];
      const int64_t switched = stay - p.upload_cost[k - 1];
      const double from_server = t.server(k - 1, stay);
      const double from_client = t.client(k - 1, switched);
      if (from_client > from_server) {
        at_client = true;
        j = switched;
      } else {
        j = stay;
      }
    }
  }
  return EvaluatePlacement(PlannerKind::kDp, std::move(pi), p);
}

PlacementPolicy PlanGreedy(const PlanProblem& p) {
  ValidateProblem(p);
  const size_t n = p.num_layers();
  for (size_t m = n + 1; m-- > 0;) {
    Placement pi(n, 0);
    std::fill(pi.begin(), pi.begin() + static_cast<std::ptrdiff_t>(m), 1);
    PlacementPolicy policy =
        EvaluatePlacement(PlannerKind::kGreedy, std::move(pi), p);
    if (policy.feasible) return policy;
  }
  return EvaluatePlacement(PlannerKind::kGreedy, Placement(n, 0), p);
}

PlacementPolicy PlanTrivial(const PlanProblem& p, Side side) {
  ValidateProblem(p);
  const PlannerKind kind =
      side == Side::kClient ? PlannerKind::kAllClient : PlannerKind::kAllServer;
  return EvaluatePlacement(kind, Placement(p.num_layers(),
                                           side == Side::kClient ? 1 : 0),
                           p);
}

PlacementPolicy PlanOracle(const PlanProblem& p, const DpOptions& options) {
  ValidateProblem(p);
  const size_t n = p.num_layers();
  if (n > kOracleMaxLayers) {
    throw SizeError("oracle limited to " + std::to_string(kOracleMaxLayers) +
                    " layers, problem has " + std::to_string(n));
  }
  Placement pi(n, 0);
  Placement best_pi;
  double best_value = kInfeasibleValue;
  const uint64_t count = uint64_t{1} << n;
  for (uint64_t mask = 0; mask < count; ++mask) {
    for (size_t k = 0; k < n; ++k) {
      pi[k] = static_cast<uint8_t>((mask >> (n - 1 - k)) & 1U);
    }
    if (options.must_end_at && n > 0 &&
        pi[n - 1] != (*options.must_end_at == Side::kClient ? 1 : 0)) {
      continue;
    }
    if (IntegerLatency(pi, p) > p.budget) continue;
    const double value = ClientValue(pi, p);
    if (value > best_value) {
      best_value = value;
      best_pi = pi;
    }
  }
  if (best_value == kInfeasibleValue) {
    PlacementPolicy policy =
        EvaluatePlacement(PlannerKind::kOracle, Placement(n, 0), p);
    policy.feasible = false;
    return policy;
  }
  return EvaluatePlacement(PlannerKind::kOracle, std::move(best_pi), p);
}

PlacementPolicy RunPlanner(PlannerKind kind, const PlanProblem& problem) {
  switch (kind) {
    case PlannerKind::kDp: return PlanDp(problem);
    case PlannerKind::kGreedy: return PlanGreedy(problem);
    case PlannerKind::kOracle: return PlanOracle(problem);
    case PlannerKind::kAllServer: return PlanTrivial(problem, Side::kServer);
    case PlannerKind::kAllClient: return PlanTrivial(problem, Side::kClient);
  }
  return PlanDp(problem);
}

}  // namespace splitplan
