#include "splitplan/sweep.h"

#include <algorithm>
#include <atomic>
#include <thread>

namespace splitplan {

namespace {

struct Scenario {
  size_t model = 0, seq = 0, deadline = 0, link = 0;
};

size_t AxisIndex(const SweepCell& c, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kModel: return c.model_index;
    case SweepAxis::kSeqLen: return c.seq_index;
    case SweepAxis::kDeadline: return c.deadline_index;
    case SweepAxis::kLink: return c.link_index;
  }
  return 0;
}

double AllClientSeconds(const std::vector<LayerProfile>& profile) {
  double total = 0.0;
  for (const LayerProfile& l : profile) total += l.client_time_s;
  return total;
}

std::vector<SweepCell> EvaluateScenario(const SweepGrid& grid,
                                        const Scenario& sc) {
  const ModelSpec& model = grid.models[sc.model];
  const int64_t seq_len = grid.seq_lens[sc.seq];
  const LinkSpec& link = grid.links[sc.link];

  std::vector<SweepCell> cells;
  cells.reserve(grid.planners.size());
  for (PlannerKind kind : grid.planners) {
    SweepCell c;
    c.model = model.name;
    c.seq_len = seq_len;
    c.uplink_bps = link.uplink_bps;
    c.downlink_bps = link.downlink_bps;
    c.planner = kind;
    c.model_index = sc.model;
    c.seq_index = sc.seq;
    c.deadline_index = sc.deadline;
    c.link_index = sc.link;
    c.deadline_s = grid.deadlines[sc.deadline];
    cells.push_back(std::move(c));
  }

  try {
    const std::vector<LayerProfile> profile =
        Profile(model, seq_len, grid.client, grid.server, grid.metric);
    double deadline = grid.deadlines[sc.deadline];
    if (grid.deadline_mode == DeadlineMode::kRelativeToClient) {
      deadline *= AllClientSeconds(profile);
    }
    ProblemOptions opts;
    opts.deadline_s = deadline;
    opts.unit_s = grid.unit_s;
    opts.source_at_client = grid.source_at_client;
    opts.rounding = grid.rounding;
    opts.zero_server_time = grid.zero_server_time;
    const PlanProblem problem = BuildProblem(profile, link, opts);
    const double total = problem.TotalValue();
    const PlacementPolicy greedy = PlanGreedy(problem);

    for (SweepCell& c : cells) {
      c.deadline_s = deadline;
      const PlacementPolicy policy = c.planner == PlannerKind::kGreedy
                                         ? greedy
                                         : RunPlanner(c.planner, problem);
      c.feasible = policy.feasible;
      c.server_load = policy.server_load;
      c.total_resource = total;
      c.offload_fraction = total > 0.0 ? policy.client_value / total : 0.0;
      c.latency_s = LatencySeconds(policy.pi, problem);
      if (policy.feasible) {
        c.improvement_pp = ImprovementOverGreedy(
            policy.server_load, greedy.server_load, total, greedy.feasible);
        c.improvement_rel = RelativeImprovementOverGreedy(
            policy.server_load, greedy.server_load, greedy.feasible);
      }
      c.pi = policy.pi;
    }
  } catch (const std::exception& e) {
    for (SweepCell& c : cells) {
      c.feasible = false;
      c.error = e.what();
    }
  }
  return cells;
}

}  // namespace

void ValidateGrid(const SweepGrid& grid) {
  if (grid.models.empty() || grid.seq_lens.empty() || grid.deadlines.empty() ||
      grid.links.empty() || grid.planners.empty()) {
    throw ConfigError("sweep grid has an empty axis");
  }
  for (size_t i = 1; i < grid.deadlines.size(); ++i) {
    if (!(grid.deadlines[i] < grid.deadlines[i - 1])) {
      throw ConfigError("sweep deadlines must be strictly decreasing");
    }
  }
  for (double d : grid.deadlines) {
    if (!(d >= 0.0)) throw ConfigError("sweep deadlines must be non-negative");
  }
  for (int64_t s : grid.seq_lens) {
    if (s < 1) throw ConfigError("sweep seq_lens must be >= 1");
  }
  for (const ModelSpec& m : grid.models) ValidateModel(m);
  for (const LinkSpec& l : grid.links) ValidateLink(l);
  if (!(grid.client.throughput > 0.0) || !(grid.server.throughput > 0.0)) {
    throw ConfigError("sweep devices need positive throughput");
  }
  if (!(grid.unit_s > 0.0)) throw ConfigError("time unit must be positive");
}

std::vector<double> GeometricDeadlines(double max, int count) {
  if (count < 1) throw ConfigError("deadline count must be >= 1");
  if (!(max > 0.0)) throw ConfigError("deadline maximum must be positive");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(count));
  double d = max;
  for (int i = 0; i < count; ++i) {
    out.push_back(d);
    d /= 2.0;
  }
  return out;
}

std::vector<SweepCell> RunSweep(const SweepGrid& grid, int jobs) {
  ValidateGrid(grid);
  std::vector<Scenario> scenarios;
  for (size_t m = 0; m < grid.models.size(); ++m)
    for (size_t s = 0; s < grid.seq_lens.size(); ++s)
      for (size_t d = 0; d < grid.deadlines.size(); ++d)
        for (size_t l = 0; l < grid.links.size(); ++l)
          scenarios.push_back({m, s, d, l});

  std::vector<std::vector<SweepCell>> results(scenarios.size());
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    for (size_t i = next++; i < scenarios.size(); i = next++) {
      results[i] = EvaluateScenario(grid, scenarios[i]);
    }
  };
  const size_t threads =
      std::clamp<size_t>(static_cast<size_t>(std::max(jobs, 1)), 1,
                         scenarios.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::vector<SweepCell> cells;
  cells.reserve(scenarios.size() * grid.planners.size());
  for (auto& group : results) {
    for (auto& c : group) cells.push_back(std::move(c));
  }
  return cells;
}

std::map<size_t, double> MeanOffloadBy(const std::vector<SweepCell>& cells,
                                       PlannerKind planner, SweepAxis axis) {
  std::map<size_t, std::pair<double, size_t>> acc;
  for (const SweepCell& c : cells) {
    if (c.planner != planner || !c.error.empty()) continue;
    auto& [sum, n] = acc[AxisIndex(c, axis)];
    sum += c.offload_fraction;
    ++n;
  }
  std::map<size_t, double> out;
  for (const auto& [k, v] : acc) out[k] = v.first / static_cast<double>(v.second);
  return out;
}

std::map<size_t, double> MeanImprovementBy(const std::vector<SweepCell>& cells,
                                           PlannerKind planner, SweepAxis axis) {
  std::map<size_t, std::pair<double, size_t>> acc;
  for (const SweepCell& c : cells) {
    if (c.planner != planner || !c.improvement_pp) continue;
    auto& [sum, n] = acc[AxisIndex(c, axis)];
    sum += *c.improvement_pp;
    ++n;
  }
  std::map<size_t, double> out;
  for (const auto& [k, v] : acc) out[k] = v.first / static_cast<double>(v.second);
  return out;
}

}  // namespace splitplan
