#include "splitplan/throughput_sim.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <string>

#include "splitplan/cost_model.h"

namespace splitplan {

std::string_view VariantName(PolicyVariant variant) {
  switch (variant) {
    case PolicyVariant::kDp: return "dp";
    case PolicyVariant::kGreedy: return "greedy";
    case PolicyVariant::kNoSplit: return "nosplit";
  }
  return "dp";
}

PolicyVariant ParseVariant(std::string_view name) {
  if (name == "dp") return PolicyVariant::kDp;
  if (name == "greedy") return PolicyVariant::kGreedy;
  if (name == "nosplit") return PolicyVariant::kNoSplit;
  throw ConfigError("unknown policy variant '" + std::string(name) + "'");
}

void ValidateSimConfig(const SimConfig& c) {
  if (!(c.beta > 0.0) || !std::isfinite(c.beta)) {
    throw ConfigError("arrival rate beta must be positive");
  }
  if (!(c.capacity > 0.0)) throw ConfigError("capacity must be positive");
  if (c.horizon < 0) throw ConfigError("horizon must be non-negative");
  if (c.scenarios.empty()) throw ConfigError("scenario table is empty");
  if (c.exec_count_max < 1) throw ConfigError("exec_count_max must be >= 1");
  for (const SimScenario& s : c.scenarios) {
    if (!(s.deadline_ms >= 0.0)) throw ConfigError("negative scenario deadline");
    for (double d : s.server_demand) {
      if (!(d >= 0.0)) throw ConfigError("negative scenario demand");
    }
  }
}

double NoSplitMeanDemand(const std::vector<SimScenario>& scenarios) {
  if (scenarios.empty()) throw ConfigError("scenario table is empty");
  double sum = 0.0;
  for (const SimScenario& s : scenarios) {
    sum += s.server_demand[static_cast<size_t>(PolicyVariant::kNoSplit)];
  }
  return sum / static_cast<double>(scenarios.size());
}

double CapacityForRequests(double requests) { return requests; }

int64_t ToDemandUnits(double demand) {
  return static_cast<int64_t>(std::llround(demand * kDemandScale));
}

std::vector<Request> GenerateStream(const SimConfig& config) {
  ValidateSimConfig(config);
  const double mean_nosplit = NoSplitMeanDemand(config.scenarios);
  if (!(mean_nosplit > 0.0)) {
    throw ConfigError("no-split demands average to zero; cannot normalize");
  }
  std::mt19937_64 rng(config.seed);
  std::exponential_distribution<double> gap(config.beta);
  std::uniform_int_distribution<size_t> pick(0, config.scenarios.size() - 1);
  std::uniform_int_distribution<int> execs(1, config.exec_count_max);

  std::vector<Request> out;
  out.reserve(static_cast<size_t>(config.horizon));
  double t = 0.0;
  for (int64_t id = 0; id < config.horizon; ++id) {
    t += gap(rng);
    Request r;
    r.id = id;
    r.arrival_ms = t;
    r.scenario = pick(rng);
    r.exec_count = execs(rng);
    const SimScenario& sc = config.scenarios[r.scenario];
    r.demand = sc.server_demand[static_cast<size_t>(config.variant)] / mean_nosplit;
    r.duration_ms = sc.deadline_ms * r.exec_count;
    out.push_back(r);
  }
  return out;
}

SimResult SimulateRequests(const SimConfig& config,
                           const std::vector<Request>& requests) {
  if (!(config.capacity > 0.0)) throw ConfigError("capacity must be positive");
  SimResult result;
  result.variant = config.variant;
  result.capacity_units = ToDemandUnits(config.capacity);

  struct Completion {
    double time;
    int64_t seq;
    int64_t demand;
    bool operator>(const Completion& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };
  std::priority_queue<Completion, std::vector<Completion>, std::greater<>>
      running;
  std::deque<size_t> waiting;
  int64_t free_units = result.capacity_units;
  int64_t admitted = 0, completed = 0;
  size_t next_arrival = 0;

  const auto record_trace = [&](double now) {
    if (!config.record_trace) return;
    result.trace.push_back({now, static_cast<int64_t>(next_arrival), completed,
                            static_cast<int64_t>(waiting.size()),
                            static_cast<int64_t>(running.size()),
                            result.capacity_units - free_units, free_units});
  };

  while (next_arrival < requests.size() || !running.empty()) {
    double now = 0.0;
    const bool completion_first =
        !running.empty() && (next_arrival == requests.size() ||
                             running.top().time <= requests[next_arrival].arrival_ms);
    if (completion_first) {
      const Completion done = running.top();
      running.pop();
      now = done.time;
      free_units += done.demand;
      ++completed;
    } else {
      now = requests[next_arrival].arrival_ms;
      waiting.push_back(next_arrival);
      ++next_arrival;
    }

    while (!waiting.empty()) {
      const Request& head = requests[waiting.front()];
      const int64_t need = ToDemandUnits(head.demand);
      if (need > result.capacity_units) {
        result.deadlock = Deadlock{head.id, head.demand, config.capacity};
        break;
      }
      if (need > free_units) break;
      free_units -= need;
      running.push({now + head.duration_ms, admitted, need});
      ++admitted;
      result.records.push_back({head.id, head.arrival_ms, now,
                                now - head.arrival_ms, head.demand,
                                head.duration_ms});
      waiting.pop_front();
    }
    record_trace(now);
    if (result.deadlock) break;
  }

  result.served = admitted;
  double cumulative = 0.0;
  result.cumulative_wait_ms.reserve(result.records.size());
  for (const RequestRecord& r : result.records) {
    result.max_wait_ms = std::max(result.max_wait_ms, r.wait_ms);
    cumulative += r.wait_ms;
    result.cumulative_wait_ms.push_back(cumulative);
  }
  if (!result.records.empty()) {
    result.mean_wait_ms = cumulative / static_cast<double>(result.records.size());
  }
  return result;
}

SimResult Simulate(const SimConfig& config) {
  return SimulateRequests(config, GenerateStream(config));
}

std::array<SimResult, 3> CompareVariants(const SimConfig& base) {
  std::array<SimResult, 3> out;
  for (PolicyVariant v :
       {PolicyVariant::kDp, PolicyVariant::kGreedy, PolicyVariant::kNoSplit}) {
    SimConfig config = base;
    config.variant = v;
    out[static_cast<size_t>(v)] = Simulate(config);
  }
  return out;
}

}  // namespace splitplan
