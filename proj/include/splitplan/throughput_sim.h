#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace splitplan {

enum class PolicyVariant { kDp = 0, kGreedy = 1, kNoSplit = 2 };

std::string_view VariantName(PolicyVariant variant);
PolicyVariant ParseVariant(std::string_view name);

// One workload class: server demand under each variant and its deadline.
struct SimScenario {
  std::array<double, 3> server_demand{};  // indexed by PolicyVariant
  double deadline_ms = 0.0;
};

struct SimConfig {
  double beta = 0.0;      // arrivals per millisecond
  double capacity = 0.0;  // in normalized demand units
  uint64_t seed = 0;
  PolicyVariant variant = PolicyVariant::kDp;
  int64_t horizon = 0;    // number of requests
  std::vector<SimScenario> scenarios;
  int exec_count_max = 10;
  // Record every event's occupancy; off by default.
  bool record_trace = false;
};

// Throws ConfigError on a non-positive rate or capacity, an empty scenario
// table or a negative horizon.
void ValidateSimConfig(const SimConfig& config);

// Demands are divided by this so the mean no-split request has demand 1.
double NoSplitMeanDemand(const std::vector<SimScenario>& scenarios);

// Capacity that serves `requests` average no-split requests at once, in
// normalized units. Equals `requests`.
double CapacityForRequests(double requests);

struct Request {
  int64_t id = 0;
  double arrival_ms = 0.0;
  size_t scenario = 0;
  int exec_count = 1;
  double demand = 0.0;  // normalized
  double duration_ms = 0.0;
};

// Arrival skeleton plus the configured variant's demands. Identical seeds
// give identical timestamps, scenarios and execution counts for every
// variant.
std::vector<Request> GenerateStream(const SimConfig& config);

struct RequestRecord {
  int64_t id = 0;
  double arrival_ms = 0.0;
  double admit_ms = 0.0;
  double wait_ms = 0.0;
  double demand = 0.0;
  double duration_ms = 0.0;
};

struct TracePoint {
  double time_ms = 0.0;
  int64_t arrived = 0;
  int64_t completed = 0;
  int64_t queued = 0;
  int64_t in_service = 0;
  int64_t in_service_demand = 0;  // fixed-point demand units
  int64_t free_capacity = 0;      // fixed-point demand units
};

struct Deadlock {
  int64_t request_id = 0;
  double demand = 0.0;
  double capacity = 0.0;
};

struct SimResult {
  PolicyVariant variant = PolicyVariant::kDp;
  std::vector<RequestRecord> records;  // admitted requests, arrival order
  double max_wait_ms = 0.0;
  double mean_wait_ms = 0.0;
  std::vector<double> cumulative_wait_ms;  // running sum over records
  int64_t served = 0;
  std::optional<Deadlock> deadlock;
  std::vector<TracePoint> trace;
  int64_t capacity_units = 0;  // fixed-point capacity
};

// Demands and capacity are tracked in units of 1/kDemandScale so capacity
// accounting is exact.
inline constexpr double kDemandScale = 1e6;
int64_t ToDemandUnits(double demand);

// FIFO admission on a capacity-limited server. Completions are processed
// before arrivals at equal timestamps. A request whose demand exceeds
// capacity blocks the queue for good; the run stops and reports it.
SimResult Simulate(const SimConfig& config);
SimResult SimulateRequests(const SimConfig& config,
                           const std::vector<Request>& requests);

// dp, greedy and no-split over one shared arrival skeleton.
std::array<SimResult, 3> CompareVariants(const SimConfig& base);

}  // namespace splitplan
