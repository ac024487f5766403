#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splitplan/evaluator.h"
#include "splitplan/problem.h"

namespace splitplan {

// Raised when an exhaustive search is asked to enumerate too many layers.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PlannerKind { kDp, kGreedy, kOracle, kAllServer, kAllClient };

std::string_view PlannerName(PlannerKind kind);
// Accepts "all_server" and "all-server" spellings.
PlannerKind ParsePlannerKind(std::string_view name);

struct PlacementPolicy {
  PlannerKind planner = PlannerKind::kDp;
  Placement pi;               // 1 = client, 0 = server
  double client_value = 0.0;  // sum of r over client layers
  double server_load = 0.0;   // sum of r over server layers
  int64_t integer_latency = 0;
  bool feasible = false;
};

// Value stored in unreachable DP cells; compares below every real value.
inline constexpr double kInfeasibleValue =
    -std::numeric_limits<double>::infinity();

// Best client value with layer k resident at the client (client table) or
// at the server (server table) using at most j time units.
class DpTables {
 public:
  DpTables(size_t layers, int64_t budget);

  size_t layers() const { return layers_; }
  int64_t budget() const { return budget_; }

  // Out-of-range budgets (j < 0) read as kInfeasibleValue.
  double client(size_t k, int64_t j) const { return At(client_, k, j); }
  double server(size_t k, int64_t j) const { return At(server_, k, j); }

  void set_client(size_t k, int64_t j, double v) { client_[Index(k, j)] = v; }
  void set_server(size_t k, int64_t j, double v) { server_[Index(k, j)] = v; }

 private:
  size_t Index(size_t k, int64_t j) const {
    return k * static_cast<size_t>(budget_ + 1) + static_cast<size_t>(j);
  }
  double At(const std::vector<double>& table, size_t k, int64_t j) const {
    return j < 0 ? kInfeasibleValue : table[Index(k, j)];
  }

  size_t layers_;
  int64_t budget_;
  std::vector<double> client_;
  std::vector<double> server_;
};

struct DpOptions {
  // Restricts the layer the inference finishes on.
  std::optional<Side> must_end_at;
};

// Largest budget any placement can use; budgets beyond it change nothing.
int64_t LatencyUpperBound(const PlanProblem& problem);

// Fills both tables up to min(W, LatencyUpperBound).
DpTables FillDpTables(const PlanProblem& problem);

// Optimal placement maximizing client value (minimizing server load) subject
// to integer latency <= W. O(L*W) time and memory. Infeasible instances
// return the all-server placement with feasible = false.
PlacementPolicy PlanDp(const PlanProblem& problem, const DpOptions& options = {});

// Longest client prefix whose placement meets the budget; the rest runs on
// the server.
PlacementPolicy PlanGreedy(const PlanProblem& problem);

PlacementPolicy PlanTrivial(const PlanProblem& problem, Side side);

inline constexpr size_t kOracleMaxLayers = 24;

// Exhaustive search over all 2^L placements. Ties go to the smallest
// placement read as a binary number with the first layer most significant.
// Throws SizeError above kOracleMaxLayers layers.
PlacementPolicy PlanOracle(const PlanProblem& problem,
                           const DpOptions& options = {});

PlacementPolicy RunPlanner(PlannerKind kind, const PlanProblem& problem);

// Fills value, load, latency and feasibility for a given placement.
PlacementPolicy EvaluatePlacement(PlannerKind kind, Placement pi,
                                  const PlanProblem& problem);

}  // namespace splitplan
