#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "splitplan/problem.h"

namespace splitplan {

// Raised when a policy does not match the problem it is evaluated against.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A placement: 1 = client, 0 = server, one entry per layer.
using Placement = std::vector<uint8_t>;

// End-to-end latency of a placement in integer time units:
//   sum_l x_l (i_l + (1 - x_prev) d_l) + (1 - x_l)(s_l + x_prev u_l)
// with x_prev of the first layer given by the data origin.
int64_t IntegerLatency(std::span<const uint8_t> pi, const PlanProblem& problem);

// The same sum over the real-valued times, in seconds.
double LatencySeconds(std::span<const uint8_t> pi, const PlanProblem& problem);

// sum_l (1 - x_l) r_l
double ServerLoad(std::span<const uint8_t> pi, const PlanProblem& problem);

// sum_l x_l r_l
double ClientValue(std::span<const uint8_t> pi, const PlanProblem& problem);

// Percentage points of total resource saved relative to greedy:
// 100 * (greedy_load - dp_load) / total. Empty when greedy is infeasible or
// total is not positive.
std::optional<double> ImprovementOverGreedy(double dp_load, double greedy_load,
                                            double total, bool greedy_feasible);

// 100 * (greedy_load - dp_load) / greedy_load, the relative reading.
std::optional<double> RelativeImprovementOverGreedy(double dp_load,
                                                    double greedy_load,
                                                    bool greedy_feasible);

}  // namespace splitplan
