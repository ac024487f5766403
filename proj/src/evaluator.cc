#include "splitplan/evaluator.h"

#include <string>

namespace splitplan {

namespace {

void CheckLength(std::span<const uint8_t> pi, const PlanProblem& problem) {
  if (pi.size() != problem.num_layers()) {
    throw ContractError("placement has " + std::to_string(pi.size()) +
                        " entries, problem has " +
                        std::to_string(problem.num_layers()) + " layers");
  }
}

template <typename T, typename Vec>
T ChainLatency(std::span<const uint8_t> pi, bool source_at_client,
               const Vec& client, const Vec& server, const Vec& upload,
               const Vec& download) {
  T total{};
  bool prev_client = source_at_client;
  for (size_t k = 0; k < pi.size(); ++k) {
    const bool here_client = pi[k] != 0;
    if (here_client) {
      total += client[k];
      if (!prev_client) total += download[k];
    } else {
      total += server[k];
      if (prev_client) total += upload[k];
    }
    prev_client = here_client;
  }
  return total;
}

}  // namespace

int64_t IntegerLatency(std::span<const uint8_t> pi, const PlanProblem& p) {
  CheckLength(pi, p);
  return ChainLatency<int64_t>(pi, p.source_at_client, p.client_cost,
                               p.server_cost, p.upload_cost, p.download_cost);
}

double LatencySeconds(std::span<const uint8_t> pi, const PlanProblem& p) {
  CheckLength(pi, p);
  if (p.client_time_s.size() != p.num_layers()) {
    throw ContractError("problem carries no real-valued times");
  }
  return ChainLatency<double>(pi, p.source_at_client, p.client_time_s,
                              p.server_time_s, p.upload_time_s,
                              p.download_time_s);
}

double ServerLoad(std::span<const uint8_t> pi, const PlanProblem& p) {
  CheckLength(pi, p);
  double load = 0.0;
  for (size_t k = 0; k < pi.size(); ++k) {
    if (pi[k] == 0) load += p.value[k];
  }
  return load;
}

double ClientValue(std::span<const uint8_t> pi, const PlanProblem& p) {
  CheckLength(pi, p);
  double value = 0.0;
  for (size_t k = 0; k < pi.size(); ++k) {
    if (pi[k] != 0) value += p.value[k];
  }
  return value;
}

std::optional<double> ImprovementOverGreedy(double dp_load, double greedy_load,
                                            double total, bool greedy_feasible) {
  if (!greedy_feasible || !(total > 0.0)) return std::nullopt;
  return 100.0 * (greedy_load - dp_load) / total;
}

std::optional<double> RelativeImprovementOverGreedy(double dp_load,
                                                    double greedy_load,
                                                    bool greedy_feasible) {
  if (!greedy_feasible) return std::nullopt;
  if (greedy_load == 0.0) return dp_load == 0.0 ? std::optional(0.0) : std::nullopt;
  return 100.0 * (greedy_load - dp_load) / greedy_load;
}

}  // namespace splitplan
