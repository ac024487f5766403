#include "splitplan/problem.h"

#include <cmath>
#include <limits>
#include <string>

namespace splitplan {

namespace {

constexpr double kSnapTolerance = 1e-9;
// Budgets are clamped inside the planner; this only bounds the conversion.
constexpr int64_t kMaxBudget = std::numeric_limits<int64_t>::max() / 4;

bool NearInteger(double x, double& nearest) {
  nearest = std::nearbyint(x);
  return std::fabs(x - nearest) <= kSnapTolerance * std::max(1.0, std::fabs(x));
}

int64_t ToBudgetInt(double x) {
  if (x >= static_cast<double>(kMaxBudget)) return kMaxBudget;
  return static_cast<int64_t>(x);
}

}  // namespace

void ValidateLink(const LinkSpec& link) {
  if (!(link.uplink_bps > 0.0) || !(link.downlink_bps > 0.0)) {
    throw ConfigError("link rates must be positive");
  }
  if (!(link.propagation_s >= 0.0) || !std::isfinite(link.propagation_s)) {
    throw ConfigError("propagation delay must be a finite non-negative time");
  }
}

TransferTimes ComputeTransferTimes(double tau_bytes, const LinkSpec& link) {
  ValidateLink(link);
  const double bits = 8.0 * tau_bytes;
  return {bits / link.uplink_bps + link.propagation_s,
          bits / link.downlink_bps + link.propagation_s};
}

std::string_view RoundingModeName(RoundingMode mode) {
  return mode == RoundingMode::kPaper ? "paper" : "conservative";
}

RoundingMode ParseRoundingMode(std::string_view name) {
  if (name == "paper") return RoundingMode::kPaper;
  if (name == "conservative") return RoundingMode::kConservative;
  throw ConfigError("unknown rounding mode '" + std::string(name) +
                    "' (expected paper|conservative)");
}

int64_t IntegerizeCost(double seconds, double unit_s, RoundingMode mode) {
  if (!(unit_s > 0.0)) throw ConfigError("time unit must be positive");
  if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
    throw ConfigError("costs must be finite and non-negative");
  }
  const double x = seconds / unit_s;
  double nearest = 0.0;
  if (NearInteger(x, nearest)) return ToBudgetInt(nearest);
  if (mode == RoundingMode::kPaper) return ToBudgetInt(std::round(x));
  return ToBudgetInt(std::ceil(x));
}

int64_t IntegerizeBudget(double deadline_s, double unit_s, RoundingMode mode) {
  if (!(unit_s > 0.0)) throw ConfigError("time unit must be positive");
  if (!(deadline_s >= 0.0)) throw ConfigError("deadline must be non-negative");
  if (std::isinf(deadline_s)) return kMaxBudget;
  const double x = deadline_s / unit_s;
  double nearest = 0.0;
  if (NearInteger(x, nearest)) return ToBudgetInt(nearest);
  if (mode == RoundingMode::kPaper) return ToBudgetInt(std::round(x));
  return ToBudgetInt(std::floor(x));
}

IntegerizedTimes Integerize(std::span<const double> times_s, double deadline_s,
                            double unit_s, RoundingMode mode) {
  IntegerizedTimes out;
  out.costs.reserve(times_s.size());
  for (double t : times_s) out.costs.push_back(IntegerizeCost(t, unit_s, mode));
  out.budget = IntegerizeBudget(deadline_s, unit_s, mode);
  return out;
}

double PlanProblem::TotalValue() const {
  double total = 0.0;
  for (double r : value) total += r;
  return total;
}

void ValidateProblem(const PlanProblem& p) {
  const size_t n = p.value.size();
  if (p.client_cost.size() != n || p.server_cost.size() != n ||
      p.upload_cost.size() != n || p.download_cost.size() != n) {
    throw ConfigError("problem cost vectors differ in length");
  }
  for (size_t k = 0; k < n; ++k) {
    if (p.client_cost[k] < 0 || p.server_cost[k] < 0 || p.upload_cost[k] < 0 ||
        p.download_cost[k] < 0) {
      throw ConfigError("integer costs must be non-negative (layer " +
                        std::to_string(k) + ")");
    }
    if (!(p.value[k] >= 0.0) || !std::isfinite(p.value[k])) {
      throw ConfigError("layer values must be finite and non-negative");
    }
  }
  if (p.budget < 0) throw ConfigError("budget must be non-negative");
}

PlanProblem BuildProblem(std::span<const LayerProfile> profile,
                         const LinkSpec& link, const ProblemOptions& options) {
  ValidateLink(link);
  if (!(options.unit_s > 0.0)) throw ConfigError("time unit must be positive");
  if (!(options.deadline_s >= 0.0)) {
    throw ConfigError("deadline must be non-negative");
  }
  PlanProblem p;
  p.unit_s = options.unit_s;
  p.source_at_client = options.source_at_client;
  p.rounding = options.rounding;
  p.deadline_s = options.deadline_s;
  const size_t n = profile.size();
  p.value.reserve(n);
  for (const LayerProfile& layer : profile) {
    const TransferTimes tx = ComputeTransferTimes(layer.tau_bytes, link);
    p.value.push_back(layer.resource);
    p.client_time_s.push_back(layer.client_time_s);
    p.server_time_s.push_back(options.zero_server_time ? 0.0
                                                       : layer.server_time_s);
    p.upload_time_s.push_back(tx.upload_s);
    p.download_time_s.push_back(tx.download_s);
  }
  const auto integerize = [&](const std::vector<double>& times) {
    std::vector<int64_t> out;
    out.reserve(times.size());
    for (double t : times) {
      out.push_back(IntegerizeCost(t, options.unit_s, options.rounding));
    }
    return out;
  };
  p.client_cost = integerize(p.client_time_s);
  p.server_cost = integerize(p.server_time_s);
  p.upload_cost = integerize(p.upload_time_s);
  p.download_cost = integerize(p.download_time_s);
  p.budget =
      IntegerizeBudget(options.deadline_s, options.unit_s, options.rounding);
  ValidateProblem(p);
  return p;
}

}  // namespace splitplan
