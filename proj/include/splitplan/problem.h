#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "splitplan/cost_model.h"

namespace splitplan {

struct LinkSpec {
  double uplink_bps = 0.0;    // client -> server
  double downlink_bps = 0.0;  // server -> client
  double propagation_s = 0.0;  // charged once per transfer
};

void ValidateLink(const LinkSpec& link);

struct TransferTimes {
  double upload_s = 0.0;
  double download_s = 0.0;
};

// upload = 8*tau/uplink + propagation, download likewise. Infinite rates are
// allowed and mean a free link.
TransferTimes ComputeTransferTimes(double tau_bytes, const LinkSpec& link);

enum class RoundingMode {
  kPaper,         // round to nearest, deadline rounded to nearest
  kConservative,  // costs rounded up, deadline rounded down
};

std::string_view RoundingModeName(RoundingMode mode);
RoundingMode ParseRoundingMode(std::string_view name);

enum class Side { kServer = 0, kClient = 1 };

// Integer cost of a duration. Values within 1e-9 (relative) of a multiple of
// unit are taken as that multiple so exact multiples agree across modes.
int64_t IntegerizeCost(double seconds, double unit_s, RoundingMode mode);
// Integer budget for a deadline; saturates for infinite deadlines.
int64_t IntegerizeBudget(double deadline_s, double unit_s, RoundingMode mode);

struct IntegerizedTimes {
  std::vector<int64_t> costs;
  int64_t budget = 0;
};

IntegerizedTimes Integerize(std::span<const double> times_s, double deadline_s,
                            double unit_s, RoundingMode mode);

// A placement instance. Integer vectors are indexed by layer (0-based here;
// layer k of the recurrences is index k-1). The real-valued times are kept
// so policies can be checked against the deadline in seconds.
struct PlanProblem {
  std::vector<int64_t> client_cost;    // i_k
  std::vector<int64_t> server_cost;    // s_k
  std::vector<int64_t> upload_cost;    // u_k, upload of layer k's input
  std::vector<int64_t> download_cost;  // d_k, download of layer k's input
  std::vector<double> value;           // r_k
  int64_t budget = 0;                  // W
  double unit_s = 1e-3;                // T
  bool source_at_client = true;        // SaC
  RoundingMode rounding = RoundingMode::kConservative;

  std::vector<double> client_time_s;
  std::vector<double> server_time_s;
  std::vector<double> upload_time_s;
  std::vector<double> download_time_s;
  double deadline_s = 0.0;  // Lambda

  size_t num_layers() const { return value.size(); }
  double TotalValue() const;
};

// Throws ConfigError when vector lengths disagree or a cost is negative.
void ValidateProblem(const PlanProblem& problem);

struct ProblemOptions {
  double deadline_s = 0.0;
  double unit_s = 1e-3;
  bool source_at_client = true;
  RoundingMode rounding = RoundingMode::kConservative;
  // Drops server compute from the integer instance, matching a recurrence
  // that charges nothing for server-side layers.
  bool zero_server_time = false;
};

PlanProblem BuildProblem(std::span<const LayerProfile> profile,
                         const LinkSpec& link, const ProblemOptions& options);

}  // namespace splitplan
