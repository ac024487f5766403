#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "splitplan/cost_model.h"
#include "splitplan/planner.h"
#include "splitplan/problem.h"
#include "splitplan/sweep.h"
#include "splitplan/throughput_sim.h"

namespace splitplan {

// Shortest round-trip decimal form.
std::string FormatDouble(double v);

// Model specs: {name, input_elems_per_token?, layers:[{kind, d, h, d_ff, v,
// seq_divisor, flop:[a,b,c], memory:[a,b,c], output:[a,b,c]}]}.
ModelSpec ModelSpecFromJson(const nlohmann::json& j);
// A preset name or a path to a model-spec JSON file.
ModelSpec LoadModel(std::string_view preset_or_path);

nlohmann::json ProfileToJson(const ModelProfile& profile);
ModelProfile ProfileFromJson(const nlohmann::json& j);

// {uplink_bps, downlink_bps, propagation_s, deadline_s, unit_s,
//  source_at_client, rounding, zero_server_time?}. deadline_s may be "inf".
struct ScenarioFile {
  LinkSpec link;
  ProblemOptions options;
};
ScenarioFile ScenarioFromJson(const nlohmann::json& j);

nlohmann::json PolicyToJson(const PlacementPolicy& policy);

// See README for the grid schema.
SweepGrid GridFromJson(const nlohmann::json& j);

inline constexpr std::string_view kSweepCsvHeader =
    "model,seq_len,deadline_s,uplink_bps,downlink_bps,planner,feasible,"
    "server_load,offload_fraction,latency_s,improvement_pp,improvement_rel";

void WriteSweepCsv(std::ostream& out, const std::vector<SweepCell>& cells);

struct SweepRow {
  std::string model;
  int64_t seq_len = 0;
  double deadline_s = 0.0;
  double uplink_bps = 0.0;
  double downlink_bps = 0.0;
  std::string planner;
  bool feasible = false;
  double server_load = 0.0;
  double offload_fraction = 0.0;
  double latency_s = 0.0;
};

// Throws ConfigError on a malformed header or row.
std::vector<SweepRow> ReadSweepCsv(std::istream& in);

// Groups rows by scenario and keeps those where dp and greedy are both
// feasible. No-split demand is the full model resource.
std::vector<SimScenario> ScenariosFromSweep(const std::vector<SweepRow>& rows);

void WriteRequestsCsv(std::ostream& out, const SimResult& result);
void WriteCumulativeWaitCsv(std::ostream& out, const SimResult& result);
nlohmann::json SimSummaryToJson(const SimResult& result);

}  // namespace splitplan
