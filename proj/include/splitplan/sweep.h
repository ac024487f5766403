#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splitplan/cost_model.h"
#include "splitplan/planner.h"
#include "splitplan/problem.h"

namespace splitplan {

enum class DeadlineMode {
  kAbsolute,          // deadlines are seconds
  kRelativeToClient,  // deadlines are fractions of the all-client latency
};

struct SweepGrid {
  std::vector<ModelSpec> models;
  std::vector<int64_t> seq_lens;
  std::vector<double> deadlines;  // strictly decreasing
  DeadlineMode deadline_mode = DeadlineMode::kAbsolute;
  std::vector<LinkSpec> links;
  std::vector<PlannerKind> planners;

  DeviceSpec client;
  DeviceSpec server;
  CostMetric metric = CostMetric::kFlop;
  double unit_s = 1e-3;
  RoundingMode rounding = RoundingMode::kConservative;
  bool source_at_client = true;
  bool zero_server_time = false;
};

// Throws ConfigError for empty axes, non-decreasing deadlines and bad
// devices.
void ValidateGrid(const SweepGrid& grid);

// max, max/2, max/4, ... (count entries).
std::vector<double> GeometricDeadlines(double max, int count);

struct SweepCell {
  std::string model;
  int64_t seq_len = 0;
  double deadline_s = 0.0;
  double uplink_bps = 0.0;
  double downlink_bps = 0.0;
  PlannerKind planner = PlannerKind::kDp;

  size_t model_index = 0;
  size_t seq_index = 0;
  size_t deadline_index = 0;
  size_t link_index = 0;

  bool feasible = false;
  double server_load = 0.0;
  double total_resource = 0.0;
  double offload_fraction = 0.0;  // client_value / total
  double latency_s = 0.0;
  std::optional<double> improvement_pp;
  std::optional<double> improvement_rel;
  Placement pi;
  std::string error;  // set when the cell could not be evaluated
};

// One cell per (model, seq_len, deadline, link, planner), ordered by those
// coordinates. Output does not depend on jobs.
std::vector<SweepCell> RunSweep(const SweepGrid& grid, int jobs = 1);

enum class SweepAxis { kModel, kSeqLen, kDeadline, kLink };

// Mean offload fraction per axis index for one planner. Error cells are
// skipped; infeasible cells count with their reported fraction.
std::map<size_t, double> MeanOffloadBy(const std::vector<SweepCell>& cells,
                                       PlannerKind planner, SweepAxis axis);

// Mean improvement_pp per axis index over cells where it is defined.
std::map<size_t, double> MeanImprovementBy(const std::vector<SweepCell>& cells,
                                           PlannerKind planner, SweepAxis axis);

}  // namespace splitplan
