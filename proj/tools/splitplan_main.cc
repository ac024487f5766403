// splitplan: profile transformer layers, plan client/server placements,
// sweep scenarios and simulate server queueing.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "splitplan/cost_model.h"
#include "splitplan/log.h"
#include "splitplan/planner.h"
#include "splitplan/problem.h"
#include "splitplan/serialization.h"
#include "splitplan/sweep.h"
#include "splitplan/throughput_sim.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace splitplan;

namespace {

constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kUnwritable = 3,
  kInfeasible = 4,
  kDeadlock = 5,
};

struct ExitError {
  int code;
  std::string message;
};

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ExitError{kUsage, "cannot read '" + path + "'"};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ExitError{kUsage, "malformed JSON in '" + path + "': " + e.what()};
  }
}

// Writes everything or nothing to each target; "-" means stdout.
class OutputSet {
 public:
  void Add(std::string path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
  }

  void Commit() const {
    for (const auto& [path, content] : files_) {
      if (path == "-") continue;
      const fs::path parent = fs::path(path).parent_path();
      std::error_code ec;
      if (!parent.empty() && !fs::is_directory(parent, ec)) {
        throw ExitError{kUnwritable, "output directory '" + parent.string() +
                                         "' does not exist"};
      }
      std::ofstream probe(path, std::ios::app);
      if (!probe) throw ExitError{kUnwritable, "cannot write '" + path + "'"};
    }
    for (const auto& [path, content] : files_) {
      if (path == "-") {
        std::cout << content;
        continue;
      }
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << content;
      if (!out) throw ExitError{kUnwritable, "failed writing '" + path + "'"};
    }
  }

  std::vector<std::string> paths() const {
    std::vector<std::string> out;
    for (const auto& f : files_) out.push_back(f.first);
    return out;
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

void WriteManifest(const std::string& manifest_path, const std::string& command,
                   const std::vector<std::string>& inputs,
                   const std::vector<std::string>& outputs,
                   std::optional<uint64_t> seed,
                   std::chrono::steady_clock::time_point started) {
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  json m = {{"command", command},
            {"inputs", inputs},
            {"outputs", outputs},
            {"tool_version", kToolVersion},
            {"wall_clock_s", elapsed}};
  m["seed"] = seed ? json(*seed) : json(nullptr);
  std::ofstream out(manifest_path, std::ios::trunc);
  out << m.dump(2) << '\n';
  if (!out) log::Error("could not write manifest '" + manifest_path + "'");
}

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- profile

struct ProfileArgs {
  std::string model;
  int64_t seq_len = 0;
  std::string metric = "flop";
  std::optional<double> client_tput, server_tput;
  std::optional<double> calibrate_client, calibrate_server;
  std::string out;
};

int RunProfile(const ProfileArgs& a) {
  const auto started = std::chrono::steady_clock::now();
  if (a.seq_len < 1) throw ExitError{kUsage, "--seq-len must be >= 1"};
  const ModelSpec spec = LoadModel(a.model);
  const CostMetric metric = ParseCostMetric(a.metric);

  const auto device = [&](const std::optional<double>& tput,
                          const std::optional<double>& target,
                          const char* name) -> DeviceSpec {
    if (target) return Calibrate(spec, a.seq_len, *target, name);
    if (tput) return {name, *tput};
    throw ExitError{kUsage, std::string("need --") + name + "-tput or --calibrate-" +
                                name};
  };
  const DeviceSpec client = device(a.client_tput, a.calibrate_client, "client");
  const DeviceSpec server = device(a.server_tput, a.calibrate_server, "server");

  ModelProfile profile;
  profile.model = spec.name;
  profile.seq_len = a.seq_len;
  profile.metric = metric;
  profile.layers = Profile(spec, a.seq_len, client, server, metric);
  log::Info("profiled " + std::to_string(profile.layers.size()) + " layers");

  OutputSet outputs;
  outputs.Add(a.out, Dump(ProfileToJson(profile)));
  outputs.Commit();
  if (a.out != "-") {
    WriteManifest(a.out + ".manifest.json", "profile", {a.model}, outputs.paths(),
                  std::nullopt, started);
  }
  return kOk;
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
  std::string profile, scenario, planner = "dp", out;
  std::string must_end_at;
};

int RunPlan(const PlanArgs& a) {
  const auto started = std::chrono::steady_clock::now();
  const ModelProfile profile = ProfileFromJson(ReadJsonFile(a.profile));
  const ScenarioFile scenario = ScenarioFromJson(ReadJsonFile(a.scenario));
  const PlannerKind kind = ParsePlannerKind(a.planner);
  const PlanProblem problem =
      BuildProblem(profile.layers, scenario.link, scenario.options);
  log::Debug("budget W=" + std::to_string(problem.budget) + " units");

  DpOptions dp_options;
  if (a.must_end_at == "client") dp_options.must_end_at = Side::kClient;
  if (a.must_end_at == "server") dp_options.must_end_at = Side::kServer;

  PlacementPolicy policy;
  if (kind == PlannerKind::kDp) {
    policy = PlanDp(problem, dp_options);
  } else if (kind == PlannerKind::kOracle) {
    policy = PlanOracle(problem, dp_options);
  } else {
    policy = RunPlanner(kind, problem);
  }

  OutputSet outputs;
  outputs.Add(a.out, Dump(PolicyToJson(policy)));
  outputs.Commit();
  if (a.out != "-") {
    WriteManifest(a.out + ".manifest.json", "plan", {a.profile, a.scenario},
                  outputs.paths(), std::nullopt, started);
  }
  if (!policy.feasible) {
    log::Error("no placement meets the deadline");
    return kInfeasible;
  }
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string grid, out;
  int jobs = 1;
  std::optional<double> deadline_max;
  int deadline_count = 4;
};

int RunSweepCommand(const SweepArgs& a) {
  const auto started = std::chrono::steady_clock::now();
  SweepGrid grid = GridFromJson(ReadJsonFile(a.grid));
  if (a.deadline_max) {
    grid.deadlines = GeometricDeadlines(*a.deadline_max, a.deadline_count);
  }
  const std::vector<SweepCell> cells = RunSweep(grid, a.jobs);
  for (const SweepCell& c : cells) {
    if (!c.error.empty()) log::Error("cell " + c.model + ": " + c.error);
  }
  std::ostringstream csv;
  WriteSweepCsv(csv, cells);
  OutputSet outputs;
  outputs.Add(a.out, csv.str());
  outputs.Commit();
  if (a.out != "-") {
    WriteManifest(a.out + ".manifest.json", "sweep", {a.grid}, outputs.paths(),
                  std::nullopt, started);
  }
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenarios, config, out_dir;
  std::optional<std::string> variant;
  std::optional<double> beta;
  std::optional<double> capacity_requests;
  std::optional<uint64_t> seed;
  std::optional<int64_t> horizon;
  std::optional<int> exec_count_max;
};

int RunSimulate(SimulateArgs a) {
  const auto started = std::chrono::steady_clock::now();
  if (!a.config.empty()) {
    const json c = ReadJsonFile(a.config);
    if (!a.beta && c.contains("beta")) a.beta = c["beta"].get<double>();
    if (!a.capacity_requests && c.contains("capacity_requests")) {
      a.capacity_requests = c["capacity_requests"].get<double>();
    }
    if (!a.seed && c.contains("seed")) a.seed = c["seed"].get<uint64_t>();
    if (!a.horizon && c.contains("horizon")) a.horizon = c["horizon"].get<int64_t>();
    if (!a.exec_count_max && c.contains("exec_count_max")) {
      a.exec_count_max = c["exec_count_max"].get<int>();
    }
    if (!a.variant && c.contains("variant")) a.variant = c["variant"].get<std::string>();
  }
  if (!a.seed) throw ExitError{kUsage, "--seed is required"};
  if (!a.beta) throw ExitError{kUsage, "--beta is required"};
  if (!a.horizon) throw ExitError{kUsage, "--horizon is required"};

  std::ifstream in(a.scenarios);
  if (!in) throw ExitError{kUsage, "cannot read '" + a.scenarios + "'"};
  const std::vector<SimScenario> table = ScenariosFromSweep(ReadSweepCsv(in));
  if (table.empty()) {
    throw ExitError{kUsage, "scenario CSV has no rows where dp and greedy are feasible"};
  }

  SimConfig config;
  config.beta = *a.beta;
  config.capacity = CapacityForRequests(a.capacity_requests.value_or(500.0));
  config.seed = *a.seed;
  config.horizon = *a.horizon;
  config.scenarios = table;
  config.exec_count_max = a.exec_count_max.value_or(10);
  ValidateSimConfig(config);

  const std::string variant = a.variant.value_or("dp");
  std::vector<SimResult> results;
  if (variant == "compare") {
    for (SimResult& r : CompareVariants(config)) results.push_back(std::move(r));
  } else {
    config.variant = ParseVariant(variant);
    results.push_back(Simulate(config));
  }

  std::error_code ec;
  if (!fs::is_directory(a.out_dir, ec) && !fs::create_directories(a.out_dir, ec)) {
    throw ExitError{kUnwritable, "cannot create output directory '" + a.out_dir + "'"};
  }
  OutputSet outputs;
  bool deadlocked = false;
  for (const SimResult& r : results) {
    const std::string stem =
        (fs::path(a.out_dir) / std::string(VariantName(r.variant))).string();
    std::ostringstream requests, cumulative;
    WriteRequestsCsv(requests, r);
    WriteCumulativeWaitCsv(cumulative, r);
    outputs.Add(stem + "_requests.csv", requests.str());
    outputs.Add(stem + "_cumulative_wait.csv", cumulative.str());
    outputs.Add(stem + "_summary.json", Dump(SimSummaryToJson(r)));
    if (r.deadlock) {
      deadlocked = true;
      log::Error("variant " + std::string(VariantName(r.variant)) + ": request " +
                 std::to_string(r.deadlock->request_id) +
                 " needs more than the whole capacity; queue blocked");
    }
  }
  outputs.Commit();
  WriteManifest((fs::path(a.out_dir) / "manifest.json").string(), "simulate",
                {a.scenarios}, outputs.paths(), a.seed, started);
  return deadlocked ? kDeadlock : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Client/server layer placement planner for transformer inference"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  ProfileArgs profile_args;
  auto* profile = app.add_subcommand("profile", "Write a per-layer cost profile");
  profile->add_option("--model", profile_args.model, "Preset name or model-spec JSON")
      ->required();
  profile->add_option("--seq-len", profile_args.seq_len, "Input tokens")->required();
  profile->add_option("--metric", profile_args.metric, "flop|memory");
  profile->add_option("--client-tput", profile_args.client_tput, "Client FLOP/s");
  profile->add_option("--server-tput", profile_args.server_tput, "Server FLOP/s");
  profile->add_option("--calibrate-client", profile_args.calibrate_client,
                      "Full-model client time in seconds");
  profile->add_option("--calibrate-server", profile_args.calibrate_server,
                      "Full-model server time in seconds");
  profile->add_option("--out", profile_args.out, "Output path or -")->required();

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Compute a placement policy");
  plan->add_option("--profile", plan_args.profile)->required();
  plan->add_option("--scenario", plan_args.scenario)->required();
  plan->add_option("--planner", plan_args.planner,
                   "dp|greedy|oracle|all-server|all-client");
  plan->add_option("--must-end-at", plan_args.must_end_at, "client|server")
      ->check(CLI::IsMember({"client", "server"}));
  plan->add_option("--out", plan_args.out)->required();

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Evaluate planners over a scenario grid");
  sweep->add_option("--grid", sweep_args.grid)->required();
  sweep->add_option("--out", sweep_args.out)->required();
  sweep->add_option("--jobs", sweep_args.jobs)->check(CLI::PositiveNumber);
  sweep->add_option("--deadline-max", sweep_args.deadline_max,
                    "Largest deadline; later ones halve");
  sweep->add_option("--deadline-count", sweep_args.deadline_count);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Queueing simulation of server load");
  simulate->add_option("--scenarios", sim_args.scenarios, "Sweep CSV")->required();
  simulate->add_option("--config", sim_args.config, "SimConfig JSON");
  simulate->add_option("--beta", sim_args.beta, "Arrivals per millisecond");
  simulate->add_option("--capacity-requests", sim_args.capacity_requests);
  simulate->add_option("--seed", sim_args.seed);
  simulate->add_option("--variant", sim_args.variant, "dp|greedy|nosplit|compare")
      ->check(CLI::IsMember({"dp", "greedy", "nosplit", "compare"}));
  simulate->add_option("--horizon", sim_args.horizon, "Number of requests");
  simulate->add_option("--exec-count-max", sim_args.exec_count_max);
  simulate->add_option("--out-dir", sim_args.out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*profile) return RunProfile(profile_args);
    if (*plan) return RunPlan(plan_args);
    if (*sweep) return RunSweepCommand(sweep_args);
    if (*simulate) return RunSimulate(sim_args);
  } catch (const ExitError& e) {
    log::Error(e.message);
    return e.code;
  } catch (const ConfigError& e) {
    log::Error(e.what());
    return kUsage;
  } catch (const SizeError& e) {
    log::Error(e.what());
    return kUsage;
  } catch (const DegenerateModelError& e) {
    log::Error(e.what());
    return kUsage;
  } catch (const std::exception& e) {
    log::Error(e.what());
    return 1;
  }
  return kUsage;
}
