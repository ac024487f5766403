#include "splitplan/serialization.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "splitplan/log.h"

namespace splitplan {

using nlohmann::json;

namespace {

SeqPolynomial PolyFromJson(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError("custom cost coefficients must be [quadratic, linear, constant]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
T Require(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw ConfigError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad field '") + key + "': " + e.what());
  }
}

template <typename T>
T Optional(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad field '") + key + "': " + e.what());
  }
}

double TimeOrInfinity(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  const json& v = j.at(key);
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError(std::string("field '") + key + "' must be a number or \"inf\"");
  }
  return Require<double>(j, key);
}

double RateOrInfinity(const json& j, const char* key) {
  return TimeOrInfinity(j, key);
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double ParseDouble(const std::string& s, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw ConfigError(std::string("bad ") + what + " value '" + s + "'");
  }
  return v;
}

void WriteOptional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << FormatDouble(*v);
}

}  // namespace

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ModelSpec ModelSpecFromJson(const json& j) {
  ModelSpec spec;
  spec.name = Optional<std::string>(j, "name", "custom");
  spec.input_elems_per_token = Optional<int64_t>(j, "input_elems_per_token", 1);
  if (!j.contains("layers") || !j.at("layers").is_array()) {
    throw ConfigError("model spec needs a 'layers' array");
  }
  for (const json& l : j.at("layers")) {
    LayerEntry e;
    e.kind = ParseLayerKind(Require<std::string>(l, "kind"));
    e.hidden = Optional<int64_t>(l, "d", 1);
    e.heads = Optional<int64_t>(l, "h", 1);
    e.ffn = Optional<int64_t>(l, "d_ff", 1);
    e.classes = Optional<int64_t>(l, "v", 1);
    e.seq_divisor = Optional<int64_t>(l, "seq_divisor", 1);
    if (e.kind == LayerKind::kCustom) {
      e.custom_flop = PolyFromJson(Require<json>(l, "flop"));
      e.custom_memory = l.contains("memory") ? PolyFromJson(l.at("memory"))
                                             : e.custom_flop;
      // Boundary defaults to s*d*4 bytes.
      e.custom_output = l.contains("output")
                            ? PolyFromJson(l.at("output"))
                            : SeqPolynomial{0.0,
                                            static_cast<double>(e.hidden * kBytesPerElement),
                                            0.0};
    }
    spec.layers.push_back(e);
  }
  ValidateModel(spec);
  return spec;
}

ModelSpec LoadModel(std::string_view preset_or_path) {
  for (const std::string& name : PresetNames()) {
    if (name == preset_or_path) return BuildPreset(name);
  }
  std::ifstream in{std::string(preset_or_path)};
  if (!in) {
    throw ConfigError("unknown preset or unreadable model file '" +
                      std::string(preset_or_path) + "'");
  }
  try {
    return ModelSpecFromJson(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("malformed model spec: " + std::string(e.what()));
  }
}

json ProfileToJson(const ModelProfile& profile) {
  json layers = json::array();
  for (const LayerProfile& l : profile.layers) {
    layers.push_back({{"index", l.index},
                      {"kind", LayerKindName(l.kind)},
                      {"r", l.resource},
                      {"client_time_s", l.client_time_s},
                      {"server_time_s", l.server_time_s},
                      {"tau_bytes", l.tau_bytes}});
  }
  return {{"model", profile.model},
          {"seq_len", profile.seq_len},
          {"metric", CostMetricName(profile.metric)},
          {"layers", std::move(layers)}};
}

ModelProfile ProfileFromJson(const json& j) {
  ModelProfile p;
  p.model = Optional<std::string>(j, "model", "");
  p.seq_len = Optional<int64_t>(j, "seq_len", 0);
  p.metric = ParseCostMetric(Optional<std::string>(j, "metric", "flop"));
  if (!j.contains("layers") || !j.at("layers").is_array()) {
    throw ConfigError("profile needs a 'layers' array");
  }
  int64_t next_index = 0;
  for (const json& l : j.at("layers")) {
    LayerProfile lp;
    lp.index = Optional<int64_t>(l, "index", next_index);
    lp.kind = ParseLayerKind(Optional<std::string>(l, "kind", "custom"));
    lp.resource = Require<double>(l, "r");
    lp.client_time_s = Require<double>(l, "client_time_s");
    lp.server_time_s = Require<double>(l, "server_time_s");
    lp.tau_bytes = Require<double>(l, "tau_bytes");
    if (lp.resource < 0 || lp.client_time_s < 0 || lp.server_time_s < 0 ||
        lp.tau_bytes < 0) {
      throw ConfigError("profile values must be non-negative");
    }
    p.layers.push_back(lp);
    ++next_index;
  }
  return p;
}

ScenarioFile ScenarioFromJson(const json& j) {
  ScenarioFile s;
  s.link.uplink_bps = RateOrInfinity(j, "uplink_bps");
  s.link.downlink_bps = RateOrInfinity(j, "downlink_bps");
  s.link.propagation_s = Optional<double>(j, "propagation_s", 0.0);
  s.options.deadline_s = TimeOrInfinity(j, "deadline_s");
  s.options.unit_s = Optional<double>(j, "unit_s", 1e-3);
  s.options.source_at_client = Optional<bool>(j, "source_at_client", true);
  s.options.rounding =
      ParseRoundingMode(Optional<std::string>(j, "rounding", "conservative"));
  s.options.zero_server_time = Optional<bool>(j, "zero_server_time", false);
  ValidateLink(s.link);
  return s;
}

json PolicyToJson(const PlacementPolicy& policy) {
  json pi = json::array();
  for (uint8_t x : policy.pi) pi.push_back(static_cast<int>(x));
  return {{"planner", PlannerName(policy.planner)},
          {"pi", std::move(pi)},
          {"server_load", policy.server_load},
          {"client_value", policy.client_value},
          {"integer_latency", policy.integer_latency},
          {"feasible", policy.feasible}};
}

SweepGrid GridFromJson(const json& j) {
  SweepGrid g;
  for (const json& m : Require<json>(j, "models")) {
    g.models.push_back(m.is_string() ? LoadModel(m.get<std::string>())
                                     : ModelSpecFromJson(m));
  }
  g.seq_lens = Require<std::vector<int64_t>>(j, "seq_lens");

  const std::string mode = Optional<std::string>(j, "deadline_mode", "absolute");
  if (mode == "absolute") {
    g.deadline_mode = DeadlineMode::kAbsolute;
  } else if (mode == "relative") {
    g.deadline_mode = DeadlineMode::kRelativeToClient;
  } else {
    throw ConfigError("deadline_mode must be absolute|relative");
  }
  if (j.contains("deadlines")) {
    g.deadlines = Require<std::vector<double>>(j, "deadlines");
  } else if (j.contains("deadline_max")) {
    g.deadlines = GeometricDeadlines(Require<double>(j, "deadline_max"),
                                     Optional<int>(j, "deadline_count", 4));
  }

  const double prop = Optional<double>(j, "propagation_s", 0.01);
  if (j.contains("links")) {
    for (const json& l : j.at("links")) {
      g.links.push_back({RateOrInfinity(l, "uplink_bps"),
                         RateOrInfinity(l, "downlink_bps"),
                         Optional<double>(l, "propagation_s", prop)});
    }
  } else if (j.contains("bandwidths_bps")) {
    for (double bw : Require<std::vector<double>>(j, "bandwidths_bps")) {
      g.links.push_back({bw, bw, prop});
    }
  }

  if (j.contains("planners")) {
    for (const auto& p : Require<std::vector<std::string>>(j, "planners")) {
      g.planners.push_back(ParsePlannerKind(p));
    }
  } else {
    g.planners = {PlannerKind::kDp, PlannerKind::kGreedy,
                  PlannerKind::kAllServer, PlannerKind::kAllClient};
  }

  if (j.contains("calibrate")) {
    const json& c = j.at("calibrate");
    const ModelSpec ref = LoadModel(Require<std::string>(c, "model"));
    const int64_t seq = Require<int64_t>(c, "seq_len");
    g.client = Calibrate(ref, seq, Require<double>(c, "client_s"), "client");
    g.server = Calibrate(ref, seq, Require<double>(c, "server_s"), "server");
  } else {
    g.client = {"client", Require<double>(j, "client_tput")};
    g.server = {"server", Require<double>(j, "server_tput")};
  }
  g.metric = ParseCostMetric(Optional<std::string>(j, "metric", "flop"));
  g.unit_s = Optional<double>(j, "unit_s", 1e-3);
  g.rounding =
      ParseRoundingMode(Optional<std::string>(j, "rounding", "conservative"));
  g.source_at_client = Optional<bool>(j, "source_at_client", true);
  g.zero_server_time = Optional<bool>(j, "zero_server_time", false);
  return g;
}

void WriteSweepCsv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << kSweepCsvHeader << '\n';
  for (const SweepCell& c : cells) {
    out << c.model << ',' << c.seq_len << ',' << FormatDouble(c.deadline_s)
        << ',' << FormatDouble(c.uplink_bps) << ','
        << FormatDouble(c.downlink_bps) << ',' << PlannerName(c.planner) << ','
        << (c.feasible ? 1 : 0) << ',';
    if (c.error.empty()) {
      out << FormatDouble(c.server_load) << ','
          << FormatDouble(c.offload_fraction) << ','
          << FormatDouble(c.latency_s) << ',';
    } else {
      out << ",,,";
    }
    WriteOptional(out, c.improvement_pp);
    out << ',';
    WriteOptional(out, c.improvement_rel);
    out << '\n';
  }
}

std::vector<SweepRow> ReadSweepCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("sweep CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSweepCsvHeader) throw ConfigError("unexpected sweep CSV header");
  std::vector<SweepRow> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 12) {
      throw ConfigError("sweep CSV line " + std::to_string(line_no) +
                        " has " + std::to_string(f.size()) + " fields");
    }
    SweepRow r;
    r.model = f[0];
    r.seq_len = static_cast<int64_t>(ParseDouble(f[1], "seq_len"));
    r.deadline_s = ParseDouble(f[2], "deadline_s");
    r.uplink_bps = ParseDouble(f[3], "uplink_bps");
    r.downlink_bps = ParseDouble(f[4], "downlink_bps");
    r.planner = f[5];
    r.feasible = f[6] == "1";
    if (f[7].empty()) {
      r.feasible = false;  // errored cell
    } else {
      r.server_load = ParseDouble(f[7], "server_load");
      r.offload_fraction = ParseDouble(f[8], "offload_fraction");
      r.latency_s = ParseDouble(f[9], "latency_s");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SimScenario> ScenariosFromSweep(const std::vector<SweepRow>& rows) {
  using Key = std::tuple<std::string, int64_t, double, double, double>;
  struct Group {
    const SweepRow* dp = nullptr;
    const SweepRow* greedy = nullptr;
    std::optional<double> total;
  };
  std::vector<Key> order;
  std::map<Key, Group> groups;
  for (const SweepRow& r : rows) {
    const Key key{r.model, r.seq_len, r.deadline_s, r.uplink_bps, r.downlink_bps};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    Group& g = it->second;
    const PlannerKind kind = ParsePlannerKind(r.planner);
    if (kind == PlannerKind::kDp) g.dp = &r;
    if (kind == PlannerKind::kGreedy) g.greedy = &r;
    if (kind == PlannerKind::kAllServer) {
      g.total = r.server_load;
    } else if (!g.total && r.offload_fraction < 1.0 && r.server_load > 0.0) {
      g.total = r.server_load / (1.0 - r.offload_fraction);
    }
  }
  std::vector<SimScenario> out;
  for (const Key& key : order) {
    const Group& g = groups.at(key);
    if (g.dp == nullptr || g.greedy == nullptr || !g.dp->feasible ||
        !g.greedy->feasible) {
      continue;
    }
    if (!g.total) {
      log::Debug("skipping scenario without a derivable total resource");
      continue;
    }
    SimScenario s;
    s.server_demand[static_cast<size_t>(PolicyVariant::kDp)] = g.dp->server_load;
    s.server_demand[static_cast<size_t>(PolicyVariant::kGreedy)] =
        g.greedy->server_load;
    s.server_demand[static_cast<size_t>(PolicyVariant::kNoSplit)] = *g.total;
    s.deadline_ms = std::get<2>(key) * 1000.0;
    out.push_back(s);
  }
  return out;
}

void WriteRequestsCsv(std::ostream& out, const SimResult& result) {
  out << "request_id,arrival_ms,admit_ms,wait_ms,demand,duration_ms\n";
  for (const RequestRecord& r : result.records) {
    out << r.id << ',' << FormatDouble(r.arrival_ms) << ','
        << FormatDouble(r.admit_ms) << ',' << FormatDouble(r.wait_ms) << ','
        << FormatDouble(r.demand) << ',' << FormatDouble(r.duration_ms) << '\n';
  }
}

void WriteCumulativeWaitCsv(std::ostream& out, const SimResult& result) {
  out << "request_index,arrival_ms,cumulative_wait_ms\n";
  for (size_t i = 0; i < result.records.size(); ++i) {
    out << i << ',' << FormatDouble(result.records[i].arrival_ms) << ','
        << FormatDouble(result.cumulative_wait_ms[i]) << '\n';
  }
}

json SimSummaryToJson(const SimResult& result) {
  json j = {{"variant", VariantName(result.variant)},
            {"max_wait_ms", result.max_wait_ms},
            {"mean_wait_ms", result.mean_wait_ms},
            {"served", result.served}};
  if (result.deadlock) {
    j["deadlock"] = {{"request_id", result.deadlock->request_id},
                     {"demand", result.deadlock->demand},
                     {"capacity", result.deadlock->capacity}};
  }
  return j;
}

}  // namespace splitplan
