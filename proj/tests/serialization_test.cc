#include <cmath>
#include <sstream>

#include "doctest.h"
#include "splitplan/serialization.h"
#include "test_support.h"

using namespace splitplan;
using nlohmann::json;

TEST_CASE("profile JSON keeps every field") {
  const ModelSpec bert = BuildPreset("bert-12");
  ModelProfile p;
  p.model = bert.name;
  p.seq_len = 300;
  p.metric = CostMetric::kFlop;
  p.layers = Profile(bert, 300, {"c", 1.7e10}, {"s", 3.3e12}, p.metric);
  const json j = ProfileToJson(p);
  CHECK(j["model"] == "bert-12");
  CHECK(j["metric"] == "flop");
  CHECK(j["layers"][1]["kind"] == "layer_norm");
  const ModelProfile back = ProfileFromJson(json::parse(j.dump()));
  REQUIRE(back.layers.size() == p.layers.size());
  for (size_t i = 0; i < p.layers.size(); ++i) {
    CHECK(back.layers[i].resource == p.layers[i].resource);
    CHECK(back.layers[i].client_time_s == p.layers[i].client_time_s);
    CHECK(back.layers[i].server_time_s == p.layers[i].server_time_s);
    CHECK(back.layers[i].tau_bytes == p.layers[i].tau_bytes);
    CHECK(back.layers[i].kind == p.layers[i].kind);
  }
}

TEST_CASE("profile JSON errors") {
  CHECK_THROWS_AS(ProfileFromJson(json::parse(R"({"layers": [{"r": 1}]})")),
                  ConfigError);
  CHECK_THROWS_AS(ProfileFromJson(json::parse(R"({"model": "x"})")), ConfigError);
}

TEST_CASE("scenario JSON") {
  const ScenarioFile s = ScenarioFromJson(json::parse(R"({
    "uplink_bps": 1e8, "downlink_bps": 2e8, "propagation_s": 0.01,
    "deadline_s": 0.5, "unit_s": 0.001, "source_at_client": false,
    "rounding": "paper"})"));
  CHECK(s.link.uplink_bps == 1e8);
  CHECK(s.link.downlink_bps == 2e8);
  CHECK(s.options.deadline_s == 0.5);
  CHECK_FALSE(s.options.source_at_client);
  CHECK(s.options.rounding == RoundingMode::kPaper);

  const ScenarioFile inf = ScenarioFromJson(json::parse(R"({
    "uplink_bps": "inf", "downlink_bps": "inf", "deadline_s": "inf"})"));
  CHECK(std::isinf(inf.options.deadline_s));
  CHECK(inf.options.rounding == RoundingMode::kConservative);

  CHECK_THROWS_AS(ScenarioFromJson(json::parse(R"({"uplink_bps": 1})")), ConfigError);
  CHECK_THROWS_AS(ScenarioFromJson(json::parse(
                      R"({"uplink_bps": 1, "downlink_bps": 1, "deadline_s": 1,
                          "rounding": "floor"})")),
                  ConfigError);
}

TEST_CASE("policy JSON") {
  const PlacementPolicy p = PlanDp(testing::SmallInstanceB());
  const json j = PolicyToJson(p);
  CHECK(j["planner"] == "dp");
  CHECK(j["pi"] == json::array({0, 0, 1}));
  CHECK(j["server_load"] == 2.0);
  CHECK(j["client_value"] == 10.0);
  CHECK(j["integer_latency"] == 6);
  CHECK(j["feasible"] == true);
}

TEST_CASE("custom model spec JSON") {
  const ModelSpec m = ModelSpecFromJson(json::parse(R"({
    "name": "lowrank",
    "layers": [
      {"kind": "embedding", "d": 16},
      {"kind": "custom", "d": 16, "flop": [0, 640, 0], "memory": [0, 64, 128]},
      {"kind": "classifier", "d": 16, "v": 3}
    ]})"));
  CHECK(m.name == "lowrank");
  REQUIRE(m.layers.size() == 3);
  CHECK(FlopOfLayer(m.layers[1], 10) == 6400.0);
  CHECK(MemoryOfLayer(m.layers[1], 10) == 768.0);
  CHECK(OutputBytes(m.layers[1], 10) == 640.0);
  CHECK(OutputBytes(m.layers[2], 10) == 12.0);
  CHECK_THROWS_AS(ModelSpecFromJson(json::parse(R"({"layers": []})")), ConfigError);
  CHECK_THROWS_AS(
      ModelSpecFromJson(json::parse(R"({"layers": [{"kind": "conv"}]})")),
      ConfigError);
  CHECK_THROWS_AS(LoadModel("no-such-model"), ConfigError);
}

TEST_CASE("grid JSON") {
  const SweepGrid g = GridFromJson(json::parse(R"({
    "models": ["bert-12", "gpt2-24"],
    "seq_lens": [256, 1024],
    "deadline_mode": "relative",
    "deadline_max": 1.0, "deadline_count": 4,
    "bandwidths_bps": [1e8, 1e9],
    "propagation_s": 0.01,
    "calibrate": {"model": "bert-12", "seq_len": 4096,
                  "client_s": 7.727, "server_s": 0.0979}})"));
  CHECK(g.models.size() == 2);
  CHECK(g.deadlines == std::vector<double>{1.0, 0.5, 0.25, 0.125});
  CHECK(g.deadline_mode == DeadlineMode::kRelativeToClient);
  REQUIRE(g.links.size() == 2);
  CHECK(g.links[1].uplink_bps == 1e9);
  CHECK(g.links[1].propagation_s == 0.01);
  CHECK(g.planners.size() == 4);
  CHECK(g.client.throughput ==
        Calibrate(BuildPreset("bert-12"), 4096, 7.727).throughput);
}

TEST_CASE("sweep CSV feeds the simulator scenario table") {
  SweepGrid g;
  g.models = {BuildPreset("bert-12")};
  g.seq_lens = {512, 2048};
  g.deadlines = GeometricDeadlines(1.0, 3);
  g.deadline_mode = DeadlineMode::kRelativeToClient;
  g.links = {{1e8, 1e8, 0.01}};
  g.planners = {PlannerKind::kDp, PlannerKind::kGreedy, PlannerKind::kAllServer};
  g.client = Calibrate(g.models[0], 4096, 7.727);
  g.server = Calibrate(g.models[0], 4096, 0.0979);
  const auto cells = RunSweep(g);

  std::stringstream csv;
  WriteSweepCsv(csv, cells);
  const auto rows = ReadSweepCsv(csv);
  REQUIRE(rows.size() == cells.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].server_load == cells[i].server_load);
    CHECK(rows[i].deadline_s == cells[i].deadline_s);
    CHECK(rows[i].feasible == cells[i].feasible);
  }

  const auto table = ScenariosFromSweep(rows);
  size_t expected = 0;
  for (size_t i = 0; i < cells.size(); i += 3) {
    if (cells[i].feasible && cells[i + 1].feasible) ++expected;
  }
  REQUIRE(table.size() == expected);
  REQUIRE(!table.empty());
  for (const SimScenario& s : table) {
    CHECK(s.server_demand[0] <= s.server_demand[1]);
    CHECK(s.server_demand[1] <= s.server_demand[2]);
    CHECK(s.deadline_ms > 0.0);
  }
}

TEST_CASE("malformed sweep CSV") {
  std::istringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(ReadSweepCsv(bad_header), ConfigError);
  std::istringstream short_row(std::string(kSweepCsvHeader) + "\nbert,1,2\n");
  CHECK_THROWS_AS(ReadSweepCsv(short_row), ConfigError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 7.727, 1e-300, 123456789.125}) {
    CHECK(std::stod(FormatDouble(v)) == v);
  }
  CHECK(FormatDouble(2.0) == "2");
}
