#include "splitplan/cost_model.h"

#include <array>
#include <cmath>
#include <string>

namespace splitplan {

namespace {

constexpr std::array<std::pair<LayerKind, std::string_view>, 6> kKindNames = {{
    {LayerKind::kEmbedding, "embedding"},
    {LayerKind::kAttention, "attention"},
    {LayerKind::kFeedForward, "feed_forward"},
    {LayerKind::kLayerNorm, "layer_norm"},
    {LayerKind::kClassifier, "classifier"},
    {LayerKind::kCustom, "custom"},
}};

LayerEntry Make(LayerKind kind, int64_t d, int64_t h = 1, int64_t ffn = 1,
                int64_t classes = 1, int64_t seq_divisor = 1) {
  LayerEntry e;
  e.kind = kind;
  e.hidden = d;
  e.heads = h;
  e.ffn = ffn;
  e.classes = classes;
  e.seq_divisor = seq_divisor;
  return e;
}

void AppendEncoderBlock(std::vector<LayerEntry>& out, int64_t d, int64_t h,
                        int64_t ffn, int64_t div = 1) {
  out.push_back(Make(LayerKind::kAttention, d, h, ffn, 1, div));
  out.push_back(Make(LayerKind::kLayerNorm, d, h, ffn, 1, div));
  out.push_back(Make(LayerKind::kFeedForward, d, h, ffn, 1, div));
  out.push_back(Make(LayerKind::kLayerNorm, d, h, ffn, 1, div));
}

// Pre-norm block as in GPT-2 and the staged vision transformer.
void AppendPreNormBlock(std::vector<LayerEntry>& out, int64_t d, int64_t h,
                        int64_t ffn, int64_t div = 1) {
  out.push_back(Make(LayerKind::kLayerNorm, d, h, ffn, 1, div));
  out.push_back(Make(LayerKind::kAttention, d, h, ffn, 1, div));
  out.push_back(Make(LayerKind::kLayerNorm, d, h, ffn, 1, div));
  out.push_back(Make(LayerKind::kFeedForward, d, h, ffn, 1, div));
}

ModelSpec Vanilla6x6() {
  constexpr int64_t d = 512, h = 8, ffn = 2048;
  ModelSpec m{.name = "vanilla-6x6", .layers = {}, .input_elems_per_token = 1};
  m.layers.push_back(Make(LayerKind::kEmbedding, d));
  for (int i = 0; i < 6; ++i) AppendEncoderBlock(m.layers, d, h, ffn);
  for (int i = 0; i < 6; ++i) {
    // self-attention, cross-attention (equal source/target lengths), ffn
    m.layers.push_back(Make(LayerKind::kAttention, d, h, ffn));
    m.layers.push_back(Make(LayerKind::kLayerNorm, d, h, ffn));
    m.layers.push_back(Make(LayerKind::kAttention, d, h, ffn));
    m.layers.push_back(Make(LayerKind::kLayerNorm, d, h, ffn));
    m.layers.push_back(Make(LayerKind::kFeedForward, d, h, ffn));
    m.layers.push_back(Make(LayerKind::kLayerNorm, d, h, ffn));
  }
  m.layers.push_back(Make(LayerKind::kClassifier, d, h, ffn, 2));
  return m;
}

ModelSpec Bert12() {
  constexpr int64_t d = 768, h = 12, ffn = 3072;
  ModelSpec m{.name = "bert-12", .layers = {}, .input_elems_per_token = 1};
  m.layers.push_back(Make(LayerKind::kEmbedding, d));
  m.layers.push_back(Make(LayerKind::kLayerNorm, d));
  for (int i = 0; i < 12; ++i) AppendEncoderBlock(m.layers, d, h, ffn);
  m.layers.push_back(Make(LayerKind::kClassifier, d, h, ffn, 2));
  return m;
}

ModelSpec Gpt2x24() {
  constexpr int64_t d = 1024, h = 16, ffn = 4096;
  ModelSpec m{.name = "gpt2-24", .layers = {}, .input_elems_per_token = 1};
  m.layers.push_back(Make(LayerKind::kEmbedding, d));
  for (int i = 0; i < 24; ++i) AppendPreNormBlock(m.layers, d, h, ffn);
  m.layers.push_back(Make(LayerKind::kLayerNorm, d));
  m.layers.push_back(Make(LayerKind::kClassifier, d, h, ffn, 2));
  return m;
}

// Four stages, widths 64..512, tokens downsampled 4x per stage. seq_len is
// the stage-one token count (4x4 RGB patches).
ModelSpec CmtLike() {
  constexpr std::array<int64_t, 4> widths = {64, 128, 256, 512};
  constexpr std::array<int64_t, 4> heads = {1, 2, 4, 8};
  constexpr std::array<int, 4> depths = {2, 2, 10, 2};
  ModelSpec m{.name = "cmt-like", .layers = {}, .input_elems_per_token = 48};
  int64_t div = 1;
  for (size_t stage = 0; stage < widths.size(); ++stage) {
    const int64_t d = widths[stage];
    m.layers.push_back(Make(LayerKind::kEmbedding, d, heads[stage], 4 * d, 1, div));
    for (int i = 0; i < depths[stage]; ++i) {
      AppendPreNormBlock(m.layers, d, heads[stage], 4 * d, div);
    }
    if (stage + 1 < widths.size()) div *= 4;
  }
  m.layers.push_back(Make(LayerKind::kLayerNorm, widths.back(), 8, 2048, 1, div));
  m.layers.push_back(
      Make(LayerKind::kClassifier, widths.back(), 8, 2048, 1000, div));
  return m;
}

double Sq(double x) { return x * x; }

}  // namespace

std::string_view LayerKindName(LayerKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "custom";
}

LayerKind ParseLayerKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown layer kind '" + std::string(name) + "'");
}

std::string_view CostMetricName(CostMetric metric) {
  return metric == CostMetric::kFlop ? "flop" : "memory";
}

CostMetric ParseCostMetric(std::string_view name) {
  if (name == "flop") return CostMetric::kFlop;
  if (name == "memory") return CostMetric::kMemory;
  throw ConfigError("unknown metric '" + std::string(name) +
                    "' (expected flop|memory)");
}

std::vector<std::string> PresetNames() {
  return {"vanilla-6x6", "bert-12", "gpt2-24", "cmt-like"};
}

ModelSpec BuildPreset(std::string_view name) {
  if (name == "vanilla-6x6") return Vanilla6x6();
  if (name == "bert-12") return Bert12();
  if (name == "gpt2-24") return Gpt2x24();
  if (name == "cmt-like") return CmtLike();
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

void ValidateModel(const ModelSpec& spec) {
  if (spec.layers.empty()) {
    throw ConfigError("model '" + spec.name + "' has no layers");
  }
  if (spec.input_elems_per_token <= 0) {
    throw ConfigError("input_elems_per_token must be positive");
  }
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerEntry& l = spec.layers[i];
    if (l.hidden <= 0 || l.heads <= 0 || l.ffn <= 0 || l.classes <= 0 ||
        l.seq_divisor <= 0) {
      throw ConfigError("layer " + std::to_string(i) + " of '" + spec.name +
                        "' has a non-positive dimension");
    }
  }
}

int64_t EffectiveSeqLen(const LayerEntry& layer, int64_t seq_len) {
  return (seq_len + layer.seq_divisor - 1) / layer.seq_divisor;
}

double FlopOfLayer(const LayerEntry& layer, int64_t seq_len) {
  const double s = static_cast<double>(EffectiveSeqLen(layer, seq_len));
  const double d = static_cast<double>(layer.hidden);
  switch (layer.kind) {
    case LayerKind::kAttention:
      return 8.0 * s * d * d + 4.0 * s * s * d +
             5.0 * s * s * static_cast<double>(layer.heads);
    case LayerKind::kFeedForward:
      return 4.0 * s * d * static_cast<double>(layer.ffn);
    case LayerKind::kLayerNorm:
      return 5.0 * s * d;
    case LayerKind::kEmbedding:
      return 2.0 * s * d;
    case LayerKind::kClassifier:
      return 2.0 * s * d * static_cast<double>(layer.classes);
    case LayerKind::kCustom:
      return layer.custom_flop.At(s);
  }
  return 0.0;
}

double MemoryOfLayer(const LayerEntry& layer, int64_t seq_len) {
  const double s = static_cast<double>(EffectiveSeqLen(layer, seq_len));
  const double d = static_cast<double>(layer.hidden);
  if (layer.kind == LayerKind::kCustom) return layer.custom_memory.At(s);
  double bytes = s * d * kBytesPerElement;
  if (layer.kind == LayerKind::kAttention) {
    bytes += Sq(s) * static_cast<double>(layer.heads) * kBytesPerElement;
  }
  return bytes;
}

double OutputBytes(const LayerEntry& layer, int64_t seq_len) {
  const double s = static_cast<double>(EffectiveSeqLen(layer, seq_len));
  switch (layer.kind) {
    case LayerKind::kClassifier:
      return static_cast<double>(layer.classes) * kBytesPerElement;
    case LayerKind::kCustom:
      return layer.custom_output.At(s);
    default:
      return s * static_cast<double>(layer.hidden) * kBytesPerElement;
  }
}

double InputBytes(const ModelSpec& spec, int64_t seq_len) {
  return static_cast<double>(seq_len) *
         static_cast<double>(spec.input_elems_per_token) * kBytesPerElement;
}

double TotalFlop(const ModelSpec& spec, int64_t seq_len) {
  double total = 0.0;
  for (const LayerEntry& l : spec.layers) total += FlopOfLayer(l, seq_len);
  return total;
}

std::vector<LayerProfile> Profile(const ModelSpec& spec, int64_t seq_len,
                                  const DeviceSpec& client,
                                  const DeviceSpec& server, CostMetric metric) {
  ValidateModel(spec);
  if (seq_len < 1) throw ConfigError("seq_len must be >= 1");
  if (!(client.throughput > 0.0) || !(server.throughput > 0.0)) {
    throw ConfigError("device throughput must be positive");
  }
  std::vector<LayerProfile> out;
  out.reserve(spec.layers.size());
  double tau = InputBytes(spec, seq_len);
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerEntry& layer = spec.layers[i];
    const double flop = FlopOfLayer(layer, seq_len);
    LayerProfile p;
    p.index = static_cast<int64_t>(i);
    p.kind = layer.kind;
    p.resource =
        metric == CostMetric::kFlop ? flop : MemoryOfLayer(layer, seq_len);
    p.client_time_s = flop / client.throughput;
    p.server_time_s = flop / server.throughput;
    p.tau_bytes = tau;
    out.push_back(p);
    tau = OutputBytes(layer, seq_len);
  }
  return out;
}

DeviceSpec Calibrate(const ModelSpec& spec, int64_t seq_len,
                     double target_total_s, std::string name) {
  ValidateModel(spec);
  if (!(target_total_s > 0.0) || !std::isfinite(target_total_s)) {
    throw ConfigError("calibration target must be a positive time");
  }
  if (seq_len < 1) throw ConfigError("seq_len must be >= 1");
  const double flop = TotalFlop(spec, seq_len);
  if (!(flop > 0.0)) {
    throw DegenerateModelError("model '" + spec.name +
                               "' has zero total FLOP; cannot calibrate");
  }
  return DeviceSpec{std::move(name), flop / target_total_s};
}

}  // namespace splitplan
