#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace splitplan {

// Raised for unknown presets, invalid dimensions and similar bad input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a model has no cost to calibrate against.
class DegenerateModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LayerKind {
  kEmbedding,
  kAttention,
  kFeedForward,
  kLayerNorm,
  kClassifier,
  kCustom,
};

std::string_view LayerKindName(LayerKind kind);
LayerKind ParseLayerKind(std::string_view name);

// a*s^2 + b*s + c, used for user-supplied custom layer costs.
struct SeqPolynomial {
  double quadratic = 0.0;
  double linear = 0.0;
  double constant = 0.0;

  double At(double seq_len) const {
    return (quadratic * seq_len + linear) * seq_len + constant;
  }
};

// One splittable entry of a model. Attention internals are atomic so every
// boundary tensor stays seq_len x hidden.
struct LayerEntry {
  LayerKind kind = LayerKind::kCustom;
  int64_t hidden = 1;     // d
  int64_t heads = 1;      // h
  int64_t ffn = 1;        // d_ff
  int64_t classes = 1;    // vocabulary or class count V
  // The layer sees ceil(seq_len / seq_divisor) tokens; staged vision models
  // downsample between stages.
  int64_t seq_divisor = 1;

  // Only read for kCustom.
  SeqPolynomial custom_flop;
  SeqPolynomial custom_memory;
  SeqPolynomial custom_output;
};

struct ModelSpec {
  std::string name;
  std::vector<LayerEntry> layers;
  // Elements per token in the raw model input (token ids for language
  // models, flattened pixels for vision models). Sizes the first boundary.
  int64_t input_elems_per_token = 1;
};

struct DeviceSpec {
  std::string name;
  double throughput = 0.0;  // FLOP per second
};

enum class CostMetric { kFlop, kMemory };

std::string_view CostMetricName(CostMetric metric);
CostMetric ParseCostMetric(std::string_view name);

struct LayerProfile {
  int64_t index = 0;
  LayerKind kind = LayerKind::kCustom;
  double resource = 0.0;     // r_l in the chosen metric
  double client_time_s = 0.0;
  double server_time_s = 0.0;
  double tau_bytes = 0.0;    // size of the tensor entering this layer
};

struct ModelProfile {
  std::string model;
  int64_t seq_len = 0;
  CostMetric metric = CostMetric::kFlop;
  std::vector<LayerProfile> layers;
};

inline constexpr int64_t kBytesPerElement = 4;

// Names accepted by BuildPreset.
std::vector<std::string> PresetNames();

// Builds one of the preset architectures. Throws ConfigError for an unknown
// name.
ModelSpec BuildPreset(std::string_view name);

// Validates dimensions; throws ConfigError on the first violation.
void ValidateModel(const ModelSpec& spec);

// Effective token count seen by a layer.
int64_t EffectiveSeqLen(const LayerEntry& layer, int64_t seq_len);

// FLOP for one forward pass of the layer over seq_len input tokens.
//   attention:    8*s*d^2 + 4*s^2*d + 5*s^2*h
//   feed_forward: 4*s*d*d_ff
//   layer_norm:   5*s*d
//   embedding:    2*s*d
//   classifier:   2*s*d*V
double FlopOfLayer(const LayerEntry& layer, int64_t seq_len);

// Activation bytes: s*d*4, plus s^2*h*4 score storage for attention.
double MemoryOfLayer(const LayerEntry& layer, int64_t seq_len);

// Bytes leaving the layer: s*d*4, or V*4 for the classifier.
double OutputBytes(const LayerEntry& layer, int64_t seq_len);

// Bytes of the raw model input (the tensor entering the first layer).
double InputBytes(const ModelSpec& spec, int64_t seq_len);

double TotalFlop(const ModelSpec& spec, int64_t seq_len);

std::vector<LayerProfile> Profile(const ModelSpec& spec, int64_t seq_len,
                                  const DeviceSpec& client,
                                  const DeviceSpec& server, CostMetric metric);

// Returns a device whose throughput runs the whole model in target_total_s.
DeviceSpec Calibrate(const ModelSpec& spec, int64_t seq_len,
                     double target_total_s, std::string name = "calibrated");

}  // namespace splitplan
