#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "structprobe/gnn/batch.hpp"
#include "structprobe/gnn/layers.hpp"
#include "structprobe/rng.hpp"

namespace structprobe::gnn {

enum class Architecture { GCN, GAT, SAGE, GCNFN, MLP };

std::string_view to_string(Architecture arch);
Architecture parse_architecture(std::string_view text);

struct ModelConfig {
  Architecture arch = Architecture::GCN;
  std::size_t input_dim = 32;
  std::size_t hidden_dim = 64;
  std::size_t num_mp_layers = 2;
  std::size_t attention_heads = 1;
  double leaky_slope = 0.2;
  double dropout_rate = 0.0;
  std::size_t num_classes = 2;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

using NamedTensor = std::pair<std::string, nn::Tensor>;

struct ForwardOptions {
  bool training = false;
  Rng* rng = nullptr; // required when training with dropout
};

/// Graph-batch -> logits (G x num_classes). All GNNs read out with global
/// mean pooling; the MLP sees only the per-graph mean of raw features.
class GraphModel {
public:
  explicit GraphModel(ModelConfig config) : config_(config) {}
  virtual ~GraphModel() = default;

  virtual nn::Tensor forward(const GraphBatch& batch, const ForwardOptions& options = {}) const = 0;

  const ModelConfig& config() const { return config_; }
  /// Parameters in a fixed order; the tensors alias the model's storage.
  const std::vector<NamedTensor>& named_parameters() const { return params_; }
  std::vector<nn::Tensor> parameters() const;
  void zero_grad();

protected:
  nn::Tensor register_param(std::string name, nn::Tensor t);
  Linear register_linear(const std::string& name, Linear l);
  nn::Tensor maybe_dropout(const nn::Tensor& x, const ForwardOptions& options) const;

  ModelConfig config_;
  std::vector<NamedTensor> params_;
};

/// Fresh model with Uniform(+-1/sqrt(fan_in)) parameters drawn from `init_seed`.
std::unique_ptr<GraphModel> make_model(const ModelConfig& config, std::uint64_t init_seed);

} // namespace structprobe::gnn
