#include "structprobe/gnn/models.hpp"

#include <stdexcept>

#include "structprobe/nn/ops.hpp"

namespace structprobe::gnn {

std::string_view to_string(Architecture arch) {
  switch (arch) {
  case Architecture::GCN: return "gcn";
  case Architecture::GAT: return "gat";
  case Architecture::SAGE: return "sage";
  case Architecture::GCNFN: return "gcnfn";
  case Architecture::MLP: return "mlp";
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view text) {
  if (text == "gcn") return Architecture::GCN;
  if (text == "gat") return Architecture::GAT;
  if (text == "sage" || text == "graphsage") return Architecture::SAGE;
  if (text == "gcnfn") return Architecture::GCNFN;
  if (text == "mlp") return Architecture::MLP;
  throw std::invalid_argument("unknown model '" + std::string(text) + "'");
}

void ModelConfig::validate() const {
  if (input_dim == 0) throw std::invalid_argument("input_dim must be positive");
  if (hidden_dim == 0) throw std::invalid_argument("hidden_dim must be positive");
  if (num_mp_layers == 0) throw std::invalid_argument("num_mp_layers must be positive");
  if (attention_heads == 0) throw std::invalid_argument("attention_heads must be positive");
  if (num_classes < 2) throw std::invalid_argument("num_classes must be at least 2");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw std::invalid_argument("dropout_rate must lie in [0,1)");
}

std::vector<nn::Tensor> GraphModel::parameters() const {
  std::vector<nn::Tensor> out;
  out.reserve(params_.size());
  for (const auto& [name, t] : params_) out.push_back(t);
  return out;
}

void GraphModel::zero_grad() {
  for (auto& [name, t] : params_) t.zero_grad();
}

nn::Tensor GraphModel::register_param(std::string name, nn::Tensor t) {
  params_.emplace_back(std::move(name), t);
  return t;
}

Linear GraphModel::register_linear(const std::string& name, Linear l) {
  register_param(name + ".weight", l.weight);
  register_param(name + ".bias", l.bias);
  return l;
}

nn::Tensor GraphModel::maybe_dropout(const nn::Tensor& x, const ForwardOptions& options) const {
  if (!options.training || config_.dropout_rate == 0.0) return x;
  if (!options.rng) throw std::invalid_argument("dropout during training requires an rng");
  return nn::dropout(x, config_.dropout_rate, *options.rng);
}

namespace {

class GcnModel final : public GraphModel {
public:
  GcnModel(const ModelConfig& c, Rng& rng) : GraphModel(c) {
    std::size_t in = c.input_dim;
    for (std::size_t i = 0; i < c.num_mp_layers; ++i) {
      GcnLayer layer = GcnLayer::init(in, c.hidden_dim, rng);
      const std::string name = "conv" + std::to_string(i);
      register_linear(name, layer.lin);
      layers_.push_back(layer);
      in = c.hidden_dim;
    }
    classifier_ = register_linear("classifier", Linear::init(c.hidden_dim, c.num_classes, rng));
  }

  nn::Tensor forward(const GraphBatch& batch, const ForwardOptions& options) const override {
    nn::Tensor h = batch.features;
    for (const GcnLayer& layer : layers_) {
      h = maybe_dropout(nn::relu(gcn_layer(h, batch.edges, layer)), options);
    }
    return classifier_(nn::scatter_mean(h, batch.segment, batch.num_graphs()));
  }

private:
  std::vector<GcnLayer> layers_;
  Linear classifier_;
};

class SageModel final : public GraphModel {
public:
  SageModel(const ModelConfig& c, Rng& rng) : GraphModel(c) {
    std::size_t in = c.input_dim;
    for (std::size_t i = 0; i < c.num_mp_layers; ++i) {
      SageLayer layer = SageLayer::init(in, c.hidden_dim, rng);
      const std::string name = "conv" + std::to_string(i);
      register_param(name + ".w_self", layer.w_self);
      register_param(name + ".w_nbr", layer.w_nbr);
      register_param(name + ".bias", layer.bias);
      layers_.push_back(layer);
      in = c.hidden_dim;
    }
    classifier_ = register_linear("classifier", Linear::init(c.hidden_dim, c.num_classes, rng));
  }

  nn::Tensor forward(const GraphBatch& batch, const ForwardOptions& options) const override {
    nn::Tensor h = batch.features;
    for (const SageLayer& layer : layers_) {
      h = maybe_dropout(nn::relu(sage_layer(h, batch.edges, layer)), options);
    }
    return classifier_(nn::scatter_mean(h, batch.segment, batch.num_graphs()));
  }

private:
  std::vector<SageLayer> layers_;
  Linear classifier_;
};

/// Stack of GAT layers: hidden layers concatenate heads, the last averages
/// them. ELU between layers.
class GatEncoder {
public:
  GatEncoder() = default;
  GatEncoder(const ModelConfig& c, Rng& rng) {
    std::size_t in = c.input_dim;
    for (std::size_t i = 0; i < c.num_mp_layers; ++i) {
      const bool last = i + 1 == c.num_mp_layers;
      GatLayer layer = GatLayer::init(in, c.hidden_dim, c.attention_heads, !last, c.leaky_slope, rng);
      const std::string name = "conv" + std::to_string(i);
      named_.emplace_back(name + ".weight", layer.weight);
      named_.emplace_back(name + ".att_src", layer.att_src);
      named_.emplace_back(name + ".att_dst", layer.att_dst);
      named_.emplace_back(name + ".bias", layer.bias);
      in = layer.out_width();
      layers_.push_back(layer);
    }
  }

  template <typename Drop>
  nn::Tensor operator()(const GraphBatch& batch, Drop drop) const {
    nn::Tensor h = batch.features;
    for (const GatLayer& layer : layers_) h = drop(nn::elu(gat_layer(h, batch.edges, layer)));
    return h;
  }

  const std::vector<NamedTensor>& named() const { return named_; }

private:
  std::vector<GatLayer> layers_;
  std::vector<NamedTensor> named_;
};

class GatModel final : public GraphModel {
public:
  GatModel(const ModelConfig& c, Rng& rng) : GraphModel(c), encoder_(c, rng) {
    for (const auto& [name, t] : encoder_.named()) register_param(name, t);
    classifier_ = register_linear("classifier", Linear::init(c.hidden_dim, c.num_classes, rng));
  }

  nn::Tensor forward(const GraphBatch& batch, const ForwardOptions& options) const override {
    const nn::Tensor h = encoder_(batch, [&](const nn::Tensor& t) { return maybe_dropout(t, options); });
    return classifier_(nn::scatter_mean(h, batch.segment, batch.num_graphs()));
  }

private:
  GatEncoder encoder_;
  Linear classifier_;
};

/// GAT encoder, mean-pooled, concatenated with the graph's mean raw feature
/// vector, then two dense layers.
class GcnfnModel final : public GraphModel {
public:
  GcnfnModel(const ModelConfig& c, Rng& rng) : GraphModel(c), encoder_(c, rng) {
    for (const auto& [name, t] : encoder_.named()) register_param(name, t);
    fuse_ = register_linear("fuse", Linear::init(c.hidden_dim + c.input_dim, c.hidden_dim, rng));
    classifier_ = register_linear("classifier", Linear::init(c.hidden_dim, c.num_classes, rng));
  }

  nn::Tensor forward(const GraphBatch& batch, const ForwardOptions& options) const override {
    const nn::Tensor h = encoder_(batch, [&](const nn::Tensor& t) { return maybe_dropout(t, options); });
    const std::size_t g = batch.num_graphs();
    const nn::Tensor fused = nn::concat_cols(nn::scatter_mean(h, batch.segment, g),
                                             nn::scatter_mean(batch.features, batch.segment, g));
    return classifier_(maybe_dropout(nn::relu(fuse_(fused)), options));
  }

private:
  GatEncoder encoder_;
  Linear fuse_;
  Linear classifier_;
};

class MlpModel final : public GraphModel {
public:
  MlpModel(const ModelConfig& c, Rng& rng) : GraphModel(c) {
    hidden_ = register_linear("hidden", Linear::init(c.input_dim, c.hidden_dim, rng));
    classifier_ = register_linear("classifier", Linear::init(c.hidden_dim, c.num_classes, rng));
  }

  nn::Tensor forward(const GraphBatch& batch, const ForwardOptions& options) const override {
    const nn::Tensor pooled = nn::scatter_mean(batch.features, batch.segment, batch.num_graphs());
    return classifier_(maybe_dropout(nn::relu(hidden_(pooled)), options));
  }

private:
  Linear hidden_;
  Linear classifier_;
};

} // namespace

std::unique_ptr<GraphModel> make_model(const ModelConfig& config, std::uint64_t init_seed) {
  config.validate();
  Rng rng(init_seed);
  switch (config.arch) {
  case Architecture::GCN: return std::make_unique<GcnModel>(config, rng);
  case Architecture::GAT: return std::make_unique<GatModel>(config, rng);
  case Architecture::SAGE: return std::make_unique<SageModel>(config, rng);
  case Architecture::GCNFN: return std::make_unique<GcnfnModel>(config, rng);
  case Architecture::MLP: return std::make_unique<MlpModel>(config, rng);
  }
  throw std::invalid_argument("unknown architecture");
}

} // namespace structprobe::gnn
