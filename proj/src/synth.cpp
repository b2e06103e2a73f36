#include "structprobe/synth.hpp"

#include <stdexcept>
#include <string>

#include "structprobe/perturb.hpp"

namespace structprobe {

std::string_view to_string(FeatureRegime regime) {
  switch (regime) {
  case FeatureRegime::CleanFeatures: return "clean";
  case FeatureRegime::StructureOnly: return "structure-only";
  case FeatureRegime::NoisyFeatures: return "noisy";
  }
  return "unknown";
}

FeatureRegime parse_regime(std::string_view text) {
  if (text == "clean") return FeatureRegime::CleanFeatures;
  if (text == "structure-only") return FeatureRegime::StructureOnly;
  if (text == "noisy") return FeatureRegime::NoisyFeatures;
  throw std::invalid_argument("unknown regime '" + std::string(text) + "'");
}

std::string_view to_string(CorruptionScope scope) {
  return scope == CorruptionScope::Node ? "node" : "graph";
}

CorruptionScope parse_corruption_scope(std::string_view text) {
  if (text == "node") return CorruptionScope::Node;
  if (text == "graph") return CorruptionScope::Graph;
  throw std::invalid_argument("unknown corruption scope '" + std::string(text) + "'");
}

void RegimeSpec::validate() const {
  if (!(corrupt_prob >= 0.0 && corrupt_prob <= 1.0)) {
    throw std::invalid_argument("corrupt_prob must lie in [0,1]");
  }
  if (corrupt_prob > 0.0 && regime != FeatureRegime::NoisyFeatures) {
    throw std::invalid_argument("corrupt_prob > 0 requires the noisy regime");
  }
  if (randomize_features && regime != FeatureRegime::CleanFeatures) {
    throw std::invalid_argument("randomize_features requires the clean regime");
  }
  if (min_nodes < 3) throw std::invalid_argument("min_nodes must be >= 3");
  if (max_nodes < min_nodes) throw std::invalid_argument("max_nodes must be >= min_nodes");
  if (feature_dim == 0) throw std::invalid_argument("feature_dim must be positive");
  if (graphs_per_class == 0) throw std::invalid_argument("graphs_per_class must be positive");
  if (!(clique_deletion_prob >= 0.0 && clique_deletion_prob <= 1.0)) {
    throw std::invalid_argument("clique_deletion_prob must lie in [0,1]");
  }
  if (!(star_extra_edge_rate >= 0.0)) {
    throw std::invalid_argument("star_extra_edge_rate must be non-negative");
  }
}

RegimeSpec RegimeSpec::for_regime(FeatureRegime regime) {
  RegimeSpec spec;
  spec.regime = regime;
  spec.corrupt_prob = regime == FeatureRegime::NoisyFeatures ? 0.2 : 0.0;
  return spec;
}

std::vector<Edge> gen_topology(int label, std::size_t node_count, Rng& rng,
                               const TopologyParams& params) {
  if (node_count < 3) throw std::invalid_argument("graph too small");
  if (label != 0 && label != 1) throw std::invalid_argument("label must be 0 or 1");
  const auto n = static_cast<NodeIndex>(node_count);
  std::vector<Edge> edges;

  if (label == 0) {
    for (NodeIndex v = 1; v < n; ++v) edges.push_back({0, v});
    for (NodeIndex u = 1; u < n; ++u) {
      for (NodeIndex v = u + 1; v < n; ++v) {
        if (!rng.bernoulli(params.clique_deletion_prob)) edges.push_back({u, v});
      }
    }
  } else {
    for (NodeIndex v = 1; v < n; ++v) edges.push_back({0, v});
    const std::uint64_t leaves = node_count - 1;
    const std::uint64_t leaf_slots = leaves * (leaves - 1) / 2;
    auto extra = static_cast<std::uint64_t>(params.star_extra_edge_rate * static_cast<double>(node_count));
    extra = std::min(extra, leaf_slots);
    for (std::uint64_t s : sample_without_replacement(leaf_slots, extra, rng)) {
      const Edge e = slot_to_edge(s, leaves);
      edges.push_back({e.u + 1, e.v + 1});
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

FeatureMatrix gen_features(int label, std::size_t node_count, const RegimeSpec& spec, Rng& rng) {
  const std::size_t d = spec.feature_dim;
  FeatureMatrix x(node_count, d);
  // Class 0 is centered at +mean, class 1 at -mean.
  auto center = [&](int cls) { return cls == 0 ? spec.class_mean : -spec.class_mean; };

  switch (spec.regime) {
  case FeatureRegime::CleanFeatures: {
    const double mu = center(label);
    for (float& v : x.values()) v = static_cast<float>(mu + rng.normal());
    break;
  }
  case FeatureRegime::StructureOnly:
    for (float& v : x.values()) v = static_cast<float>(rng.normal());
    break;
  case FeatureRegime::NoisyFeatures: {
    const bool graph_flipped =
        spec.corruption_scope == CorruptionScope::Graph && rng.bernoulli(spec.corrupt_prob);
    for (std::size_t r = 0; r < node_count; ++r) {
      const bool flipped = spec.corruption_scope == CorruptionScope::Graph
                               ? graph_flipped
                               : rng.bernoulli(spec.corrupt_prob);
      const double mu = center(flipped ? 1 - label : label);
      for (float& v : x.row(r)) v = static_cast<float>(mu + rng.normal());
    }
    break;
  }
  }
  return x;
}

Dataset gen_dataset(const RegimeSpec& spec) {
  spec.validate();
  const TopologyParams topo{spec.clique_deletion_prob, spec.star_extra_edge_rate};
  Dataset ds;
  ds.feature_dim = spec.feature_dim;
  ds.provenance.source = DataSource::Synthetic;
  ds.provenance.regime = spec;

  const std::size_t total = 2 * spec.graphs_per_class;
  ds.graphs.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    Rng rng = Rng::stream(spec.seed, i + 1);
    GraphInstance g;
    g.id = "syn-" + std::to_string(i);
    g.label = static_cast<int>(i % 2);
    g.root = 0;
    g.num_nodes = static_cast<std::size_t>(rng.uniform_int(spec.min_nodes, spec.max_nodes));
    g.edges = gen_topology(g.label, g.num_nodes, rng, topo);
    g.features = gen_features(g.label, g.num_nodes, spec, rng);
    ds.graphs.push_back(std::move(g));
  }

  if (spec.randomize_features) {
    ds = shuffle_features(ds, derive_seed(spec.seed, kRandomizeStream));
  }
  return ds;
}

} // namespace structprobe
