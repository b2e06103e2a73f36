#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace structprobe {

enum class FeatureRegime { CleanFeatures, StructureOnly, NoisyFeatures };

/// Granularity at which NoisyFeatures draws from the opposite class.
enum class CorruptionScope { Node, Graph };

std::string_view to_string(FeatureRegime regime);
FeatureRegime parse_regime(std::string_view text);
std::string_view to_string(CorruptionScope scope);
CorruptionScope parse_corruption_scope(std::string_view text);

/// Full description of a synthetic dataset. Everything the generator does is
/// a function of this record.
struct RegimeSpec {
  FeatureRegime regime = FeatureRegime::CleanFeatures;
  double corrupt_prob = 0.0;
  CorruptionScope corruption_scope = CorruptionScope::Graph;
  bool randomize_features = false;
  std::size_t feature_dim = 32;
  std::size_t graphs_per_class = 250;
  std::size_t min_nodes = 10;
  std::size_t max_nodes = 40;
  std::uint64_t seed = 0;

  // Topology and feature-distribution knobs.
  double clique_deletion_prob = 0.1;
  double star_extra_edge_rate = 0.05;
  double class_mean = 1.0;

  /// Throws std::invalid_argument naming the first broken invariant.
  void validate() const;

  /// Spec with the regime's canonical corruption probability (0.2 for
  /// NoisyFeatures, 0 otherwise).
  static RegimeSpec for_regime(FeatureRegime regime);

  bool operator==(const RegimeSpec&) const = default;
};

} // namespace structprobe
