#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "structprobe/regime.hpp"

namespace structprobe {

using NodeIndex = std::uint32_t;

/// Undirected edge. Canonical form has u < v.
struct Edge {
  NodeIndex u = 0;
  NodeIndex v = 0;

  auto operator<=>(const Edge&) const = default;
};

inline Edge make_edge(NodeIndex a, NodeIndex b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Row-major N x d matrix of 32-bit feature values.
class FeatureMatrix {
public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0f) {}
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }
  std::span<const float> row(std::size_t r) const { return {values_.data() + r * cols_, cols_}; }
  std::span<float> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  float& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  float operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  bool operator==(const FeatureMatrix&) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
};

/// One labeled propagation graph rooted at `root` (0 in canonical form).
struct GraphInstance {
  std::string id;
  int label = 0;
  NodeIndex root = 0;
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;
  FeatureMatrix features;

  std::vector<std::size_t> degrees() const;
  /// Neighbor lists built from the edge list.
  std::vector<std::vector<NodeIndex>> adjacency() const;

  bool operator==(const GraphInstance&) const = default;
};

/// Orient every edge as (min, max) and sort the edge list. Duplicates are
/// kept so that validate() can still report them.
void canonicalize_edges(GraphInstance& graph);

enum class DataSource { Real, Synthetic };

enum class PerturbationKind { ShuffleFeatures, RewireEdges, ShuffleFeaturesWithinGraph };

struct PerturbationRecord {
  PerturbationKind kind = PerturbationKind::ShuffleFeatures;
  std::uint64_t seed = 0;

  bool operator==(const PerturbationRecord&) const = default;
};

struct Provenance {
  DataSource source = DataSource::Real;
  std::optional<RegimeSpec> regime;
  std::vector<PerturbationRecord> perturbations;

  bool operator==(const Provenance&) const = default;
};

struct Dataset {
  std::vector<GraphInstance> graphs;
  std::size_t feature_dim = 0;
  Provenance provenance;

  bool operator==(const Dataset&) const = default;
};

struct Violation {
  std::string graph_id; // empty for dataset-level violations
  std::string reason;
};

using ValidationReport = std::vector<Violation>;

/// Every invariant violation in the dataset; empty means valid.
ValidationReport validate(const Dataset& dataset);
/// Violations local to one graph (edge, root, and feature invariants).
void validate_graph(const GraphInstance& graph, std::size_t feature_dim, ValidationReport& out);

struct DatasetStats {
  std::size_t graph_count = 0;
  std::size_t total_nodes = 0;
  std::size_t total_edges = 0;
  double mean_nodes_per_graph = 0.0;
  std::map<int, std::size_t> class_counts;
};

/// Throws std::invalid_argument("empty dataset") on an empty dataset.
DatasetStats dataset_stats(const Dataset& dataset);

std::string_view to_string(PerturbationKind kind);
PerturbationKind parse_perturbation_kind(std::string_view text);
std::string_view to_string(DataSource source);

} // namespace structprobe
