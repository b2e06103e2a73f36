#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "structprobe/graph.hpp"
#include "structprobe/stats.hpp"

namespace structprobe {

/// deg(root) / (N - 1). Throws std::domain_error("undefined for singleton graph") when N = 1.
double normalized_root_degree(const GraphInstance& g);

/// Share of non-root nodes at BFS distance 1 from the root. Unreachable
/// nodes stay in the denominator. 0 for a singleton.
double one_hop_fraction(const GraphInstance& g);

/// Largest finite BFS depth from the root.
std::size_t max_hop_depth(const GraphInstance& g);

/// Freeman degree centralization sum(max_deg - deg) / ((N-1)(N-2)).
/// Throws std::domain_error("undefined ...") when N < 3.
double degree_centralization(const GraphInstance& g);

/// Per-graph mean of the feature rows, as doubles (graphs x d, row-major).
std::vector<double> pooled_features(const Dataset& dataset);

struct ProbeConfig {
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::size_t steps = 300; // full-batch Adam steps per fold
  double lr = 0.05;
  double weight_decay = 0.0;
};

/// Logistic regression on mean-pooled features, evaluated on the stratified
/// folds of the training harness. Returns mean validation accuracy.
/// Throws std::invalid_argument on fewer than 2 graphs or a single class.
double linear_separability_probe(const Dataset& dataset, const ProbeConfig& config = {});

/// Projection of the mean-pooled features onto their two leading principal
/// axes. Each axis is signed so that its largest-magnitude loading is positive.
std::vector<std::array<double, 2>> pca_2d(const Dataset& dataset);

struct GraphMetrics {
  std::string id;
  int label = 0;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::optional<double> normalized_root_degree; // undefined for N = 1
  double one_hop_fraction = 0.0;
  std::optional<double> degree_centralization; // undefined for N < 3
  std::size_t max_hop_depth = 0;
};

/// Summaries of one population (whole dataset or one class). A metric is
/// absent when no graph defines it.
struct MetricSummaries {
  std::size_t graph_count = 0;
  std::map<std::string, Summary> metrics;
};

struct StructuralReport {
  std::vector<GraphMetrics> per_graph;
  MetricSummaries overall;
  std::map<int, MetricSummaries> per_class;
  Histogram graph_size_histogram;
  std::optional<Histogram> root_degree_histogram;
  std::optional<double> linear_probe_accuracy; // absent when the probe is not applicable
  std::string probe_skip_reason;
  std::vector<std::array<double, 2>> pca;
};

GraphMetrics graph_metrics(const GraphInstance& g);

/// Every per-graph metric, per-class and overall summaries (equal weight per
/// graph), histograms of graph size and normalized root degree, and the
/// separability probe. Deterministic in the dataset and probe seed.
StructuralReport audit(const Dataset& dataset, const ProbeConfig& probe = {});

} // namespace structprobe
