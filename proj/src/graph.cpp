#include "structprobe/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace structprobe {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw std::invalid_argument("feature matrix: " + std::to_string(values_.size()) +
                                " values for shape " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
  }
}

std::vector<std::size_t> GraphInstance::degrees() const {
  std::vector<std::size_t> deg(num_nodes, 0);
  for (const Edge& e : edges) {
    ++deg.at(e.u);
    ++deg.at(e.v);
  }
  return deg;
}

std::vector<std::vector<NodeIndex>> GraphInstance::adjacency() const {
  std::vector<std::vector<NodeIndex>> adj(num_nodes);
  for (const Edge& e : edges) {
    adj.at(e.u).push_back(e.v);
    adj.at(e.v).push_back(e.u);
  }
  return adj;
}

void canonicalize_edges(GraphInstance& graph) {
  for (Edge& e : graph.edges) e = make_edge(e.u, e.v);
  std::sort(graph.edges.begin(), graph.edges.end());
}

void validate_graph(const GraphInstance& g, std::size_t feature_dim, ValidationReport& out) {
  auto add = [&](std::string reason) { out.push_back({g.id, std::move(reason)}); };
  const std::string where = "graph " + g.id;

  if (g.label != 0 && g.label != 1) {
    add("label " + std::to_string(g.label) + " not in {0,1} at " + where);
  }
  if (g.num_nodes == 0) add("empty graph " + g.id);
  if (g.root >= g.num_nodes) {
    add("root " + std::to_string(g.root) + " out of range at " + where);
  }

  std::set<Edge> seen;
  for (const Edge& e : g.edges) {
    if (e.u >= g.num_nodes || e.v >= g.num_nodes) {
      add("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") endpoint out of range at " +
          where);
      continue;
    }
    if (e.u == e.v) {
      add("self-loop at " + where + ", node " + std::to_string(e.u));
      continue;
    }
    if (!seen.insert(make_edge(e.u, e.v)).second) {
      add("duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") at " + where);
    }
  }

  if (g.features.rows() != g.num_nodes) {
    add("feature row count mismatch at " + where + ": " + std::to_string(g.features.rows()) +
        " rows for " + std::to_string(g.num_nodes) + " nodes");
  }
  if (g.features.cols() != feature_dim) {
    add("feature dimension mismatch at " + where + ": " + std::to_string(g.features.cols()) +
        " != " + std::to_string(feature_dim));
  }
  const auto values = g.features.values();
  if (std::any_of(values.begin(), values.end(), [](float x) { return !std::isfinite(x); })) {
    add("non-finite feature value at " + where);
  }
}

ValidationReport validate(const Dataset& dataset) {
  ValidationReport report;
  std::set<int> labels;
  for (const GraphInstance& g : dataset.graphs) {
    validate_graph(g, dataset.feature_dim, report);
    labels.insert(g.label);
  }
  if (dataset.graphs.size() > 1 && (!labels.contains(0) || !labels.contains(1))) {
    report.push_back({"", "dataset does not contain both classes"});
  }
  return report;
}

DatasetStats dataset_stats(const Dataset& dataset) {
  if (dataset.graphs.empty()) throw std::invalid_argument("empty dataset");
  DatasetStats stats;
  stats.graph_count = dataset.graphs.size();
  for (const GraphInstance& g : dataset.graphs) {
    stats.total_nodes += g.num_nodes;
    stats.total_edges += g.edges.size();
    ++stats.class_counts[g.label];
  }
  stats.mean_nodes_per_graph =
      static_cast<double>(stats.total_nodes) / static_cast<double>(stats.graph_count);
  return stats;
}

std::string_view to_string(PerturbationKind kind) {
  switch (kind) {
  case PerturbationKind::ShuffleFeatures: return "shuffle-features";
  case PerturbationKind::RewireEdges: return "rewire-edges";
  case PerturbationKind::ShuffleFeaturesWithinGraph: return "shuffle-features-within-graph";
  }
  return "unknown";
}

PerturbationKind parse_perturbation_kind(std::string_view text) {
  if (text == "shuffle-features") return PerturbationKind::ShuffleFeatures;
  if (text == "rewire-edges") return PerturbationKind::RewireEdges;
  if (text == "shuffle-features-within-graph") return PerturbationKind::ShuffleFeaturesWithinGraph;
  throw std::invalid_argument("unknown perturbation kind '" + std::string(text) + "'");
}

std::string_view to_string(DataSource source) {
  return source == DataSource::Real ? "real" : "synthetic";
}

} // namespace structprobe
