#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "structprobe/graph.hpp"
#include "structprobe/nn/ops.hpp"

namespace structprobe::gnn {

using nn::Index;

/// Directed message lists derived from an undirected edge list.
struct EdgeIndex {
  std::size_t num_nodes = 0;
  // Both directions of every undirected edge; no self-loops.
  std::vector<Index> src;
  std::vector<Index> dst;
  // Same plus one self-loop per node, with symmetric GCN coefficients
  // 1 / sqrt(deg~(src) * deg~(dst)), deg~ counting the self-loop.
  std::vector<Index> loop_src;
  std::vector<Index> loop_dst;
  std::vector<double> gcn_coef;
  // 1 / deg(dst) for each entry of (src, dst): neighborhood mean weights.
  std::vector<double> mean_coef;

  /// Throws std::invalid_argument("dangling edge ...") for an endpoint
  /// outside [0, num_nodes).
  static EdgeIndex build(std::size_t num_nodes, std::span<const Edge> edges);
};

/// Disjoint union of graphs. Node rows of graph g occupy
/// [offsets[g], offsets[g+1]); segment[i] names the graph of node i.
struct GraphBatch {
  nn::Tensor features;
  EdgeIndex edges;
  std::vector<Index> segment;
  std::vector<std::size_t> offsets;
  std::vector<int> labels;

  std::size_t num_graphs() const { return labels.size(); }
  std::size_t num_nodes() const { return segment.size(); }
};

GraphBatch make_batch(std::span<const GraphInstance* const> graphs);
GraphBatch make_batch(const Dataset& dataset, std::span<const std::size_t> indices);

} // namespace structprobe::gnn
