#include "structprobe/gnn/batch.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace structprobe::gnn {

EdgeIndex EdgeIndex::build(std::size_t num_nodes, std::span<const Edge> edges) {
  EdgeIndex ix;
  ix.num_nodes = num_nodes;
  std::vector<double> deg(num_nodes, 0.0);
  ix.src.reserve(2 * edges.size());
  ix.dst.reserve(2 * edges.size());
  for (const Edge& e : edges) {
    if (e.u >= num_nodes || e.v >= num_nodes) {
      throw std::invalid_argument("dangling edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                  ") for " + std::to_string(num_nodes) + " nodes");
    }
    ix.src.push_back(e.u);
    ix.dst.push_back(e.v);
    ix.src.push_back(e.v);
    ix.dst.push_back(e.u);
    deg[e.u] += 1.0;
    deg[e.v] += 1.0;
  }

  ix.mean_coef.resize(ix.src.size());
  for (std::size_t k = 0; k < ix.src.size(); ++k) ix.mean_coef[k] = 1.0 / deg[ix.dst[k]];

  ix.loop_src = ix.src;
  ix.loop_dst = ix.dst;
  for (std::size_t v = 0; v < num_nodes; ++v) {
    ix.loop_src.push_back(static_cast<Index>(v));
    ix.loop_dst.push_back(static_cast<Index>(v));
  }
  ix.gcn_coef.resize(ix.loop_src.size());
  for (std::size_t k = 0; k < ix.loop_src.size(); ++k) {
    ix.gcn_coef[k] = 1.0 / std::sqrt((deg[ix.loop_src[k]] + 1.0) * (deg[ix.loop_dst[k]] + 1.0));
  }
  return ix;
}

GraphBatch make_batch(std::span<const GraphInstance* const> graphs) {
  GraphBatch batch;
  std::size_t total = 0;
  std::size_t dim = graphs.empty() ? 0 : graphs.front()->features.cols();
  batch.offsets.push_back(0);
  for (const GraphInstance* g : graphs) {
    if (g->features.rows() != g->num_nodes || g->features.cols() != dim) {
      throw std::invalid_argument("make_batch: inconsistent feature matrix in graph " + g->id);
    }
    total += g->num_nodes;
    batch.offsets.push_back(total);
  }

  std::vector<double> x;
  x.reserve(total * dim);
  std::vector<Edge> edges;
  batch.segment.reserve(total);
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const GraphInstance& g = *graphs[gi];
    const auto base = static_cast<NodeIndex>(batch.offsets[gi]);
    for (float v : g.features.values()) x.push_back(static_cast<double>(v));
    for (std::size_t i = 0; i < g.num_nodes; ++i) batch.segment.push_back(static_cast<Index>(gi));
    for (const Edge& e : g.edges) {
      if (e.u >= g.num_nodes || e.v >= g.num_nodes) {
        throw std::invalid_argument("dangling edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                    ") in graph " + g.id);
      }
      edges.push_back({base + e.u, base + e.v});
    }
    batch.labels.push_back(g.label);
  }
  batch.features = nn::Tensor({total, dim}, std::move(x));
  batch.edges = EdgeIndex::build(total, edges);
  return batch;
}

GraphBatch make_batch(const Dataset& dataset, std::span<const std::size_t> indices) {
  std::vector<const GraphInstance*> graphs;
  graphs.reserve(indices.size());
  for (std::size_t i : indices) graphs.push_back(&dataset.graphs.at(i));
  return make_batch(graphs);
}

} // namespace structprobe::gnn
