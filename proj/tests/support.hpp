#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "structprobe/gnn/batch.hpp"
#include "structprobe/gnn/layers.hpp"
#include "structprobe/graph.hpp"
#include "structprobe/nn/tensor.hpp"
#include "structprobe/rng.hpp"

namespace testsupport {

using namespace structprobe;

/// Simple graph on `n` nodes with each pair present with probability p and
/// standard-normal features.
GraphInstance random_graph(std::size_t n, std::size_t dim, double p, Rng& rng, int label = 0);

Dataset random_dataset(std::size_t graphs, std::size_t min_nodes, std::size_t max_nodes, std::size_t dim,
                       std::uint64_t seed);

nn::Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng, bool requires_grad = false);

struct GradcheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0; // entries where the loss is not smooth at step h
};

/// Central differences with step h on every entry of every tensor in
/// `wrt`, compared against one reverse-mode pass. rel = |a - n| / max(|a|, |n|, 1e-4).
/// An entry is skipped when the h and h/2 estimates disagree by more than
/// 1e-3 relative, which only happens when a kink lies within h.
GradcheckResult gradcheck(const std::function<nn::Tensor()>& loss_fn, std::vector<nn::Tensor> wrt,
                          double h = 1e-5);

// Dense brute-force layer implementations over an adjacency matrix.
using Dense = std::vector<std::vector<double>>;

Dense to_dense(const nn::Tensor& t);
Dense adjacency_matrix(const GraphInstance& g);
Dense dense_gcn(const Dense& x, const Dense& adj, const gnn::GcnLayer& layer);
Dense dense_gat(const Dense& x, const Dense& adj, const gnn::GatLayer& layer);
Dense dense_sage(const Dense& x, const Dense& adj, const gnn::SageLayer& layer);

double max_abs_diff(const Dense& a, const nn::Tensor& b);

} // namespace testsupport
