#include "structprobe/gnn/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "structprobe/nn/ops.hpp"

namespace structprobe::gnn {

nn::Tensor uniform_param(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> v(rows * cols);
  for (double& x : v) x = rng.uniform(-bound, bound);
  return nn::Tensor({rows, cols}, std::move(v), true);
}

Linear Linear::init(std::size_t in, std::size_t out, Rng& rng) {
  Linear l;
  l.weight = uniform_param(in, out, in, rng);
  l.bias = uniform_param(1, out, in, rng);
  return l;
}

nn::Tensor Linear::operator()(const nn::Tensor& x) const {
  return nn::add_bias_row(nn::matmul(x, weight), bias);
}

GcnLayer GcnLayer::init(std::size_t in, std::size_t out, Rng& rng) { return {Linear::init(in, out, rng)}; }

namespace {
void check_rows(const nn::Tensor& x, const EdgeIndex& edges) {
  if (x.rows() != edges.num_nodes) {
    throw std::invalid_argument("layer input has " + std::to_string(x.rows()) + " rows for " +
                                std::to_string(edges.num_nodes) + " nodes");
  }
}
} // namespace

nn::Tensor gcn_layer(const nn::Tensor& x, const EdgeIndex& edges, const GcnLayer& layer) {
  check_rows(x, edges);
  const nn::Tensor h = nn::matmul(x, layer.lin.weight);
  const nn::Tensor agg = nn::propagate(h, edges.loop_src, edges.loop_dst, edges.gcn_coef, edges.num_nodes);
  return nn::add_bias_row(agg, layer.lin.bias);
}

GatLayer GatLayer::init(std::size_t in, std::size_t out, std::size_t heads, bool concat, double slope,
                        Rng& rng) {
  if (heads == 0) throw std::invalid_argument("GAT layer needs at least one head");
  GatLayer l;
  l.heads = heads;
  l.concat = concat;
  l.slope = slope;
  l.weight = uniform_param(in, heads * out, in, rng);
  l.att_src = uniform_param(heads, out, out, rng);
  l.att_dst = uniform_param(heads, out, out, rng);
  l.bias = uniform_param(1, concat ? heads * out : out, in, rng);
  return l;
}

std::size_t GatLayer::out_width() const { return concat ? weight.cols() : weight.cols() / heads; }

nn::Tensor gat_layer(const nn::Tensor& x, const EdgeIndex& edges, const GatLayer& layer) {
  check_rows(x, edges);
  const nn::Tensor h = nn::matmul(x, layer.weight);
  const nn::Tensor s_src = nn::head_scores(h, layer.att_src);
  const nn::Tensor s_dst = nn::head_scores(h, layer.att_dst);
  const nn::Tensor scores = nn::leaky_relu(
      nn::add(nn::gather_rows(s_dst, edges.loop_dst), nn::gather_rows(s_src, edges.loop_src)), layer.slope);
  const nn::Tensor alpha = nn::segment_softmax(scores, edges.loop_dst, edges.num_nodes);
  nn::Tensor out = nn::attention_aggregate(h, alpha, edges.loop_src, edges.loop_dst, edges.num_nodes);
  if (!layer.concat) out = nn::head_mean(out, layer.heads);
  return nn::add_bias_row(out, layer.bias);
}

SageLayer SageLayer::init(std::size_t in, std::size_t out, Rng& rng) {
  SageLayer l;
  l.w_self = uniform_param(in, out, in, rng);
  l.w_nbr = uniform_param(in, out, in, rng);
  l.bias = uniform_param(1, out, in, rng);
  return l;
}

nn::Tensor sage_layer(const nn::Tensor& x, const EdgeIndex& edges, const SageLayer& layer) {
  check_rows(x, edges);
  const nn::Tensor nbr_mean = nn::propagate(x, edges.src, edges.dst, edges.mean_coef, edges.num_nodes);
  const nn::Tensor out = nn::add(nn::matmul(x, layer.w_self), nn::matmul(nbr_mean, layer.w_nbr));
  return nn::add_bias_row(out, layer.bias);
}

} // namespace structprobe::gnn
