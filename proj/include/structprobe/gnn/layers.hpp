#pragma once

#include <cstddef>

#include "structprobe/gnn/batch.hpp"
#include "structprobe/nn/tensor.hpp"
#include "structprobe/rng.hpp"

namespace structprobe::gnn {

/// Dense layer y = x W + b with W (in x out) and b (1 x out).
struct Linear {
  nn::Tensor weight;
  nn::Tensor bias;

  static Linear init(std::size_t in, std::size_t out, Rng& rng);
  nn::Tensor operator()(const nn::Tensor& x) const;
};

/// X' = D~^{-1/2} (A + I) D~^{-1/2} X W + b.
struct GcnLayer {
  Linear lin;

  static GcnLayer init(std::size_t in, std::size_t out, Rng& rng);
};
nn::Tensor gcn_layer(const nn::Tensor& x, const EdgeIndex& edges, const GcnLayer& layer);

/// Multi-head attention over N(i) plus i. Scores are
/// leaky_relu(a_dst . W x_i + a_src . W x_j); heads are concatenated, or
/// averaged when `concat` is false.
struct GatLayer {
  nn::Tensor weight;   // in x (heads * out)
  nn::Tensor att_src;  // heads x out
  nn::Tensor att_dst;  // heads x out
  nn::Tensor bias;     // 1 x (heads * out) if concat, else 1 x out
  std::size_t heads = 1;
  bool concat = true;
  double slope = 0.2;

  static GatLayer init(std::size_t in, std::size_t out, std::size_t heads, bool concat, double slope, Rng& rng);
  std::size_t out_width() const;
};
nn::Tensor gat_layer(const nn::Tensor& x, const EdgeIndex& edges, const GatLayer& layer);

/// x'_i = W_self x_i + W_nbr mean_{j in N(i)} x_j + b, full neighborhood;
/// an isolated node contributes a zero neighbor mean.
struct SageLayer {
  nn::Tensor w_self;
  nn::Tensor w_nbr;
  nn::Tensor bias;

  static SageLayer init(std::size_t in, std::size_t out, Rng& rng);
};
nn::Tensor sage_layer(const nn::Tensor& x, const EdgeIndex& edges, const SageLayer& layer);

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) matrix flagged for gradients.
nn::Tensor uniform_param(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng);

} // namespace structprobe::gnn
