#pragma once

#include <cstdint>
#include <span>

#include "structprobe/nn/tensor.hpp"

namespace structprobe {
class Rng;
}

namespace structprobe::nn {

using Index = std::uint32_t;

// Every primitive records a backward step on the active tape when at least
// one input requires a gradient, and throws NonFiniteError if its output
// contains NaN or Inf. Shape errors name both operand shapes.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
/// x (m x n) + bias (1 x n) broadcast over rows.
Tensor add_bias_row(const Tensor& x, const Tensor& bias);

/// Derivative at 0 is 0.
Tensor relu(const Tensor& x);
/// Derivative at 0 is `slope`.
Tensor leaky_relu(const Tensor& x, double slope);
Tensor elu(const Tensor& x, double alpha = 1.0);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);

Tensor row_softmax(const Tensor& x);
/// mask has one byte per entry; 0 excludes the entry, which then gets
/// exactly 0 probability. Every row needs at least one unmasked entry.
Tensor masked_row_softmax(const Tensor& x, std::span<const std::uint8_t> mask);

/// Column means: (m x n) -> (1 x n).
Tensor mean_rows(const Tensor& x);
Tensor sum_all(const Tensor& x);
Tensor mean_all(const Tensor& x);
Tensor concat_cols(const Tensor& a, const Tensor& b);

/// Per-segment row means: (N x F) -> (S x F). Empty segments yield zeros.
Tensor scatter_mean(const Tensor& x, std::span<const Index> segment_ids, std::size_t num_segments);
/// Inverse direction: row s of (S x F) copied to every node of segment s.
Tensor broadcast_segments(const Tensor& x, std::span<const Index> segment_ids);

Tensor gather_rows(const Tensor& x, std::span<const Index> index);

/// Edge-list message passing with fixed coefficients:
/// out[dst[e]] += coef[e] * x[src[e]], out has num_out rows.
Tensor propagate(const Tensor& x, std::span<const Index> src, std::span<const Index> dst,
                 std::span<const double> coef, std::size_t num_out);

/// Multi-head message passing with learned edge weights. x is N x (K*F),
/// alpha is E x K; out[dst[e], kF:(k+1)F] += alpha[e,k] * x[src[e], kF:(k+1)F].
Tensor attention_aggregate(const Tensor& x, const Tensor& alpha, std::span<const Index> src,
                           std::span<const Index> dst, std::size_t num_out);

/// Per-head dot products: x is N x (K*F), a is K x F; result N x K.
Tensor head_scores(const Tensor& x, const Tensor& a);

/// Softmax over the entries of each segment, independently per column.
/// scores is E x K; segment_ids has E entries below num_segments.
Tensor segment_softmax(const Tensor& scores, std::span<const Index> segment_ids,
                       std::size_t num_segments);

/// Average of the K column blocks of x (N x (K*F)) -> N x F.
Tensor head_mean(const Tensor& x, std::size_t heads);

/// Inverted dropout; identity when rate == 0.
Tensor dropout(const Tensor& x, double rate, Rng& rng);

/// Mean over rows of -log softmax(logits)[label], max-subtracted.
Tensor cross_entropy(const Tensor& logits, std::span<const int> labels);

} // namespace structprobe::nn
