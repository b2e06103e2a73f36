#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "structprobe/nn/tensor.hpp"

namespace structprobe::nn {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// Moment estimates for an ordered parameter list.
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::vector<Shape> shapes;

  AdamState() = default;
  AdamState(AdamConfig cfg, std::span<const Tensor> params);
};

/// One optimizer step using each parameter's accumulated gradient.
/// Weight decay is decoupled: p <- p - lr * wd * p precedes the Adam update.
/// Throws std::invalid_argument if params do not match the state's shapes.
void adam_step(AdamState& state, std::span<Tensor> params);

/// Same update with explicit gradients (one buffer per parameter).
void adam_step(AdamState& state, std::span<Tensor> params, std::span<const std::vector<double>> grads);

} // namespace structprobe::nn
