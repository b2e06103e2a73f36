#include "structprobe/nn/adam.hpp"

#include <cmath>
#include <string>

namespace structprobe::nn {

AdamState::AdamState(AdamConfig cfg, std::span<const Tensor> params) : config(cfg) {
  for (const Tensor& p : params) {
    first_moment.emplace_back(p.numel(), 0.0);
    second_moment.emplace_back(p.numel(), 0.0);
    shapes.push_back(p.shape());
  }
}

namespace {

void check_shapes(const AdamState& state, std::span<Tensor> params) {
  if (params.size() != state.shapes.size()) {
    throw std::invalid_argument("adam_step: " + std::to_string(params.size()) + " parameters for state of " +
                                std::to_string(state.shapes.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != state.shapes[i]) {
      throw std::invalid_argument("adam_step: shape mismatch " + shape_string(params[i].shape()) + " vs " +
                                  shape_string(state.shapes[i]));
    }
  }
}

void update(AdamState& state, Tensor& param, std::span<const double> grad, std::size_t slot) {
  const AdamConfig& c = state.config;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  auto p = param.values_mut();
  auto& m = state.first_moment[slot];
  auto& v = state.second_moment[slot];
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] -= c.lr * c.weight_decay * p[i];
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * grad[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
    const double m_hat = m[i] / bias1;
    const double v_hat = v[i] / bias2;
    p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

} // namespace

void adam_step(AdamState& state, std::span<Tensor> params) {
  check_shapes(state, params);
  ++state.step;
  for (std::size_t i = 0; i < params.size(); ++i) update(state, params[i], params[i].grad(), i);
}

void adam_step(AdamState& state, std::span<Tensor> params, std::span<const std::vector<double>> grads) {
  check_shapes(state, params);
  if (grads.size() != params.size()) throw std::invalid_argument("adam_step: gradient count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].size() != params[i].numel()) {
      throw std::invalid_argument("adam_step: gradient of " + std::to_string(grads[i].size()) +
                                  " values for shape " + shape_string(params[i].shape()));
    }
  }
  ++state.step;
  for (std::size_t i = 0; i < params.size(); ++i) update(state, params[i], grads[i], i);
}

} // namespace structprobe::nn
