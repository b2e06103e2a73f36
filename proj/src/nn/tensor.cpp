#include "structprobe/nn/tensor.hpp"

#include <algorithm>
#include <numeric>

namespace structprobe::nn {

namespace {
thread_local Tape* g_active_tape = nullptr;
} // namespace

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor() : s_(std::make_shared<detail::Storage>()) { s_->shape = {0}; }

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : s_(std::make_shared<detail::Storage>()) {
  if (shape_numel(shape) != values.size()) {
    throw std::invalid_argument("tensor: " + std::to_string(values.size()) +
                                " values for shape " + shape_string(shape));
  }
  s_->shape = std::move(shape);
  s_->value = std::move(values);
  s_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows, bool requires_grad) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("matrix: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(values), requires_grad);
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw std::invalid_argument("rows(): expected rank-2 tensor, got " + shape_string(shape()));
  return s_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw std::invalid_argument("cols(): expected rank-2 tensor, got " + shape_string(shape()));
  return s_->shape[1];
}

double Tensor::item() const {
  if (numel() != 1) throw std::invalid_argument("item(): tensor of shape " + shape_string(shape()));
  return s_->value[0];
}

std::span<const double> Tensor::grad() const {
  if (s_->grad.empty()) s_->grad.assign(s_->value.size(), 0.0);
  return s_->grad;
}

std::span<double> Tensor::grad_mut() const {
  if (s_->grad.empty()) s_->grad.assign(s_->value.size(), 0.0);
  return s_->grad;
}

Tensor Tensor::clone() const {
  Tensor t(s_->shape, s_->value, s_->requires_grad);
  return t;
}

Tensor Tensor::detach() const { return Tensor(s_->shape, s_->value, false); }

void Tape::record(const Tensor& output, BackwardFn fn) {
  if (consumed_) clear();
  entries_.push_back({output.storage(), std::move(fn)});
}

void Tape::backward(const Tensor& loss) {
  if (consumed_) throw std::logic_error("backward: tape already consumed; run a new forward pass");
  if (loss.numel() != 1 || loss.rank() > 1) {
    throw std::invalid_argument("backward: loss must be a scalar, got shape " + shape_string(loss.shape()));
  }
  const auto& target = loss.storage();
  const bool recorded = std::any_of(entries_.begin(), entries_.end(),
                                    [&](const Entry& e) { return e.output == target; });
  if (!recorded) throw std::invalid_argument("backward: loss was not recorded on this tape");

  target->grad.assign(1, 1.0);
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->output->grad.empty()) continue; // no gradient reached this node
    it->fn();
  }
  consumed_ = true;
}

void Tape::clear() {
  entries_.clear();
  consumed_ = false;
}

Tape* Tape::active() { return g_active_tape; }

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }

TapeScope::~TapeScope() { g_active_tape = previous_; }

void backward(const Tensor& loss) {
  Tape* tape = Tape::active();
  if (!tape) throw std::logic_error("backward: no active tape");
  tape->backward(loss);
}

} // namespace structprobe::nn
