#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace structprobe::nn {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

/// Raised when an operation produces NaN or Inf.
class NonFiniteError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {
struct Storage {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad; // empty until first accumulation
  bool requires_grad = false;
};
} // namespace detail

/// Dense row-major array of doubles with shared ownership. Copies alias the
/// same storage; use clone() for a deep copy.
class Tensor {
public:
  Tensor();
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(double value);
  /// Rank-2 tensor from nested rows, for tests and small fixtures.
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows,
                       bool requires_grad = false);

  const Shape& shape() const { return s_->shape; }
  std::size_t rank() const { return s_->shape.size(); }
  std::size_t numel() const { return s_->value.size(); }
  /// Rank-2 accessors; throw for other ranks.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const { return s_->value; }
  std::span<double> values_mut() { return s_->value; }
  double item() const;
  double at(std::size_t r, std::size_t c) const { return s_->value[r * cols() + c]; }

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool on) { s_->requires_grad = on; }

  bool has_grad() const { return !s_->grad.empty(); }
  /// Gradient buffer; zeros if nothing has been accumulated yet.
  std::span<const double> grad() const;
  /// Mutable gradient buffer, allocated on demand.
  std::span<double> grad_mut() const;
  void zero_grad() { s_->grad.clear(); }

  Tensor clone() const;
  /// Same values, no gradient tracking.
  Tensor detach() const;

  bool same_storage(const Tensor& other) const { return s_ == other.s_; }
  const std::shared_ptr<detail::Storage>& storage() const { return s_; }

private:
  std::shared_ptr<detail::Storage> s_;
};

/// Ordered record of executed primitives. Backward replays the entries in
/// exact reverse order and accumulates gradients additively.
class Tape {
public:
  using BackwardFn = std::function<void()>;

  void record(const Tensor& output, BackwardFn fn);
  /// Seeds d(loss)/d(loss) = 1 and runs every recorded backward step.
  /// Calling it twice without a new forward pass is an error.
  void backward(const Tensor& loss);
  void clear();
  std::size_t size() const { return entries_.size(); }
  bool consumed() const { return consumed_; }

  /// Tape that primitives record onto in the current thread, or nullptr.
  static Tape* active();

private:
  struct Entry {
    std::shared_ptr<detail::Storage> output;
    BackwardFn fn;
  };
  std::vector<Entry> entries_;
  bool consumed_ = false;
};

/// Makes `tape` the active tape of this thread for the scope's lifetime.
class TapeScope {
public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

private:
  Tape* previous_;
};

/// Backward on the active tape.
void backward(const Tensor& loss);

} // namespace structprobe::nn
