#include "structprobe/nn/ops.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

#include "structprobe/rng.hpp"

namespace structprobe::nn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

bool tracking(std::initializer_list<const Tensor*> inputs) {
  if (Tape::active() == nullptr) return false;
  return std::any_of(inputs.begin(), inputs.end(), [](const Tensor* t) { return t->requires_grad(); });
}

void require_rank2(std::string_view op, const Tensor& t) {
  if (t.rank() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected a matrix, got shape " + shape_string(t.shape()));
  }
}

[[noreturn]] void shape_error(std::string_view op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                              shape_string(b.shape()));
}

void require_same_shape(std::string_view op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error(op, a, b);
}

void check_index(std::string_view op, std::span<const Index> idx, std::size_t bound) {
  for (Index i : idx) {
    if (i >= bound) {
      throw std::invalid_argument(std::string(op) + ": index " + std::to_string(i) + " out of range for " +
                                  std::to_string(bound) + " rows");
    }
  }
}

/// Wraps freshly computed values into the op's output.
Tensor finish(std::string_view op, Shape shape, std::vector<double> values, bool track) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteError(std::string(op) + ": non-finite value in output");
  }
  return Tensor(std::move(shape), std::move(values), track);
}

template <typename Fn>
void record(const Tensor& out, Fn fn) {
  Tape::active()->record(out, std::move(fn));
}

/// Elementwise unary op with derivative given in terms of (x, y).
template <typename F, typename D>
Tensor unary(std::string_view op, const Tensor& x, F f, D dfdx) {
  const bool track = tracking({&x});
  std::vector<double> y(x.numel());
  const auto xv = x.values();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(xv[i]);
  Tensor out = finish(op, x.shape(), std::move(y), track);
  if (track) {
    record(out, [x, out, dfdx]() mutable {
      const auto g = out.grad();
      const auto xv = x.values();
      const auto yv = out.values();
      auto gx = x.grad_mut();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * dfdx(xv[i], yv[i]);
    });
  }
  return out;
}

} // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2("matmul", a);
  require_rank2("matmul", b);
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  const bool track = tracking({&a, &b});
  std::vector<double> c(m * n, 0.0);
  if (m && n && k) {
    MutMap(c.data(), m, n).noalias() = ConstMap(a.values().data(), m, k) * ConstMap(b.values().data(), k, n);
  }
  Tensor out = finish("matmul", {m, n}, std::move(c), track);
  if (track) {
    record(out, [a, b, out, m, k, n]() mutable {
      if (!m || !n || !k) return;
      ConstMap gc(out.grad().data(), m, n);
      if (a.requires_grad()) {
        MutMap(a.grad_mut().data(), m, k).noalias() += gc * ConstMap(b.values().data(), k, n).transpose();
      }
      if (b.requires_grad()) {
        MutMap(b.grad_mut().data(), k, n).noalias() += ConstMap(a.values().data(), m, k).transpose() * gc;
      }
    });
  }
  return out;
}

namespace {
template <typename F>
Tensor binary_elementwise(std::string_view op, const Tensor& a, const Tensor& b, F f, double sign_b,
                          bool product) {
  require_same_shape(op, a, b);
  const bool track = tracking({&a, &b});
  std::vector<double> y(a.numel());
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = f(av[i], bv[i]);
  Tensor out = finish(op, a.shape(), std::move(y), track);
  if (track) {
    record(out, [a, b, out, sign_b, product]() mutable {
      const auto g = out.grad();
      if (a.requires_grad()) {
        auto ga = a.grad_mut();
        const auto bv = b.values();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += product ? g[i] * bv[i] : g[i];
      }
      if (b.requires_grad()) {
        auto gb = b.grad_mut();
        const auto av = a.values();
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += product ? g[i] * av[i] : sign_b * g[i];
      }
    });
  }
  return out;
}
} // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_elementwise("add", a, b, [](double x, double y) { return x + y; }, 1.0, false);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_elementwise("sub", a, b, [](double x, double y) { return x - y; }, -1.0, false);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_elementwise("mul", a, b, [](double x, double y) { return x * y; }, 1.0, true);
}

Tensor scale(const Tensor& x, double factor) {
  return unary("scale", x, [factor](double v) { return factor * v; },
               [factor](double, double) { return factor; });
}

Tensor add_bias_row(const Tensor& x, const Tensor& bias) {
  require_rank2("add_bias_row", x);
  require_rank2("add_bias_row", bias);
  if (bias.rows() != 1 || bias.cols() != x.cols()) shape_error("add_bias_row", x, bias);
  const std::size_t m = x.rows(), n = x.cols();
  const bool track = tracking({&x, &bias});
  std::vector<double> y(x.values().begin(), x.values().end());
  const auto bv = bias.values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) y[i * n + j] += bv[j];
  }
  Tensor out = finish("add_bias_row", x.shape(), std::move(y), track);
  if (track) {
    record(out, [x, bias, out, m, n]() mutable {
      const auto g = out.grad();
      if (x.requires_grad()) {
        auto gx = x.grad_mut();
        for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i];
      }
      if (bias.requires_grad()) {
        auto gb = bias.grad_mut();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
        }
      }
    });
  }
  return out;
}

Tensor relu(const Tensor& x) {
  return unary("relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& x, double slope) {
  return unary("leaky_relu", x, [slope](double v) { return v > 0.0 ? v : slope * v; },
               [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Tensor elu(const Tensor& x, double alpha) {
  return unary("elu", x, [alpha](double v) { return v > 0.0 ? v : alpha * std::expm1(v); },
               [alpha](double v, double y) { return v > 0.0 ? 1.0 : y + alpha; });
}

Tensor exp(const Tensor& x) {
  return unary("exp", x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  return unary("log", x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

namespace {
Tensor softmax_impl(std::string_view op, const Tensor& x, std::span<const std::uint8_t> mask) {
  require_rank2(op, x);
  const std::size_t m = x.rows(), n = x.cols();
  const bool masked = !mask.empty();
  if (masked && mask.size() != x.numel()) {
    throw std::invalid_argument(std::string(op) + ": mask has " + std::to_string(mask.size()) +
                                " entries for shape " + shape_string(x.shape()));
  }
  const bool track = tracking({&x});
  const auto xv = x.values();
  std::vector<double> y(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (!masked || mask[i * n + j]) mx = std::max(mx, xv[i * n + j]);
    }
    if (mx == -std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument(std::string(op) + ": row " + std::to_string(i) + " has no unmasked entry");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!masked || mask[i * n + j]) {
        y[i * n + j] = std::exp(xv[i * n + j] - mx);
        sum += y[i * n + j];
      }
    }
    for (std::size_t j = 0; j < n; ++j) y[i * n + j] /= sum;
  }
  Tensor out = finish(op, x.shape(), std::move(y), track);
  if (track) {
    record(out, [x, out, m, n]() mutable {
      const auto g = out.grad();
      const auto yv = out.values();
      auto gx = x.grad_mut();
      for (std::size_t i = 0; i < m; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += yv[i * n + j] * g[i * n + j];
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += yv[i * n + j] * (g[i * n + j] - dot);
      }
    });
  }
  return out;
}
} // namespace

Tensor row_softmax(const Tensor& x) { return softmax_impl("row_softmax", x, {}); }

Tensor masked_row_softmax(const Tensor& x, std::span<const std::uint8_t> mask) {
  if (mask.empty() && x.numel() > 0) throw std::invalid_argument("masked_row_softmax: empty mask");
  return softmax_impl("masked_row_softmax", x, mask);
}

Tensor mean_rows(const Tensor& x) {
  require_rank2("mean_rows", x);
  const std::size_t m = x.rows(), n = x.cols();
  if (m == 0) throw std::invalid_argument("mean_rows: no rows");
  const bool track = tracking({&x});
  std::vector<double> y(n, 0.0);
  const auto xv = x.values();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) y[j] += xv[i * n + j];
  }
  for (double& v : y) v /= static_cast<double>(m);
  Tensor out = finish("mean_rows", {1, n}, std::move(y), track);
  if (track) {
    record(out, [x, out, m, n]() mutable {
      const auto g = out.grad();
      auto gx = x.grad_mut();
      const double inv = 1.0 / static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += g[j] * inv;
      }
    });
  }
  return out;
}

Tensor sum_all(const Tensor& x) {
  const bool track = tracking({&x});
  double s = 0.0;
  for (double v : x.values()) s += v;
  Tensor out = finish("sum_all", {}, {s}, track);
  if (track) {
    record(out, [x, out]() mutable {
      const double g = out.grad()[0];
      for (double& gx : x.grad_mut()) gx += g;
    });
  }
  return out;
}

Tensor mean_all(const Tensor& x) {
  if (x.numel() == 0) throw std::invalid_argument("mean_all: empty tensor");
  return scale(sum_all(x), 1.0 / static_cast<double>(x.numel()));
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  require_rank2("concat_cols", a);
  require_rank2("concat_cols", b);
  if (a.rows() != b.rows()) shape_error("concat_cols", a, b);
  const std::size_t m = a.rows(), na = a.cols(), nb = b.cols(), n = na + nb;
  const bool track = tracking({&a, &b});
  std::vector<double> y(m * n);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    std::copy_n(av.begin() + static_cast<std::ptrdiff_t>(i * na), na, y.begin() + static_cast<std::ptrdiff_t>(i * n));
    std::copy_n(bv.begin() + static_cast<std::ptrdiff_t>(i * nb), nb,
                y.begin() + static_cast<std::ptrdiff_t>(i * n + na));
  }
  Tensor out = finish("concat_cols", {m, n}, std::move(y), track);
  if (track) {
    record(out, [a, b, out, m, na, nb, n]() mutable {
      const auto g = out.grad();
      if (a.requires_grad()) {
        auto ga = a.grad_mut();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < na; ++j) ga[i * na + j] += g[i * n + j];
        }
      }
      if (b.requires_grad()) {
        auto gb = b.grad_mut();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < nb; ++j) gb[i * nb + j] += g[i * n + na + j];
        }
      }
    });
  }
  return out;
}

Tensor scatter_mean(const Tensor& x, std::span<const Index> segment_ids, std::size_t num_segments) {
  require_rank2("scatter_mean", x);
  if (segment_ids.size() != x.rows()) {
    throw std::invalid_argument("scatter_mean: " + std::to_string(segment_ids.size()) + " segment ids for " +
                                std::to_string(x.rows()) + " rows");
  }
  check_index("scatter_mean", segment_ids, num_segments);
  const std::size_t n = x.cols();
  const bool track = tracking({&x});
  std::vector<double> counts(num_segments, 0.0);
  for (Index s : segment_ids) counts[s] += 1.0;
  std::vector<double> y(num_segments * n, 0.0);
  const auto xv = x.values();
  for (std::size_t i = 0; i < segment_ids.size(); ++i) {
    const std::size_t s = segment_ids[i];
    for (std::size_t j = 0; j < n; ++j) y[s * n + j] += xv[i * n + j];
  }
  for (std::size_t s = 0; s < num_segments; ++s) {
    if (counts[s] > 0) {
      for (std::size_t j = 0; j < n; ++j) y[s * n + j] /= counts[s];
    }
  }
  Tensor out = finish("scatter_mean", {num_segments, n}, std::move(y), track);
  if (track) {
    std::vector<Index> seg(segment_ids.begin(), segment_ids.end());
    record(out, [x, out, seg = std::move(seg), counts = std::move(counts), n]() mutable {
      const auto g = out.grad();
      auto gx = x.grad_mut();
      for (std::size_t i = 0; i < seg.size(); ++i) {
        const std::size_t s = seg[i];
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += g[s * n + j] / counts[s];
      }
    });
  }
  return out;
}

Tensor gather_rows(const Tensor& x, std::span<const Index> index) {
  require_rank2("gather_rows", x);
  check_index("gather_rows", index, x.rows());
  const std::size_t n = x.cols();
  const bool track = tracking({&x});
  std::vector<double> y(index.size() * n);
  const auto xv = x.values();
  for (std::size_t i = 0; i < index.size(); ++i) {
    std::copy_n(xv.begin() + static_cast<std::ptrdiff_t>(index[i] * n), n,
                y.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  Tensor out = finish("gather_rows", {index.size(), n}, std::move(y), track);
  if (track) {
    std::vector<Index> idx(index.begin(), index.end());
    record(out, [x, out, idx = std::move(idx), n]() mutable {
      const auto g = out.grad();
      auto gx = x.grad_mut();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) gx[idx[i] * n + j] += g[i * n + j];
      }
    });
  }
  return out;
}

Tensor broadcast_segments(const Tensor& x, std::span<const Index> segment_ids) {
  return gather_rows(x, segment_ids);
}

namespace {
void check_edges(std::string_view op, std::span<const Index> src, std::span<const Index> dst, std::size_t n_src,
                 std::size_t n_dst) {
  if (src.size() != dst.size()) {
    throw std::invalid_argument(std::string(op) + ": " + std::to_string(src.size()) + " sources vs " +
                                std::to_string(dst.size()) + " destinations");
  }
  check_index(op, src, n_src);
  check_index(op, dst, n_dst);
}
} // namespace

Tensor propagate(const Tensor& x, std::span<const Index> src, std::span<const Index> dst,
                 std::span<const double> coef, std::size_t num_out) {
  require_rank2("propagate", x);
  check_edges("propagate", src, dst, x.rows(), num_out);
  if (coef.size() != src.size()) throw std::invalid_argument("propagate: coefficient count mismatch");
  const std::size_t n = x.cols();
  const bool track = tracking({&x});
  std::vector<double> y(num_out * n, 0.0);
  const double* xv = x.values().data();
  for (std::size_t e = 0; e < src.size(); ++e) {
    const double c = coef[e];
    const double* xs = xv + src[e] * n;
    double* yd = y.data() + dst[e] * n;
    for (std::size_t j = 0; j < n; ++j) yd[j] += c * xs[j];
  }
  Tensor out = finish("propagate", {num_out, n}, std::move(y), track);
  if (track) {
    record(out, [x, out, s = std::vector<Index>(src.begin(), src.end()),
                 d = std::vector<Index>(dst.begin(), dst.end()),
                 c = std::vector<double>(coef.begin(), coef.end()), n]() mutable {
      const double* g = out.grad().data();
      double* gx = x.grad_mut().data();
      for (std::size_t e = 0; e < s.size(); ++e) {
        const double* gd = g + d[e] * n;
        double* gs = gx + s[e] * n;
        for (std::size_t j = 0; j < n; ++j) gs[j] += c[e] * gd[j];
      }
    });
  }
  return out;
}

Tensor attention_aggregate(const Tensor& x, const Tensor& alpha, std::span<const Index> src,
                           std::span<const Index> dst, std::size_t num_out) {
  require_rank2("attention_aggregate", x);
  require_rank2("attention_aggregate", alpha);
  check_edges("attention_aggregate", src, dst, x.rows(), num_out);
  const std::size_t heads = alpha.cols();
  if (alpha.rows() != src.size() || heads == 0 || x.cols() % heads != 0) {
    shape_error("attention_aggregate", x, alpha);
  }
  const std::size_t width = x.cols(), f = width / heads;
  const bool track = tracking({&x, &alpha});
  std::vector<double> y(num_out * width, 0.0);
  const double* xv = x.values().data();
  const double* av = alpha.values().data();
  for (std::size_t e = 0; e < src.size(); ++e) {
    for (std::size_t k = 0; k < heads; ++k) {
      const double w = av[e * heads + k];
      const double* xs = xv + src[e] * width + k * f;
      double* yd = y.data() + dst[e] * width + k * f;
      for (std::size_t j = 0; j < f; ++j) yd[j] += w * xs[j];
    }
  }
  Tensor out = finish("attention_aggregate", {num_out, width}, std::move(y), track);
  if (track) {
    record(out, [x, alpha, out, s = std::vector<Index>(src.begin(), src.end()),
                 d = std::vector<Index>(dst.begin(), dst.end()), heads, width, f]() mutable {
      const double* g = out.grad().data();
      const double* xv = x.values().data();
      const double* av = alpha.values().data();
      double* gx = x.requires_grad() ? x.grad_mut().data() : nullptr;
      double* ga = alpha.requires_grad() ? alpha.grad_mut().data() : nullptr;
      for (std::size_t e = 0; e < s.size(); ++e) {
        for (std::size_t k = 0; k < heads; ++k) {
          const double* gd = g + d[e] * width + k * f;
          if (gx) {
            const double w = av[e * heads + k];
            double* gs = gx + s[e] * width + k * f;
            for (std::size_t j = 0; j < f; ++j) gs[j] += w * gd[j];
          }
          if (ga) {
            const double* xs = xv + s[e] * width + k * f;
            double dot = 0.0;
            for (std::size_t j = 0; j < f; ++j) dot += gd[j] * xs[j];
            ga[e * heads + k] += dot;
          }
        }
      }
    });
  }
  return out;
}

Tensor head_scores(const Tensor& x, const Tensor& a) {
  require_rank2("head_scores", x);
  require_rank2("head_scores", a);
  const std::size_t heads = a.rows(), f = a.cols();
  if (heads * f != x.cols()) shape_error("head_scores", x, a);
  const std::size_t m = x.rows();
  const bool track = tracking({&x, &a});
  std::vector<double> y(m * heads, 0.0);
  const double* xv = x.values().data();
  const double* av = a.values().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < heads; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < f; ++j) s += xv[i * heads * f + k * f + j] * av[k * f + j];
      y[i * heads + k] = s;
    }
  }
  Tensor out = finish("head_scores", {m, heads}, std::move(y), track);
  if (track) {
    record(out, [x, a, out, m, heads, f]() mutable {
      const double* g = out.grad().data();
      const double* xv = x.values().data();
      const double* av = a.values().data();
      double* gx = x.requires_grad() ? x.grad_mut().data() : nullptr;
      double* ga = a.requires_grad() ? a.grad_mut().data() : nullptr;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < heads; ++k) {
          const double gik = g[i * heads + k];
          for (std::size_t j = 0; j < f; ++j) {
            if (gx) gx[i * heads * f + k * f + j] += gik * av[k * f + j];
            if (ga) ga[k * f + j] += gik * xv[i * heads * f + k * f + j];
          }
        }
      }
    });
  }
  return out;
}

Tensor segment_softmax(const Tensor& scores, std::span<const Index> segment_ids, std::size_t num_segments) {
  require_rank2("segment_softmax", scores);
  if (segment_ids.size() != scores.rows()) {
    throw std::invalid_argument("segment_softmax: " + std::to_string(segment_ids.size()) +
                                " segment ids for " + std::to_string(scores.rows()) + " rows");
  }
  check_index("segment_softmax", segment_ids, num_segments);
  const std::size_t rows = scores.rows(), k = scores.cols();
  const bool track = tracking({&scores});
  const auto sv = scores.values();
  std::vector<double> mx(num_segments * k, -std::numeric_limits<double>::infinity());
  for (std::size_t e = 0; e < rows; ++e) {
    for (std::size_t h = 0; h < k; ++h) {
      double& m = mx[segment_ids[e] * k + h];
      m = std::max(m, sv[e * k + h]);
    }
  }
  std::vector<double> y(rows * k);
  std::vector<double> sum(num_segments * k, 0.0);
  for (std::size_t e = 0; e < rows; ++e) {
    for (std::size_t h = 0; h < k; ++h) {
      const std::size_t s = segment_ids[e] * k + h;
      y[e * k + h] = std::exp(sv[e * k + h] - mx[s]);
      sum[s] += y[e * k + h];
    }
  }
  for (std::size_t e = 0; e < rows; ++e) {
    for (std::size_t h = 0; h < k; ++h) y[e * k + h] /= sum[segment_ids[e] * k + h];
  }
  Tensor out = finish("segment_softmax", scores.shape(), std::move(y), track);
  if (track) {
    record(out, [scores, out, seg = std::vector<Index>(segment_ids.begin(), segment_ids.end()), num_segments,
                 k]() mutable {
      const auto g = out.grad();
      const auto yv = out.values();
      auto gs = scores.grad_mut();
      std::vector<double> dot(num_segments * k, 0.0);
      for (std::size_t e = 0; e < seg.size(); ++e) {
        for (std::size_t h = 0; h < k; ++h) dot[seg[e] * k + h] += yv[e * k + h] * g[e * k + h];
      }
      for (std::size_t e = 0; e < seg.size(); ++e) {
        for (std::size_t h = 0; h < k; ++h) {
          gs[e * k + h] += yv[e * k + h] * (g[e * k + h] - dot[seg[e] * k + h]);
        }
      }
    });
  }
  return out;
}

Tensor head_mean(const Tensor& x, std::size_t heads) {
  require_rank2("head_mean", x);
  if (heads == 0 || x.cols() % heads != 0) {
    throw std::invalid_argument("head_mean: " + std::to_string(x.cols()) + " columns not divisible into " +
                                std::to_string(heads) + " heads");
  }
  if (heads == 1) return x;
  const std::size_t m = x.rows(), f = x.cols() / heads;
  const bool track = tracking({&x});
  std::vector<double> y(m * f, 0.0);
  const auto xv = x.values();
  const double inv = 1.0 / static_cast<double>(heads);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t j = 0; j < f; ++j) y[i * f + j] += xv[i * heads * f + h * f + j] * inv;
    }
  }
  Tensor out = finish("head_mean", {m, f}, std::move(y), track);
  if (track) {
    record(out, [x, out, m, f, heads, inv]() mutable {
      const auto g = out.grad();
      auto gx = x.grad_mut();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t h = 0; h < heads; ++h) {
          for (std::size_t j = 0; j < f; ++j) gx[i * heads * f + h * f + j] += g[i * f + j] * inv;
        }
      }
    });
  }
  return out;
}

Tensor dropout(const Tensor& x, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must lie in [0,1)");
  if (rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.numel());
  for (double& m : mask) m = rng.bernoulli(rate) ? 0.0 : keep_scale;
  return mul(x, Tensor(x.shape(), std::move(mask)));
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> labels) {
  require_rank2("cross_entropy", logits);
  const std::size_t g = logits.rows(), c = logits.cols();
  if (labels.size() != g) {
    throw std::invalid_argument("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(g) + " logit rows");
  }
  if (g == 0) throw std::invalid_argument("cross_entropy: empty batch");
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= c) {
      throw std::invalid_argument("cross_entropy: label " + std::to_string(y) + " outside [0," +
                                  std::to_string(c) + ")");
    }
  }
  const bool track = tracking({&logits});
  const auto zv = logits.values();
  std::vector<double> probs(g * c);
  double loss = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    const double* z = zv.data() + i * c;
    const double mx = *std::max_element(z, z + c);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) sum += std::exp(z[j] - mx);
    const double lse = mx + std::log(sum);
    loss += lse - z[labels[i]];
    for (std::size_t j = 0; j < c; ++j) probs[i * c + j] = std::exp(z[j] - lse);
  }
  loss /= static_cast<double>(g);
  Tensor out = finish("cross_entropy", {}, {loss}, track);
  if (track) {
    record(out, [logits, out, probs = std::move(probs), y = std::vector<int>(labels.begin(), labels.end()), g,
                 c]() mutable {
      const double scale = out.grad()[0] / static_cast<double>(g);
      auto gz = logits.grad_mut();
      for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
          const double onehot = static_cast<std::size_t>(y[i]) == j ? 1.0 : 0.0;
          gz[i * c + j] += scale * (probs[i * c + j] - onehot);
        }
      }
    });
  }
  return out;
}

} // namespace structprobe::nn
