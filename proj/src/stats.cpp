#include "structprobe/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace structprobe {

namespace {
std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return v;
}
} // namespace

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return 0.0; // the mean of equal values need not round back to them
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  const auto v = sorted_copy(values);
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  const auto v = sorted_copy(values);
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summary of empty sample");
  Summary s;
  s.count = values.size();
  s.mean = mean(values);
  s.median = median(values);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  s.min = *mn;
  s.max = *mx;
  return s;
}

double t_critical(double level, std::size_t df) {
  if (df == 0) throw std::invalid_argument("t_critical: df must be positive");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("t_critical: level must lie in (0,1)");
  const boost::math::students_t dist(static_cast<double>(df));
  return boost::math::quantile(dist, 0.5 * (1.0 + level));
}

ConfidenceInterval ci95(std::span<const double> values) {
  ConfidenceInterval ci;
  ci.mean = mean(values);
  if (values.size() < 2) return ci;
  const double n = static_cast<double>(values.size());
  ci.half_width = t_critical(0.95, values.size() - 1) * sample_std(values) / std::sqrt(n);
  return ci;
}

Histogram histogram(std::span<const double> values, double lo, double hi, std::size_t max_bins) {
  if (values.empty()) throw std::invalid_argument("histogram of empty sample");
  if (hi < lo) throw std::invalid_argument("histogram: hi < lo");
  max_bins = std::max<std::size_t>(max_bins, 1);
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  const double n = static_cast<double>(values.size());
  std::size_t bins = 1;
  if (hi > lo) {
    const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
    if (iqr > 0.0) {
      const double width = 2.0 * iqr * std::cbrt(1.0 / n);
      bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
      h.policy = "freedman-diaconis";
    } else {
      bins = static_cast<std::size_t>(std::ceil(std::log2(n))) + 1;
      h.policy = "sturges";
    }
    bins = std::clamp<std::size_t>(bins, 1, max_bins);
  } else {
    h.policy = "single";
  }
  if (bins == max_bins && h.policy != "single") h.policy += "-capped";

  h.counts.assign(bins, 0);
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;
  for (double v : values) {
    std::size_t b = 0;
    if (hi > lo) {
      const double pos = (v - lo) / width;
      b = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), bins - 1);
    }
    ++h.counts[b];
  }
  return h;
}

Histogram histogram(std::span<const double> values, std::size_t max_bins) {
  if (values.empty()) throw std::invalid_argument("histogram of empty sample");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  return histogram(values, *mn, *mx, max_bins);
}

} // namespace structprobe
