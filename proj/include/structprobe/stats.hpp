#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace structprobe {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0; // population standard deviation
  double min = 0.0;
  double max = 0.0;
};

/// Median of an even-length sample is the mean of the two central values.
/// Throws std::invalid_argument on an empty sample.
Summary summarize(std::span<const double> values);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1 denominator); 0 for n < 2.
double sample_std(std::span<const double> values);
double median(std::span<const double> values);
double quantile(std::span<const double> values, double q); // linear interpolation

/// Two-sided Student-t critical value t_{(1+level)/2, df}.
double t_critical(double level, std::size_t df);

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;
};

/// mean +- t_{0.975, n-1} * s / sqrt(n). Half-width is 0 for n < 2.
ConfidenceInterval ci95(std::span<const double> values);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> edges;        // bins + 1 edges
  std::vector<std::size_t> counts;  // bins
  std::string policy;
};

/// Freedman-Diaconis bin width 2 * IQR * n^(-1/3) over [lo, hi], capped at
/// max_bins. Falls back to Sturges' rule when the IQR is zero and to one bin
/// when lo == hi. Values equal to hi land in the top bin.
Histogram histogram(std::span<const double> values, double lo, double hi, std::size_t max_bins = 50);
/// Same with lo/hi taken from the data.
Histogram histogram(std::span<const double> values, std::size_t max_bins = 50);

} // namespace structprobe
