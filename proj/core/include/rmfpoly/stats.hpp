#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rmfpoly::stats {

double normal_cdf(double x, double sigma = 1.0);

/// sup_x |F_n(x) - F(x)| for the empirical CDF of `samples`; sorts a copy.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // unbiased, n >= 2
double median(std::vector<double> xs);
double correlation(std::span<const double> xs, std::span<const double> ys);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  Histogram() = default;
  Histogram(double lo, double hi, std::size_t bins);
  void add(double x);
  double bin_lo(std::size_t i) const;
};

}  // namespace rmfpoly::stats
