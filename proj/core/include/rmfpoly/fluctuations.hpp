#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rmfpoly/rmf.hpp"
#include "rmfpoly/sieve.hpp"

namespace rmfpoly {

enum class ScaleMode { PaperSchedule, GeometricSurrogate, Explicit };

std::string_view to_string(ScaleMode m);

/// Increasing scales x_1 < ... < x_k.
struct ScaleSet {
  ScaleMode mode = ScaleMode::Explicit;
  std::uint64_t base = 0;
  std::uint64_t cap = 0;
  std::vector<std::uint64_t> xs;

  std::size_t size() const { return xs.size(); }
  std::uint64_t largest() const { return xs.back(); }
};

inline constexpr std::uint64_t kDefaultScaleCap = 10'000'000;

/// PaperSchedule: x_i = X^{i (log 3i)^2}; InfeasibleScale when x_k > cap.
/// GeometricSurrogate: x_i = round(X r^i) with r = (cap / X)^{1/k}.
ScaleSet make_scales(std::uint64_t base, std::size_t k, ScaleMode mode, std::uint64_t cap = kDefaultScaleCap);
ScaleSet explicit_scales(std::vector<std::uint64_t> xs);

/// Disjoint prime sets A_1, ..., A_k for P(n) = n^2 + 1. A_i holds the primes
/// p > T_i that divide some n^2 + 1 with x_{i-1} < n <= x_i, where
/// T_i = max(c x_i log x_i, floor x_i) and x_0 = 0. A floor of 2 makes each
/// prime of A_i divide at most one n^2 + 1 with n <= x_i, and exactly once.
struct PrimeClassSets {
  double c = 0.0;
  double floor = 0.0;
  std::vector<double> thresholds;
  std::vector<std::vector<std::uint64_t>> sets;  // ascending

  /// 0-based scale index of an A-prime, or npos.
  std::size_t scale_of(std::uint64_t prime) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  friend PrimeClassSets build_prime_class_sets(const ScaleSet&, const ValueTable&, double, double);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> index_;  // sorted by prime
};

/// `table` must hold n^2 + 1 for n <= largest scale.
inline constexpr double kDefaultThresholdFloor = 2.0;

PrimeClassSets build_prime_class_sets(const ScaleSet& scales, const ValueTable& table, double c = 0.01,
                                      double floor = kDefaultThresholdFloor);

struct SetPropertyCheck {
  bool disjoint = true;
  bool above_threshold = true;     // every p in A_i exceeds c x_i log x_i
  bool fresh = true;               // p in A_i divides no m^2 + 1 with m <= x_{i-1}
  bool attained = true;            // p in A_i divides some n^2 + 1 with n <= x_i
  bool single_prime_per_value = true;  // each n^2+1, n <= x_i, has at most one A_i prime, to the first power
  bool single_value_per_prime = true;  // each p in A_i divides at most one n^2+1, n <= x_i
  bool ok() const {
    return disjoint && above_threshold && fresh && attained && single_prime_per_value && single_value_per_prime;
  }
};

/// Checks the defining properties of the sets directly against the table.
SetPropertyCheck check_set_properties(const ScaleSet& scales, const PrimeClassSets& sets, const ValueTable& table);

struct ThreeSums {
  std::int64_t s1 = 0;  // n whose only A-prime is a single p in A_i
  std::int64_t s2 = 0;  // n with some A-prime of an earlier scale
  std::int64_t s3 = 0;  // n with no A-prime
  std::int64_t total = 0;
};

/// Reference decomposition of M(x_i) = sum_{n <= x_i} f(n^2 + 1), scale index i (0-based).
ThreeSums three_sum_decomposition(const RmfSampler& f, const ScaleSet& scales, const PrimeClassSets& sets,
                                  const ValueTable& table, std::size_t i);

struct LilOptions {
  std::uint64_t trials = 200;
  std::uint64_t seed = 0;
  double c = 0.01;
  double floor = kDefaultThresholdFloor;
  unsigned threads = 1;
  std::vector<double> thresholds = {0.5, 1.0, 1.5};
  double beta_floor = 0.01;
};

struct ScaleRow {
  std::uint64_t x = 0;
  double threshold = 0.0;
  std::uint64_t set_size = 0;
  double set_ratio = 0.0;        // |A_i| / x_i
  double beta_exact = 0.0;       // E[S1^2] / x_i
  double beta_hat = 0.0;         // empirical Var(S1) / x_i
  std::uint64_t s2_support = 0;  // n <= x_i with a prime of an earlier A_j
  double s2_var_exact = 0.0;     // E[S2^2]: squarefree part of s2_support
  double s2_var_hat = 0.0;       // mean of S2^2 over trials
  double stat_max = 0.0;         // max over trials of |M(x_i)| / sqrt(x_i log log x_i)
  double stat_median = 0.0;
};

struct FluctuationReport {
  ScaleSet scales;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double c = 0.0;
  double floor = 0.0;
  bool sets_ok = false;
  bool partition_exact = true;
  bool residual_zero = true;
  std::vector<ScaleRow> rows;
  std::vector<double> thresholds;
  std::vector<double> exceed_fraction;  // per threshold: share of trials with max_i stat >= threshold
  std::vector<double> max_stat;         // per trial
  std::vector<double> studentized_max;  // per trial: max_i |S1_i| / sd_i over scales with beta >= floor
  double studentized_level = 0.0;       // sqrt(log k)
  double studentized_exceed_fraction = 0.0;
  double studentized_median = 0.0;
  double good_scale_fraction = 0.0;  // mean over trials
  std::vector<std::vector<std::int64_t>> s1;  // trials x k
};

FluctuationReport lil_scan(const ScaleSet& scales, const LilOptions& opt);

}  // namespace rmfpoly
