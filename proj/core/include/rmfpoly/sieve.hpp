#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rmfpoly/arith.hpp"
#include "rmfpoly/poly.hpp"

namespace rmfpoly {

/// Factorization of one polynomial value P(n).
struct ValueRecord {
  std::uint64_t n = 0;
  std::uint64_t value = 0;
  std::span<const PrimePower> factors;  // ascending primes
  bool is_squarefree = false;
  std::optional<std::uint64_t> largest_prime;  // empty iff value == 1 (Unit)

  bool is_unit() const { return !largest_prime.has_value(); }
};

/// Factorizations of P(1), ..., P(N). Immutable once built.
class ValueTable {
 public:
  ValueTable(IntPolynomial poly, std::vector<std::uint64_t> values, std::vector<std::size_t> offsets,
             std::vector<PrimePower> factors);

  /// Builds a table from explicit values by trial division. For synthetic
  /// tables in tests and small experiments; values need not come from poly.
  static ValueTable from_values(IntPolynomial poly, std::vector<std::uint64_t> values);

  const IntPolynomial& polynomial() const { return poly_; }
  std::uint64_t size() const { return values_.size(); }

  /// 1-based access, n in [1, size()].
  ValueRecord record(std::uint64_t n) const;
  std::uint64_t value(std::uint64_t n) const { return values_[n - 1]; }
  std::span<const PrimePower> factors(std::uint64_t n) const {
    return {factors_.data() + offsets_[n - 1], factors_.data() + offsets_[n]};
  }
  bool is_squarefree(std::uint64_t n) const { return squarefree_[n - 1] != 0; }
  /// Largest prime factor, or 1 for the Unit value.
  std::uint64_t largest_prime_or_one(std::uint64_t n) const {
    return offsets_[n] == offsets_[n - 1] ? 1 : factors_[offsets_[n] - 1].prime;
  }

 private:
  IntPolynomial poly_;
  std::vector<std::uint64_t> values_;
  std::vector<std::size_t> offsets_;
  std::vector<PrimePower> factors_;
  std::vector<std::uint8_t> squarefree_;
};

/// Factors P(n) for 1 <= n <= N with a segmented polynomial sieve: each prime
/// p <= sqrt(max value) strikes the progressions n = r (mod p) for the roots r
/// of P mod p; the cofactor left afterwards is 1 or prime. Values must lie in
/// [1, 2^64); otherwise DomainError. Output is independent of `threads`.
ValueTable sieve_values(const IntPolynomial& p, std::uint64_t n, unsigned threads = 1);

std::uint64_t squarefree_count(const ValueTable& table);

/// prod_{p <= prime_bound} (1 - rho_P(p^2) / p^2). DomainError unless P is
/// admissible.
double kappa_euler(const IntPolynomial& p, std::uint64_t prime_bound = 100000);

struct LargestPrimeStats {
  std::uint64_t n = 0;
  double c = 0.0;
  double proportion_gt_n = 0.0;
  double proportion_gt_nlogn = 0.0;
  // histogram of log P+(P(n)) / log n over n >= 2 with P(n) > 1
  double hist_lo = 0.0;
  double hist_hi = 0.0;
  std::vector<std::uint64_t> hist_counts;
  double mean_log_ratio = 0.0;
};

LargestPrimeStats largest_prime_stats(const ValueTable& table, double c = 0.01, std::size_t bins = 20);

/// psi(x, y): number of n <= x whose prime factors are all <= y.
std::uint64_t smooth_count(std::uint64_t x, std::uint64_t y);

}  // namespace rmfpoly
