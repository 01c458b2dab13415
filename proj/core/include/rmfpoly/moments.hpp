#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rmfpoly/arith.hpp"
#include "rmfpoly/sieve.hpp"

namespace rmfpoly {

/// Squarefree kernel ab / gcd(a, b)^2 of two squarefree values, i.e. the
/// product of the symmetric difference of their prime sets. Table values are
/// below 2^64, so the kernel always fits in 128 bits and serves directly as
/// an exact, collision-free key.
struct KernelKey {
  u128 value = 1;
  friend auto operator<=>(const KernelKey&, const KernelKey&) = default;
};

KernelKey pair_kernel(std::span<const PrimePower> a, std::span<const PrimePower> b);
/// Throws std::invalid_argument if either record is not squarefree.
KernelKey pair_kernel(const ValueRecord& a, const ValueRecord& b);

/// gcd of two factored values.
std::uint64_t pair_gcd(std::span<const PrimePower> a, std::span<const PrimePower> b);

/// E[M_N^2] = #{(n1, n2) : P(n1) = P(n2), both squarefree}.
std::uint64_t second_moment_exact(const ValueTable& table);

struct FourthMoment {
  std::uint64_t fourth = 0;    // E[M_N^4], ordered square quadruples
  std::uint64_t diagonal = 0;  // quadruples equal in pairs under some pairing
  std::uint64_t off_diagonal = 0;
};

/// Sum over kernels mu of c_mu^2, c_mu = #ordered squarefree pairs with
/// kernel mu. Pair kernels are bucketed in memory-bounded passes; passes run
/// on up to `threads` workers and are summed in a fixed order.
FourthMoment fourth_moment_exact(const ValueTable& table, unsigned threads = 1);

std::uint64_t off_diagonal_count(const ValueTable& table, unsigned threads = 1);

struct McLeishSums {
  double s2 = 0.0;     // sum_p E[M_{p,N}^2] / E[M_N^2]
  double s4 = 0.0;     // sum_p E[M_{p,N}^4] / E[M_N^2]^2
  double cross = 0.0;  // sum_{p != q} E[M_{p,N}^2 M_{q,N}^2] / E[M_N^2]^2
  std::uint64_t second_moment = 0;
  std::uint64_t class_second = 0;
  std::uint64_t class_fourth = 0;
  std::uint64_t class_cross = 0;
  std::uint64_t classes = 0;  // nonempty largest-prime classes, Unit included
};

/// Groups squarefree n by P+(P(n)) (Unit class separate) and evaluates the
/// three condition sums exactly by per-class kernel bucketing.
McLeishSums mcleish_condition_sums(const ValueTable& table);

struct MomentReport {
  std::uint64_t n = 0;
  std::uint64_t sf_count = 0;
  std::uint64_t second_moment = 0;
  FourthMoment fourth;
  McLeishSums mcleish;
};

MomentReport moment_report(const ValueTable& table, unsigned threads = 1);

struct GcdHistogram {
  std::uint64_t d_threshold = 0;
  std::uint64_t pairs = 0;
  bool exhaustive = false;
  std::map<std::uint64_t, std::uint64_t> counts;  // gcd -> pairs
  std::uint64_t above_d = 0;
  std::uint64_t above_n = 0;
  double mass_above_d = 0.0;
  double mass_above_n = 0.0;
};

/// Distribution of gcd(P(n1), P(n2)) over `samples` uniform ordered pairs,
/// or over all N^2 ordered pairs when samples == 0.
GcdHistogram gcd_class_histogram(const ValueTable& table, std::uint64_t d_threshold, std::uint64_t samples,
                                 std::uint64_t seed);

struct QuadrupleRow {
  std::uint64_t n = 0;
  FourthMoment moments;
  double ratio = 0.0;  // off_diagonal / N^2
};

struct QuadrupleTrend {
  std::vector<QuadrupleRow> rows;
  double loglog_slope = 0.0;  // least-squares slope of log(off_diagonal) against log N
  bool ratio_strictly_decreasing = false;
};

QuadrupleTrend quadruple_trend(const IntPolynomial& p, std::span<const std::uint64_t> ns, unsigned threads = 1);

}  // namespace rmfpoly
