#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rmfpoly/poly.hpp"

namespace rmfpoly {

struct CurvePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend auto operator<=>(const CurvePoint&, const CurvePoint&) = default;
};

/// Integer intervals [l, r] covering [lo, hi] on each of which the sequence
/// P(l), ..., P(r) is monotone. Built exactly from the sign pattern of the
/// forward differences; consecutive intervals may share an endpoint.
std::vector<std::pair<std::int64_t, std::int64_t>> monotone_pieces(const IntPolynomial& p, std::int64_t lo,
                                                                   std::int64_t hi);

/// All (x, y) in [1, N]^2 with a P(x) = b P(y), sorted. a, b >= 1, deg P >= 2.
std::vector<CurvePoint> integral_points(const IntPolynomial& p, std::int64_t a, std::int64_t b, std::int64_t n);

struct CurveSample {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::uint64_t count = 0;
  std::vector<CurvePoint> points;  // first few only
};

struct CurveScanRow {
  std::int64_t n = 0;
  std::int64_t ab_max = 0;
  std::vector<CurveSample> samples;
  std::uint64_t max_count = 0;
  double mean_count = 0.0;
  std::uint64_t diagonal_count = 0;  // a = b
};

struct CurveScanReport {
  IntPolynomial poly;
  std::vector<CurveScanRow> rows;
  bool max_nondecreasing = true;
  std::uint64_t max_offdiag_count = 0;
};

/// For every N, draws `ab_samples` uniform pairs a != b in [1, ab_max]
/// (ab_max = 0 means [1, N]) and counts integral points of a P(x) = b P(y).
CurveScanReport exponent_scan(const IntPolynomial& p, std::span<const std::int64_t> ns, std::uint64_t ab_samples,
                              std::uint64_t seed, std::int64_t ab_max = 0, std::size_t points_listed = 16);

}  // namespace rmfpoly
