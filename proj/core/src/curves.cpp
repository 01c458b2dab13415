#include "rmfpoly/curves.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "rmfpoly/seed.hpp"

namespace rmfpoly {

namespace {

using BigPoly = std::vector<BigInt>;

BigInt eval_big(const BigPoly& q, std::int64_t y) {
  const BigInt x = static_cast<long>(y);
  BigInt acc = 0;
  for (std::size_t i = q.size(); i-- > 0;) acc = acc * x + q[i];
  return acc;
}

// Q(y + 1) - Q(y)
BigPoly forward_difference(const BigPoly& q) {
  const std::size_t d = q.size() - 1;
  BigPoly out(d, 0);
  // (y + 1)^i - y^i = sum_{j < i} C(i, j) y^j
  for (std::size_t i = 1; i <= d; ++i) {
    BigInt binom = 1;
    for (std::size_t j = 0; j < i; ++j) {
      out[j] += q[i] * binom;
      binom = binom * static_cast<unsigned long>(i - j) / static_cast<unsigned long>(j + 1);
    }
  }
  while (out.size() > 1 && out.back() == 0) out.pop_back();
  return out;
}

using Pieces = std::vector<std::pair<std::int64_t, std::int64_t>>;

Pieces pieces_of(const BigPoly& q, std::int64_t lo, std::int64_t hi) {
  if (lo >= hi || q.size() <= 2) return {{lo, hi}};
  const BigPoly diff = forward_difference(q);
  Pieces out;
  for (const auto& [l, r] : pieces_of(diff, lo, hi - 1)) {
    // diff is monotone on [l, r]: its sign changes at most once
    const bool rising = eval_big(diff, l) <= eval_big(diff, r);
    auto crossed = [&](std::int64_t y) {
      const BigInt v = eval_big(diff, y);
      return rising ? v > 0 : v < 0;
    };
    std::int64_t a = l, b = r + 1;  // first y in [l, r] with crossed(y), or r + 1
    while (a < b) {
      const std::int64_t mid = a + (b - a) / 2;
      if (crossed(mid)) {
        b = mid;
      } else {
        a = mid + 1;
      }
    }
    if (a > l) out.emplace_back(l, a);
    if (a <= r) out.emplace_back(a, r + 1);
  }
  return out;
}

struct Target {
  std::optional<i128> small;
  BigInt big;
};

// sign of b P(y) - target
int compare(const IntPolynomial& p, std::int64_t b, std::int64_t y, const Target& t) {
  if (t.small) {
    if (auto py = eval_i128(p, y)) {
      i128 lhs;
      if (!__builtin_mul_overflow(static_cast<i128>(b), *py, &lhs)) {
        return lhs < *t.small ? -1 : (lhs > *t.small ? 1 : 0);
      }
    }
  }
  const BigInt lhs = BigInt(static_cast<long>(b)) * eval(p, y);
  const int c = cmp(lhs, t.big);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

Target make_target(const IntPolynomial& p, std::int64_t a, std::int64_t x) {
  Target t;
  if (auto px = eval_i128(p, x)) {
    i128 v;
    if (!__builtin_mul_overflow(static_cast<i128>(a), *px, &v)) t.small = v;
  }
  t.big = BigInt(static_cast<long>(a)) * eval(p, x);
  return t;
}

}  // namespace

Pieces monotone_pieces(const IntPolynomial& p, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("monotone_pieces: empty range");
  BigPoly q;
  for (auto c : p.coeffs()) q.emplace_back(static_cast<long>(c));
  return pieces_of(q, lo, hi);
}

std::vector<CurvePoint> integral_points(const IntPolynomial& p, std::int64_t a, std::int64_t b, std::int64_t n) {
  if (a < 1 || b < 1) throw std::invalid_argument("integral_points: a, b must be >= 1");
  if (p.degree() < 2) throw std::invalid_argument("integral_points: degree must be >= 2");
  std::vector<CurvePoint> out;
  if (n < 1) return out;
  const auto pieces = monotone_pieces(p, 1, n);
  for (std::int64_t x = 1; x <= n; ++x) {
    const Target t = make_target(p, a, x);
    for (const auto& [l, r] : pieces) {
      const bool rising = compare(p, b, l, t) <= compare(p, b, r, t);
      // first y in [l, r] with b P(y) >= t (rising) or <= t (falling)
      std::int64_t lo = l, hi = r + 1;
      while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        const int c = compare(p, b, mid, t);
        if (rising ? c >= 0 : c <= 0) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      for (std::int64_t y = lo; y <= r && compare(p, b, y, t) == 0; ++y) out.push_back({x, y});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CurveScanReport exponent_scan(const IntPolynomial& p, std::span<const std::int64_t> ns, std::uint64_t ab_samples,
                              std::uint64_t seed, std::int64_t ab_max, std::size_t points_listed) {
  if (ab_samples == 0) throw std::invalid_argument("exponent_scan: ab_samples must be >= 1");
  if (!std::is_sorted(ns.begin(), ns.end())) throw std::invalid_argument("exponent_scan: Ns must be ascending");
  CurveScanReport report{p, {}, true, 0};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CurveScanRow row;
    row.n = ns[i];
    row.ab_max = ab_max > 0 ? ab_max : ns[i];
    if (row.ab_max < 2) throw std::invalid_argument("exponent_scan: need at least two choices for a, b");
    seed::Stream rng(seed::derive(seed, i));
    std::uint64_t total = 0;
    for (std::uint64_t s = 0; s < ab_samples; ++s) {
      CurveSample sample;
      do {
        sample.a = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(row.ab_max))) + 1;
        sample.b = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(row.ab_max))) + 1;
      } while (sample.a == sample.b);
      auto pts = integral_points(p, sample.a, sample.b, row.n);
      sample.count = pts.size();
      if (pts.size() > points_listed) pts.resize(points_listed);
      sample.points = std::move(pts);
      total += sample.count;
      row.max_count = std::max(row.max_count, sample.count);
      row.samples.push_back(std::move(sample));
    }
    row.mean_count = static_cast<double>(total) / static_cast<double>(ab_samples);
    row.diagonal_count = integral_points(p, 1, 1, row.n).size();
    if (!report.rows.empty() && row.max_count < report.rows.back().max_count) report.max_nondecreasing = false;
    report.max_offdiag_count = std::max(report.max_offdiag_count, row.max_count);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace rmfpoly
