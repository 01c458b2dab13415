#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rmfpoly/curves.hpp"

using namespace rmfpoly;

namespace {
IntPolynomial P(std::vector<std::int64_t> c) { return IntPolynomial(std::move(c)); }

std::vector<std::pair<long, long>> as_pairs(const std::vector<CurvePoint>& pts) {
  std::vector<std::pair<long, long>> out;
  for (const auto& p : pts) out.emplace_back(p.x, p.y);
  return out;
}
}  // namespace

TEST(Curves, DiagonalAndPell) {
  auto p = P({1, 0, 1});
  auto diag = integral_points(p, 1, 1, 100);
  ASSERT_EQ(diag.size(), 100U);
  for (std::size_t i = 0; i < diag.size(); ++i) EXPECT_EQ(diag[i], (CurvePoint{static_cast<std::int64_t>(i + 1),
                                                                              static_cast<std::int64_t>(i + 1)}));
  EXPECT_EQ(integral_points(p, 1, 2, 100), (std::vector<CurvePoint>{{3, 2}, {17, 12}, {99, 70}}));
  EXPECT_EQ(integral_points(p, 2, 1, 100), (std::vector<CurvePoint>{{2, 3}, {12, 17}, {70, 99}}));
  EXPECT_EQ(as_pairs(integral_points(p, 1, 2, 100)), oracle::pell_2(100));
}

TEST(Curves, PellGrowthIsLogarithmic) {
  auto p = P({1, 0, 1});
  for (std::int64_t n : {100LL, 1000LL, 100000LL, 10000000LL}) {
    const auto pts = integral_points(p, 1, 2, n);
    EXPECT_EQ(as_pairs(pts), oracle::pell_2(n)) << n;
    // solutions grow like (3 + 2 sqrt 2)^k
    EXPECT_LE(static_cast<double>(pts.size()), std::log(static_cast<double>(n)) / std::log(3 + 2 * std::sqrt(2.0)) + 1);
  }
}

TEST(Curves, MatchesNaiveDoubleLoop) {
  const std::vector<IntPolynomial> polys = {P({1, 0, 1}), P({0, 1, 1}), P({0, 2, 1}), P({3, -4, 1}),
                                            P({1, -7, 0, 1}), P({-2, 0, -1, 0, 1}), P({5, 0, -3})};
  std::mt19937_64 rng(8);
  for (const auto& p : polys) {
    for (int t = 0; t < 12; ++t) {
      const std::int64_t a = static_cast<std::int64_t>(rng() % 12) + 1, b = static_cast<std::int64_t>(rng() % 12) + 1;
      const std::int64_t n = 200;
      EXPECT_EQ(as_pairs(integral_points(p, a, b, n)), oracle::curve_points(p, a, b, n))
          << p.to_string() << " a=" << a << " b=" << b;
    }
  }
}

TEST(Curves, SoundAndSymmetric) {
  auto p = P({0, 1, 1});
  auto ab = integral_points(p, 2, 3, 1000);
  auto ba = integral_points(p, 3, 2, 1000);
  ASSERT_EQ(ab.size(), ba.size());
  for (std::size_t i = 0; i < ab.size(); ++i) {
    EXPECT_EQ(eval(p, ab[i].x) * 2, eval(p, ab[i].y) * 3);
    EXPECT_TRUE(std::find(ba.begin(), ba.end(), CurvePoint{ab[i].y, ab[i].x}) != ba.end());
  }
  EXPECT_EQ(as_pairs(ab), oracle::curve_points(p, 2, 3, 1000));
}

TEST(Curves, RejectsBadInput) {
  EXPECT_THROW(integral_points(P({1, 1}), 1, 1, 10), std::invalid_argument);
  EXPECT_THROW(integral_points(P({1, 0, 1}), 0, 1, 10), std::invalid_argument);
}

TEST(MonotonePieces, CoverAndMonotone) {
  for (const auto& p : {P({1, -7, 0, 1}), P({3, -4, 1}), P({-2, 0, -1, 0, 1}), P({0, 0, 0, 0, 0, 1})}) {
    auto pieces = monotone_pieces(p, -30, 30);
    ASSERT_FALSE(pieces.empty());
    EXPECT_EQ(pieces.front().first, -30);
    EXPECT_EQ(pieces.back().second, 30);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      auto [l, r] = pieces[i];
      if (i > 0) {
        EXPECT_LE(l, pieces[i - 1].second + 1);
      }
      int dir = 0;
      for (std::int64_t x = l; x < r; ++x) {
        const int s = cmp(eval(p, x + 1), eval(p, x));
        if (s == 0) continue;
        if (dir == 0) dir = s;
        ASSERT_EQ(s, dir) << p.to_string() << " piece [" << l << "," << r << "]";
      }
    }
  }
}

TEST(ExponentScan, CountsBoundedAndExcludesDiagonal) {
  auto p = P({1, 0, 1});
  const std::vector<std::int64_t> ns = {100, 1000, 10000};
  auto rep = exponent_scan(p, ns, 100, 42);
  ASSERT_EQ(rep.rows.size(), 3U);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.samples.size(), 100U);
    EXPECT_EQ(row.diagonal_count, static_cast<std::uint64_t>(row.n));
    for (const auto& s : row.samples) {
      EXPECT_NE(s.a, s.b);
      EXPECT_GE(s.a, 1);
      EXPECT_LE(s.a, row.n);
      for (const auto& pt : s.points) EXPECT_EQ(eval(p, pt.x) * s.a, eval(p, pt.y) * s.b);
    }
  }
  EXPECT_LE(rep.rows.back().max_count, 20U);
  auto again = exponent_scan(p, ns, 100, 42);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (std::size_t j = 0; j < 100; ++j) {
      EXPECT_EQ(again.rows[i].samples[j].a, rep.rows[i].samples[j].a);
      EXPECT_EQ(again.rows[i].samples[j].count, rep.rows[i].samples[j].count);
    }
  }
}

// Counts for a fixed (a, b) can only grow with the box. The maximum over
// fresh uniform draws from [1, N] tends to fall instead, because larger
// random a, b rarely admit solutions; the report exposes that flag as-is.
TEST(ExponentScan, FixedPairCountsGrowWithN) {
  auto p = P({1, 0, 1});
  for (auto [a, b] : std::vector<std::pair<std::int64_t, std::int64_t>>{{1, 2}, {2, 5}, {5, 2}, {3, 7}, {10, 1}}) {
    std::size_t prev = 0;
    for (std::int64_t n : {100LL, 1000LL, 10000LL, 100000LL}) {
      const auto c = integral_points(p, a, b, n).size();
      EXPECT_GE(c, prev);
      prev = c;
    }
  }
  const std::vector<std::int64_t> ns = {100, 1000, 10000};
  auto rep = exponent_scan(p, ns, 100, 42);
  bool nondecreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    nondecreasing = nondecreasing && rep.rows[i].max_count >= rep.rows[i - 1].max_count;
  }
  EXPECT_EQ(rep.max_nondecreasing, nondecreasing);
}

TEST(ExponentScan, ProductOfLinears) {
  auto p = P({0, 1, 1});
  EXPECT_EQ(as_pairs(integral_points(p, 2, 3, 1000)), oracle::curve_points(p, 2, 3, 1000));
}
