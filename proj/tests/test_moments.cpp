#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rmfpoly/moments.hpp"

using namespace rmfpoly;

namespace {
IntPolynomial P(std::vector<std::int64_t> c) { return IntPolynomial(std::move(c)); }

std::vector<std::uint64_t> values_of(const IntPolynomial& p, std::uint64_t n) {
  std::vector<std::uint64_t> v;
  for (std::uint64_t m = 1; m <= n; ++m) v.push_back(arith::to_u64(eval(p, static_cast<std::int64_t>(m))));
  return v;
}

std::uint64_t pair_count_oracle(const std::vector<std::uint64_t>& v) {
  std::uint64_t c = 0;
  for (auto a : v) {
    for (auto b : v) c += (a == b && oracle::squarefree(a)) ? 1 : 0;
  }
  return c;
}

std::vector<PrimePower> fac(std::uint64_t n) { return arith::trial_factor(n); }
}  // namespace

TEST(Kernel, Examples) {
  EXPECT_EQ(pair_kernel(fac(6), fac(10)).value, 15U);
  EXPECT_EQ(pair_kernel(fac(30), fac(30)).value, 1U);
  EXPECT_EQ(pair_kernel(fac(2), fac(5)).value, 10U);
  EXPECT_EQ(pair_kernel(fac(1), fac(7)).value, 7U);
  auto t = ValueTable::from_values(P({1, 0, 1}), {6, 12});
  EXPECT_THROW(pair_kernel(t.record(1), t.record(2)), std::invalid_argument);
}

TEST(Kernel, EqualityMatchesSquarefreePart) {
  std::vector<std::uint64_t> sf;
  for (std::uint64_t n = 1; n <= 300; ++n) {
    if (oracle::squarefree(n)) sf.push_back(n);
  }
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20000; ++t) {
    auto a = sf[rng() % sf.size()], b = sf[rng() % sf.size()], c = sf[rng() % sf.size()], d = sf[rng() % sf.size()];
    const bool same = oracle::is_square(a * b * c * d);
    EXPECT_EQ(pair_kernel(fac(a), fac(b)) == pair_kernel(fac(c), fac(d)), same);
    EXPECT_EQ(pair_kernel(fac(a), fac(b)), pair_kernel(fac(b), fac(a)));
    const auto g = arith::gcd(a, b);
    EXPECT_EQ(pair_kernel(fac(a), fac(b)).value, static_cast<u128>(a / g) * (b / g));
    EXPECT_EQ(pair_gcd(fac(a), fac(b)), g);
  }
}

TEST(Kernel, LargeValuesStayExact) {
  const std::uint64_t p = 18446744073709551557ULL, q = 18446744073709551533ULL;
  auto k = pair_kernel(std::vector<PrimePower>{{p, 1}}, std::vector<PrimePower>{{q, 1}});
  EXPECT_EQ(k.value, static_cast<u128>(p) * q);
}

TEST(SecondMoment, Examples) {
  EXPECT_EQ(second_moment_exact(sieve_values(P({1, 0, 1}), 10)), 9U);
  auto t = sieve_values(P({10, -6, 1}), 5);  // 5,2,1,2,5
  EXPECT_EQ(second_moment_exact(t), 9U);
  EXPECT_EQ(second_moment_exact(t), pair_count_oracle({5, 2, 1, 2, 5}));
  auto inj = sieve_values(P({1, 0, 1}), 5000);
  EXPECT_EQ(second_moment_exact(inj), squarefree_count(inj));
}

TEST(FourthMoment, Examples) {
  auto t3 = sieve_values(P({1, 0, 1}), 3);
  auto f = fourth_moment_exact(t3);
  EXPECT_EQ(f.fourth, 21U);
  EXPECT_EQ(f.diagonal, 3U * 9 - 2 * 3);
  EXPECT_EQ(off_diagonal_count(t3), 0U);
  EXPECT_EQ(fourth_moment_exact(sieve_values(P({1, 0, 1}), 1)).fourth, 1U);
}

TEST(FourthMoment, InjectiveNoRelationTable) {
  // distinct primes: no nontrivial square products
  auto t = ValueTable::from_values(P({1, 0, 1}), {2, 3, 5, 7, 11, 13, 17});
  const std::uint64_t s = 7;
  auto f = fourth_moment_exact(t);
  EXPECT_EQ(f.fourth, 3 * s * s - 2 * s);
  EXPECT_EQ(f.off_diagonal, 0U);
}

TEST(FourthMoment, MatchesNaiveOracle) {
  for (const auto& p : {P({1, 0, 1}), P({0, 1, 1}), P({0, 2, 1})}) {
    const auto values = values_of(p, 60);
    const auto q = oracle::quadruples(values);
    auto full = sieve_values(p, 60);
    for (std::uint64_t n = 1; n <= 60; ++n) {
      auto t = ValueTable::from_values(p, std::vector<std::uint64_t>(values.begin(), values.begin() + n));
      auto f = fourth_moment_exact(t);
      ASSERT_EQ(f.fourth, q.fourth[n]) << p.to_string() << " N=" << n;
      ASSERT_EQ(f.diagonal, q.diagonal[n]) << p.to_string() << " N=" << n;
      ASSERT_EQ(f.fourth, f.diagonal + f.off_diagonal);
    }
    EXPECT_EQ(fourth_moment_exact(full).fourth, q.fourth[60]);
  }
}

TEST(FourthMoment, RandomSmallTables) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 40; ++t) {
    std::vector<std::uint64_t> v(static_cast<std::size_t>(rng() % 25 + 1));
    for (auto& x : v) x = rng() % 60 + 1;  // duplicates and relations are common
    auto table = ValueTable::from_values(P({1, 0, 1}), v);
    const auto q = oracle::quadruples(v);
    auto f = fourth_moment_exact(table, 1 + t % 3);
    ASSERT_EQ(f.fourth, q.fourth[v.size()]);
    ASSERT_EQ(f.diagonal, q.diagonal[v.size()]);
    ASSERT_EQ(second_moment_exact(table), pair_count_oracle(v));
  }
}

TEST(FourthMoment, ThreadsAgree) {
  auto t = sieve_values(P({0, 1, 1}), 3000);
  auto a = fourth_moment_exact(t, 1);
  auto b = fourth_moment_exact(t, 3);
  EXPECT_EQ(a.fourth, b.fourth);
  EXPECT_EQ(a.diagonal, b.diagonal);
  EXPECT_GE(a.fourth, a.diagonal);
}

TEST(OffDiagonal, SmallRatio) {
  auto t = sieve_values(P({1, 0, 1}), 1000);
  EXPECT_LT(static_cast<double>(off_diagonal_count(t)) / 1e6, 0.05);
}

TEST(McLeish, MatchesClassOracle) {
  std::mt19937_64 rng(33);
  std::vector<std::vector<std::uint64_t>> cases = {values_of(P({1, 0, 1}), 40), values_of(P({0, 1, 1}), 40),
                                                   values_of(P({10, -6, 1}), 30)};
  for (int t = 0; t < 20; ++t) {
    std::vector<std::uint64_t> v(static_cast<std::size_t>(rng() % 20 + 2));
    for (auto& x : v) x = rng() % 80 + 1;
    cases.push_back(v);
  }
  for (const auto& v : cases) {
    auto table = ValueTable::from_values(P({1, 0, 1}), v);
    const auto want = oracle::class_sums(v);
    const auto got = mcleish_condition_sums(table);
    ASSERT_EQ(got.class_second, want.second);
    ASSERT_EQ(got.class_fourth, want.fourth);
    ASSERT_EQ(got.class_cross, want.cross);
    const double e2 = static_cast<double>(second_moment_exact(table));
    if (e2 > 0) {
      EXPECT_DOUBLE_EQ(got.s2, static_cast<double>(want.second) / e2);
      EXPECT_DOUBLE_EQ(got.cross, static_cast<double>(want.cross) / (e2 * e2));
    }
  }
}

TEST(McLeish, InjectiveTablesHaveUnitS2) {
  for (std::uint64_t n : {100ULL, 1000ULL, 5000ULL}) {
    auto t = sieve_values(P({1, 0, 1}), n);
    auto m = mcleish_condition_sums(t);
    EXPECT_DOUBLE_EQ(m.s2, 1.0);
    EXPECT_EQ(static_cast<double>(m.class_second), m.s2 * static_cast<double>(second_moment_exact(t)));
  }
}

// The cross-term sum is not bounded by s2^2: quadruples pairing two classes
// with the same kernel add to E[M_p^2 M_q^2] beyond the product of variances.
TEST(McLeish, CrossExceedsS2SquaredForXSquaredPlusOne) {
  auto m = mcleish_condition_sums(sieve_values(P({1, 0, 1}), 1000));
  EXPECT_GT(m.cross, m.s2 * m.s2);
  EXPECT_LT(m.cross, 1.05);
}

TEST(McLeish, FourthSumDecreases) {
  auto a = mcleish_condition_sums(sieve_values(P({1, 0, 1}), 1000));
  auto b = mcleish_condition_sums(sieve_values(P({1, 0, 1}), 4000));
  EXPECT_LT(b.s4, a.s4);
}

TEST(GcdHistogram, Basics) {
  auto t = sieve_values(P({1, 0, 1}), 500);
  EXPECT_EQ(pair_gcd(t.factors(1), t.factors(3)), 2U);
  for (std::uint64_t n = 1; n <= 20; ++n) EXPECT_EQ(pair_gcd(t.factors(n), t.factors(n)), t.value(n));
  auto h = gcd_class_histogram(t, 50, 0, 0);
  EXPECT_TRUE(h.exhaustive);
  EXPECT_EQ(h.pairs, 500U * 500U);
  std::uint64_t total = 0, above = 0;
  for (const auto& [d, c] : h.counts) {
    total += c;
    if (d > 500) above += c;
  }
  EXPECT_EQ(total, h.pairs);
  EXPECT_EQ(above, h.above_n);
  auto s = gcd_class_histogram(t, 50, 20000, 1);
  EXPECT_FALSE(s.exhaustive);
  EXPECT_EQ(s.pairs, 20000U);
  EXPECT_NEAR(s.mass_above_n, h.mass_above_n, 0.01);
}

TEST(GcdHistogram, MassAboveNShrinks) {
  auto small = gcd_class_histogram(sieve_values(P({1, 0, 1}), 100), 10, 0, 0);
  auto large = gcd_class_histogram(sieve_values(P({1, 0, 1}), 500), 10, 0, 0);
  EXPECT_LT(large.mass_above_n, small.mass_above_n);
}

TEST(QuadrupleTrend, RatioDecreases) {
  const std::vector<std::uint64_t> ns = {500, 1000, 2000};
  auto t = quadruple_trend(P({1, 0, 1}), ns);
  ASSERT_EQ(t.rows.size(), 3U);
  EXPECT_TRUE(t.ratio_strictly_decreasing);
  for (const auto& r : t.rows) {
    EXPECT_DOUBLE_EQ(r.ratio, static_cast<double>(r.moments.off_diagonal) / static_cast<double>(r.n * r.n));
  }
}
