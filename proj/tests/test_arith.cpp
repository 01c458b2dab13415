#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rmfpoly/arith.hpp"

using namespace rmfpoly;

TEST(Arith, IsqrtExactAtBoundaries) {
  for (std::uint64_t r : {0ULL, 1ULL, 2ULL, 3037000499ULL, 4294967295ULL}) {
    const std::uint64_t sq = r * r;
    EXPECT_EQ(arith::isqrt(sq), r);
    if (sq > 0) {
      EXPECT_EQ(arith::isqrt(sq - 1), r - 1);
    }
  }
  EXPECT_EQ(arith::isqrt(UINT64_MAX), 4294967295ULL);
  const u128 big = static_cast<u128>(UINT64_MAX) * UINT64_MAX;
  EXPECT_EQ(arith::isqrt(big), UINT64_MAX);
  EXPECT_TRUE(arith::is_perfect_square(big));
  EXPECT_FALSE(arith::is_perfect_square(big - 1));
}

TEST(Arith, PrimesAndPrimality) {
  const auto ps = arith::primes_up_to(100000);
  EXPECT_EQ(ps.size(), 9592U);
  EXPECT_EQ(ps.back(), 99991U);
  std::vector<bool> is(100001, false);
  for (auto p : ps) is[p] = true;
  for (std::uint64_t n = 0; n <= 100000; ++n) ASSERT_EQ(arith::is_prime(n), is[n]) << n;
  EXPECT_TRUE(arith::is_prime(18446744073709551557ULL));  // largest 64-bit prime
  EXPECT_FALSE(arith::is_prime(3215031751ULL));           // strong pseudoprime to 2,3,5,7
  EXPECT_FALSE(arith::is_prime(4294967297ULL));           // 641 * 6700417
}

TEST(Arith, TrialFactorMatchesOracle) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 2000; ++t) {
    const std::uint64_t n = rng() % 10'000'000 + 1;
    const auto f = arith::trial_factor(n);
    const auto g = oracle::factor(n);
    ASSERT_EQ(f.size(), g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      EXPECT_EQ(f[i].prime, g[i].first);
      EXPECT_EQ(f[i].exponent, g[i].second);
    }
    EXPECT_EQ(arith::product(f), n);
  }
}

TEST(Arith, RhoFactorMatchesTrialDivision) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 3000; ++t) {
    const std::uint64_t n = t < 1500 ? rng() % 10'000'000'000ULL + 1 : rng() % 1'000'000'000'000ULL + 1;
    EXPECT_EQ(arith::rho_factor(n), arith::trial_factor(n)) << n;
  }
  const std::uint64_t p = 4294967291ULL, q = 4294967279ULL;  // primes near 2^32
  EXPECT_EQ(arith::rho_factor(p * q), (std::vector<PrimePower>{{q, 1}, {p, 1}}));
  EXPECT_EQ(arith::rho_factor(p * p), (std::vector<PrimePower>{{p, 2}}));
  EXPECT_EQ(arith::rho_factor(1000003ULL * 1000003ULL * 1000033ULL),
            (std::vector<PrimePower>{{1000003, 2}, {1000033, 1}}));
  EXPECT_EQ(arith::rho_factor(1), std::vector<PrimePower>{});
}

TEST(Arith, SquarefreeBigInt) {
  EXPECT_TRUE(arith::is_squarefree(BigInt(1)));
  EXPECT_TRUE(arith::is_squarefree(BigInt(30)));
  EXPECT_FALSE(arith::is_squarefree(BigInt(50)));
  // product of two large distinct primes vs. a large prime square
  BigInt p("1000000007"), q("998244353");
  EXPECT_TRUE(arith::is_squarefree(p * q));
  EXPECT_FALSE(arith::is_squarefree(p * p * 3));
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    ASSERT_EQ(arith::is_squarefree(BigInt(static_cast<unsigned long>(n))), oracle::squarefree(n)) << n;
  }
}

TEST(Arith, ProductOverflowThrows) {
  std::vector<PrimePower> f = {{4294967311ULL, 2}};
  EXPECT_THROW(arith::product(f), std::overflow_error);
}

TEST(Arith, ModularHelpers) {
  EXPECT_EQ(arith::powmod(2, 10, 1000), 24U);
  EXPECT_EQ(arith::powmod(3, 0, 7), 1U);
  EXPECT_EQ(arith::mulmod(UINT64_MAX, UINT64_MAX, 1000000007ULL),
            static_cast<std::uint64_t>(static_cast<u128>(UINT64_MAX) * UINT64_MAX % 1000000007ULL));
  EXPECT_EQ(arith::gcd(84, 36), 12U);
  EXPECT_EQ(arith::gcd(0, 5), 5U);
}
