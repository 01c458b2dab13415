#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "rmfpoly/errors.hpp"
#include "rmfpoly/fluctuations.hpp"
#include "rmfpoly/seed.hpp"
#include "rmfpoly/stats.hpp"

using namespace rmfpoly;

namespace {
const IntPolynomial kQ({1, 0, 1});
}

TEST(Scales, Construction) {
  EXPECT_THROW(make_scales(1000, 1, ScaleMode::GeometricSurrogate, 1000000), std::invalid_argument);
  EXPECT_THROW(make_scales(15, 4, ScaleMode::GeometricSurrogate, 1000000), std::invalid_argument);
  // x_1 = 16^{(log 3)^2} fits, x_2 = 16^{2 (log 6)^2} ~ 5.5e7 does not at the default cap
  EXPECT_THROW(make_scales(16, 2, ScaleMode::PaperSchedule), InfeasibleScale);
  auto paper = make_scales(16, 2, ScaleMode::PaperSchedule, 100'000'000);
  const double l3 = std::log(3.0), l6 = std::log(6.0);
  EXPECT_EQ(paper.xs[0], static_cast<std::uint64_t>(std::llround(std::pow(16.0, l3 * l3))));
  EXPECT_EQ(paper.xs[1], static_cast<std::uint64_t>(std::llround(std::pow(16.0, 2 * l6 * l6))));

  auto g = make_scales(1000, 8, ScaleMode::GeometricSurrogate, 1000000);
  ASSERT_EQ(g.size(), 8U);
  EXPECT_EQ(g.xs.back(), 1000000U);
  const double r = std::pow(1000.0, 1.0 / 8);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_NEAR(static_cast<double>(g.xs[i]), 1000.0 * std::pow(r, static_cast<double>(i + 1)), 0.5);
    if (i) {
      EXPECT_GT(g.xs[i], g.xs[i - 1]);
    }
  }
  EXPECT_THROW(make_scales(1000, 2000, ScaleMode::GeometricSurrogate, 1010), DomainError);
  EXPECT_THROW(explicit_scales({5, 5}), DomainError);
}

TEST(PrimeSets, SmallEnumeration) {
  auto s = explicit_scales({10});
  auto table = sieve_values(kQ, 10);
  auto sets = build_prime_class_sets(s, table, 0.1, 0.0);
  EXPECT_EQ(sets.sets[0], (std::vector<std::uint64_t>{5, 13, 17, 37, 41, 101}));
  EXPECT_EQ(sets.scale_of(5), 0U);
  EXPECT_EQ(sets.scale_of(2), PrimeClassSets::npos);
  // without the floor, 5 divides 2^2 + 1 and 3^2 + 1 and 5^2 | 7^2 + 1
  auto check = check_set_properties(s, sets, table);
  EXPECT_FALSE(check.single_value_per_prime);
  EXPECT_FALSE(check.single_prime_per_value);
  // with the default floor every property holds
  auto floored = build_prime_class_sets(s, table, 0.1);
  EXPECT_EQ(floored.sets[0], (std::vector<std::uint64_t>{37, 41, 101}));
  EXPECT_TRUE(check_set_properties(s, floored, table).ok());
}

TEST(PrimeSets, InvariantsAgainstDirectEnumeration) {
  auto s = make_scales(100, 12, ScaleMode::GeometricSurrogate, 10000);
  auto table = sieve_values(kQ, 10000);
  auto sets = build_prime_class_sets(s, table);
  EXPECT_TRUE(check_set_properties(s, sets, table).ok());
  // direct definition: p in A_i iff p > T_i, p | n^2 + 1 for some n <= x_i, and for no m <= x_{i-1}
  std::map<std::uint64_t, std::uint64_t> first;
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    for (auto [p, e] : oracle::factor(n * n + 1)) first.emplace(p, n);
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::uint64_t prev = i == 0 ? 0 : s.xs[i - 1];
    std::vector<std::uint64_t> want;
    for (auto [p, n0] : first) {
      if (static_cast<double>(p) > sets.thresholds[i] && n0 <= s.xs[i] && n0 > prev) want.push_back(p);
    }
    ASSERT_EQ(sets.sets[i], want) << "scale " << i;
  }
}

TEST(PrimeSets, SizeRatioBracket) {
  auto s = make_scales(1000, 16, ScaleMode::GeometricSurrogate, 1000000);
  auto table = sieve_values(kQ, 1000000);
  auto sets = build_prime_class_sets(s, table);
  // Calibration bracket for |A_i| / x_i, pinned from a run at these
  // parameters: 0.575 at the first scale (which owns all of [1, x_1]) and
  // 0.239-0.242 afterwards.
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double ratio = static_cast<double>(sets.sets[i].size()) / static_cast<double>(s.xs[i]);
    EXPECT_GT(ratio, 0.2) << i;
    EXPECT_LT(ratio, 0.6) << i;
  }
}

TEST(ThreeSums, PartitionAndFastPathAgree) {
  auto s = make_scales(100, 10, ScaleMode::GeometricSurrogate, 20000);
  auto table = sieve_values(kQ, 20000);
  auto sets = build_prime_class_sets(s, table);
  LilOptions o;
  o.trials = 30;
  o.seed = 77;
  auto rep = lil_scan(s, o);
  EXPECT_TRUE(rep.partition_exact);
  EXPECT_TRUE(rep.residual_zero);
  EXPECT_TRUE(rep.sets_ok);
  for (std::uint64_t t = 0; t < o.trials; ++t) {
    RmfSampler f(seed::derive(o.seed, t), Model::Rademacher);
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto ts = three_sum_decomposition(f, s, sets, table, i);
      ASSERT_EQ(ts.s1 + ts.s2 + ts.s3, ts.total);
      std::int64_t m = 0;
      for (std::uint64_t n = 1; n <= s.xs[i]; ++n) m += rademacher_value(f, table.factors(n));
      ASSERT_EQ(ts.total, m);
      ASSERT_EQ(ts.s1, rep.s1[t][i]);
      if (i == 0) {
        ASSERT_EQ(ts.s2, 0);
      }
    }
  }
}

TEST(ThreeSums, S2SecondMoment) {
  auto s = make_scales(1000, 8, ScaleMode::GeometricSurrogate, 100000);
  LilOptions o;
  o.trials = 2000;
  o.seed = 3;
  auto rep = lil_scan(s, o);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const auto& row = rep.rows[i];
    ASSERT_GT(row.s2_var_exact, 0.0);
    EXPECT_NEAR(row.s2_var_hat / row.s2_var_exact, 1.0, 0.15) << i;
    EXPECT_GE(static_cast<double>(row.s2_support), row.s2_var_exact);
  }
  EXPECT_EQ(rep.rows[0].s2_var_exact, 0.0);
}

TEST(ThreeSums, ClassSumsUncorrelatedAcrossScales) {
  auto s = make_scales(1000, 8, ScaleMode::GeometricSurrogate, 100000);
  LilOptions o;
  o.trials = 2000;
  o.seed = 12;
  auto rep = lil_scan(s, o);
  const double tol = 3.0 / std::sqrt(2000.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      std::vector<double> a, b;
      for (const auto& row : rep.s1) {
        a.push_back(static_cast<double>(row[i]));
        b.push_back(static_cast<double>(row[j]));
      }
      EXPECT_LT(std::abs(stats::correlation(a, b)), tol) << i << "," << j;
    }
  }
  for (const auto& row : rep.rows) EXPECT_NEAR(row.beta_hat / row.beta_exact, 1.0, 0.15);
}

TEST(LilScan, SingleScaleSingleTrial) {
  auto s = explicit_scales({5000});
  LilOptions o;
  o.trials = 1;
  o.seed = 9;
  auto rep = lil_scan(s, o);
  ASSERT_EQ(rep.max_stat.size(), 1U);
  auto table = sieve_values(kQ, 5000);
  const auto m = rademacher_sum(RmfSampler(seed::derive(9, 0), Model::Rademacher), table);
  EXPECT_DOUBLE_EQ(rep.max_stat[0], std::abs(static_cast<double>(m)) / std::sqrt(5000.0 * std::log(std::log(5000.0))));
  EXPECT_DOUBLE_EQ(rep.rows[0].stat_max, rep.max_stat[0]);
}

TEST(LilScan, MaxGrowsWithScaleCount) {
  LilOptions o;
  o.trials = 300;
  o.seed = 1;
  auto few = lil_scan(make_scales(1000, 8, ScaleMode::GeometricSurrogate, 100000), o);
  auto many = lil_scan(make_scales(1000, 64, ScaleMode::GeometricSurrogate, 100000), o);
  EXPECT_GT(many.studentized_median, few.studentized_median);
}

TEST(LilScan, Deterministic) {
  LilOptions o;
  o.trials = 50;
  o.seed = 2;
  auto s = make_scales(100, 6, ScaleMode::GeometricSurrogate, 5000);
  auto a = lil_scan(s, o);
  o.threads = 3;
  auto b = lil_scan(s, o);
  EXPECT_EQ(a.s1, b.s1);
  EXPECT_EQ(a.max_stat, b.max_stat);
  ASSERT_EQ(a.exceed_fraction.size(), 3U);
}

TEST(LargestPrime, HalfExceedN) {
  auto t = sieve_values(kQ, 100000);
  EXPECT_GE(largest_prime_stats(t).proportion_gt_n, 0.5);
}
