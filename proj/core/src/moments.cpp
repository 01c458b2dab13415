#include "rmfpoly/moments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rmfpoly/seed.hpp"

namespace rmfpoly {

KernelKey pair_kernel(std::span<const PrimePower> a, std::span<const PrimePower> b) {
  u128 k = 1;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].prime == b[j].prime) {
      ++i;
      ++j;
    } else if (a[i].prime < b[j].prime) {
      k *= a[i++].prime;
    } else {
      k *= b[j++].prime;
    }
  }
  for (; i < a.size(); ++i) k *= a[i].prime;
  for (; j < b.size(); ++j) k *= b[j].prime;
  return {k};
}

KernelKey pair_kernel(const ValueRecord& a, const ValueRecord& b) {
  if (!a.is_squarefree || !b.is_squarefree) {
    throw std::invalid_argument("pair_kernel: both values must be squarefree");
  }
  return pair_kernel(a.factors, b.factors);
}

std::uint64_t pair_gcd(std::span<const PrimePower> a, std::span<const PrimePower> b) {
  std::uint64_t g = 1;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].prime == b[j].prime) {
      for (std::uint32_t e = 0; e < std::min(a[i].exponent, b[j].exponent); ++e) g *= a[i].prime;
      ++i;
      ++j;
    } else if (a[i].prime < b[j].prime) {
      ++i;
    } else {
      ++j;
    }
  }
  return g;
}

namespace {

std::vector<std::uint64_t> squarefree_indices(const ValueTable& table) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 1; n <= table.size(); ++n) {
    if (table.is_squarefree(n)) out.push_back(n);
  }
  return out;
}

// Q2 = sum m_v^2 and Q4 = sum m_v^4 over distinct squarefree values.
std::pair<std::uint64_t, std::uint64_t> value_multiplicity_moments(const ValueTable& table,
                                                                   std::span<const std::uint64_t> idx) {
  std::vector<std::uint64_t> vals;
  vals.reserve(idx.size());
  for (auto n : idx) vals.push_back(table.value(n));
  std::sort(vals.begin(), vals.end());
  std::uint64_t q2 = 0, q4 = 0;
  for (std::size_t i = 0; i < vals.size();) {
    std::size_t j = i;
    while (j < vals.size() && vals[j] == vals[i]) ++j;
    const std::uint64_t m = j - i;
    q2 += m * m;
    q4 += m * m * m * m;
    i = j;
  }
  return {q2, q4};
}

std::uint64_t bucket_of(u128 k, std::uint64_t buckets) {
  const auto lo = static_cast<std::uint64_t>(k);
  const auto hi = static_cast<std::uint64_t>(k >> 64U);
  return seed::mix64(lo ^ seed::mix64(hi)) % buckets;
}

// Counts pairs i < j restricted to kernels != 1 landing in `pass`; returns
// sum over those kernels of (2 u_mu)^2 and the number of kernel-1 pairs.
struct PassResult {
  std::uint64_t sum_sq = 0;
  std::uint64_t unit_pairs = 0;
};

PassResult run_pass(const ValueTable& table, std::span<const std::uint64_t> idx, std::uint64_t pass,
                    std::uint64_t passes) {
  std::vector<u128> keys;
  PassResult out;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto fi = table.factors(idx[i]);
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      const u128 k = pair_kernel(fi, table.factors(idx[j])).value;
      if (k == 1) {
        ++out.unit_pairs;
        continue;
      }
      if (passes == 1 || bucket_of(k, passes) == pass) keys.push_back(k);
    }
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    const std::uint64_t c = 2 * (j - i);
    out.sum_sq += c * c;
    i = j;
  }
  return out;
}

constexpr std::uint64_t kPairBudget = 1ULL << 23;

}  // namespace

std::uint64_t second_moment_exact(const ValueTable& table) {
  const auto idx = squarefree_indices(table);
  return value_multiplicity_moments(table, idx).first;
}

FourthMoment fourth_moment_exact(const ValueTable& table, unsigned threads) {
  const auto idx = squarefree_indices(table);
  const std::uint64_t s = idx.size();
  const auto [q2, q4] = value_multiplicity_moments(table, idx);

  const std::uint64_t pairs = s * (s - (s > 0 ? 1 : 0)) / 2;
  std::uint64_t passes = std::max<std::uint64_t>(1, (pairs + kPairBudget - 1) / kPairBudget);
  if (threads > 1 && pairs > kPairBudget / 8) passes = std::max<std::uint64_t>(passes, threads);

  std::vector<PassResult> results(passes);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t r; (r = next.fetch_add(1)) < passes;) results[r] = run_pass(table, idx, r, passes);
  };
  const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(passes)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  FourthMoment out;
  for (const auto& r : results) out.fourth += r.sum_sq;
  const std::uint64_t c1 = 2 * results.front().unit_pairs + s;
  out.fourth += c1 * c1;
  // three pairings each contribute Q2^2; any two pairings force all four equal
  out.diagonal = 3 * q2 * q2 - 2 * q4;
  out.off_diagonal = out.fourth - out.diagonal;
  return out;
}

std::uint64_t off_diagonal_count(const ValueTable& table, unsigned threads) {
  return fourth_moment_exact(table, threads).off_diagonal;
}

McLeishSums mcleish_condition_sums(const ValueTable& table) {
  auto idx = squarefree_indices(table);
  std::stable_sort(idx.begin(), idx.end(), [&](std::uint64_t x, std::uint64_t y) {
    return table.largest_prime_or_one(x) < table.largest_prime_or_one(y);
  });

  McLeishSums out;
  out.second_moment = second_moment_exact(table);

  struct Entry {
    u128 kernel;
    std::uint64_t count;
  };
  std::vector<Entry> entries;
  std::vector<u128> keys;
  std::vector<std::uint64_t> class_values;
  for (std::size_t lo = 0; lo < idx.size();) {
    std::size_t hi = lo;
    const std::uint64_t cls = table.largest_prime_or_one(idx[lo]);
    while (hi < idx.size() && table.largest_prime_or_one(idx[hi]) == cls) ++hi;
    const std::uint64_t size = hi - lo;
    ++out.classes;

    class_values.clear();
    for (std::size_t i = lo; i < hi; ++i) class_values.push_back(table.value(idx[i]));
    std::sort(class_values.begin(), class_values.end());
    for (std::size_t i = 0; i < class_values.size();) {
      std::size_t j = i;
      while (j < class_values.size() && class_values[j] == class_values[i]) ++j;
      out.class_second += (j - i) * (j - i);
      i = j;
    }

    keys.clear();
    std::uint64_t unit_pairs = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = i + 1; j < hi; ++j) {
        const u128 k = pair_kernel(table.factors(idx[i]), table.factors(idx[j])).value;
        if (k == 1) {
          ++unit_pairs;
        } else {
          keys.push_back(k);
        }
      }
    }
    std::sort(keys.begin(), keys.end());
    entries.push_back({1, 2 * unit_pairs + size});
    for (std::size_t i = 0; i < keys.size();) {
      std::size_t j = i;
      while (j < keys.size() && keys[j] == keys[i]) ++j;
      entries.push_back({keys[i], 2 * (j - i)});
      i = j;
    }
    lo = hi;
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.kernel < b.kernel; });
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    std::uint64_t sum = 0, sum_sq = 0;
    for (; j < entries.size() && entries[j].kernel == entries[i].kernel; ++j) {
      sum += entries[j].count;
      sum_sq += entries[j].count * entries[j].count;
    }
    out.class_fourth += sum_sq;
    out.class_cross += sum * sum - sum_sq;
    i = j;
  }

  if (out.second_moment > 0) {
    const double e2 = static_cast<double>(out.second_moment);
    out.s2 = static_cast<double>(out.class_second) / e2;
    out.s4 = static_cast<double>(out.class_fourth) / (e2 * e2);
    out.cross = static_cast<double>(out.class_cross) / (e2 * e2);
  }
  return out;
}

MomentReport moment_report(const ValueTable& table, unsigned threads) {
  MomentReport r;
  r.n = table.size();
  r.sf_count = squarefree_count(table);
  r.second_moment = second_moment_exact(table);
  r.fourth = fourth_moment_exact(table, threads);
  r.mcleish = mcleish_condition_sums(table);
  return r;
}

GcdHistogram gcd_class_histogram(const ValueTable& table, std::uint64_t d_threshold, std::uint64_t samples,
                                 std::uint64_t seed) {
  GcdHistogram h;
  h.d_threshold = d_threshold;
  const std::uint64_t n = table.size();
  auto add = [&](std::uint64_t n1, std::uint64_t n2) {
    const std::uint64_t g = pair_gcd(table.factors(n1), table.factors(n2));
    ++h.counts[g];
    if (g > d_threshold) ++h.above_d;
    if (g > n) ++h.above_n;
    ++h.pairs;
  };
  if (samples == 0) {
    h.exhaustive = true;
    for (std::uint64_t a = 1; a <= n; ++a) {
      for (std::uint64_t b = 1; b <= n; ++b) add(a, b);
    }
  } else {
    seed::Stream rng(seed::derive(seed, 0));
    for (std::uint64_t s = 0; s < samples; ++s) {
      const std::uint64_t a = rng.uniform_below(n) + 1;
      const std::uint64_t b = rng.uniform_below(n) + 1;
      add(a, b);
    }
  }
  h.mass_above_d = static_cast<double>(h.above_d) / static_cast<double>(h.pairs);
  h.mass_above_n = static_cast<double>(h.above_n) / static_cast<double>(h.pairs);
  return h;
}

QuadrupleTrend quadruple_trend(const IntPolynomial& p, std::span<const std::uint64_t> ns, unsigned threads) {
  QuadrupleTrend t;
  for (std::uint64_t n : ns) {
    const ValueTable table = sieve_values(p, n, threads);
    QuadrupleRow row;
    row.n = n;
    row.moments = fourth_moment_exact(table, threads);
    row.ratio = static_cast<double>(row.moments.off_diagonal) / (static_cast<double>(n) * static_cast<double>(n));
    t.rows.push_back(row);
  }
  t.ratio_strictly_decreasing = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    t.ratio_strictly_decreasing = t.ratio_strictly_decreasing && t.rows[i].ratio < t.rows[i - 1].ratio;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (const auto& r : t.rows) {
    if (r.moments.off_diagonal == 0) continue;
    const double x = std::log(static_cast<double>(r.n));
    const double y = std::log(static_cast<double>(r.moments.off_diagonal));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1;
  }
  if (m >= 2 && (m * sxx - sx * sx) != 0) t.loglog_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return t;
}

}  // namespace rmfpoly
