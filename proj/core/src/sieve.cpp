#include "rmfpoly/sieve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "rmfpoly/errors.hpp"

namespace rmfpoly {

ValueTable::ValueTable(IntPolynomial poly, std::vector<std::uint64_t> values, std::vector<std::size_t> offsets,
                       std::vector<PrimePower> factors)
    : poly_(std::move(poly)), values_(std::move(values)), offsets_(std::move(offsets)), factors_(std::move(factors)) {
  if (offsets_.size() != values_.size() + 1) throw std::invalid_argument("ValueTable: offsets size mismatch");
  squarefree_.resize(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == 0) throw std::invalid_argument("ValueTable: values must be >= 1");
    bool sf = true;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) sf = sf && factors_[k].exponent == 1;
    squarefree_[i] = sf ? 1 : 0;
  }
}

ValueTable ValueTable::from_values(IntPolynomial poly, std::vector<std::uint64_t> values) {
  std::vector<std::size_t> offsets{0};
  std::vector<PrimePower> factors;
  for (auto v : values) {
    if (v == 0) throw std::invalid_argument("ValueTable: values must be >= 1");
    for (const auto& f : arith::trial_factor(v)) factors.push_back(f);
    offsets.push_back(factors.size());
  }
  return ValueTable(std::move(poly), std::move(values), std::move(offsets), std::move(factors));
}

ValueRecord ValueTable::record(std::uint64_t n) const {
  if (n == 0 || n > values_.size()) throw std::out_of_range("ValueTable::record: n out of range");
  ValueRecord rec;
  rec.n = n;
  rec.value = values_[n - 1];
  rec.factors = factors(n);
  rec.is_squarefree = is_squarefree(n);
  if (!rec.factors.empty()) rec.largest_prime = rec.factors.back().prime;
  return rec;
}

namespace {

constexpr std::uint64_t kBlock = 1U << 15;
constexpr std::uint64_t kMinSieveLimit = 1U << 16;

struct RootTable {
  std::uint64_t limit = 1;
  std::vector<std::uint64_t> primes;
  std::vector<std::size_t> offsets;  // into roots
  std::vector<std::uint64_t> roots;
  std::vector<std::uint8_t> all_residues;  // p divides every coefficient
};

RootTable build_roots(const IntPolynomial& p, std::uint64_t limit, std::uint64_t n) {
  RootTable t;
  t.limit = std::max<std::uint64_t>(limit, 1);
  t.primes = arith::primes_up_to(limit);
  t.offsets.reserve(t.primes.size() + 1);
  t.offsets.push_back(0);
  std::uint64_t content = 0;
  for (auto c : p.coeffs()) content = arith::gcd(content, static_cast<std::uint64_t>(c < 0 ? -static_cast<i128>(c) : c));
  for (std::uint64_t prime : t.primes) {
    const bool all = content % prime == 0;
    t.all_residues.push_back(all ? 1 : 0);
    if (!all) {
      for (std::uint64_t r : roots_mod_prime(p, prime)) {
        const std::uint64_t first = r == 0 ? prime : r;
        if (first <= n) t.roots.push_back(r);
      }
    }
    t.offsets.push_back(t.roots.size());
  }
  return t;
}

struct Hit {
  std::uint32_t local;
  std::uint32_t exponent;
  std::uint64_t prime;
};

struct BlockResult {
  std::vector<std::size_t> counts;  // factors per n in block
  std::vector<PrimePower> factors;
};

BlockResult sieve_block(const RootTable& roots, const std::vector<std::uint64_t>& values, std::uint64_t lo,
                        std::uint64_t hi) {
  const std::size_t len = hi - lo + 1;
  std::vector<std::uint64_t> residual(values.begin() + static_cast<std::ptrdiff_t>(lo - 1),
                                      values.begin() + static_cast<std::ptrdiff_t>(hi));
  std::vector<Hit> hits;
  auto strike = [&](std::uint64_t n, std::uint64_t prime) {
    std::uint64_t& r = residual[n - lo];
    std::uint32_t e = 0;
    while (r % prime == 0) {
      r /= prime;
      ++e;
    }
    if (e > 0) hits.push_back({static_cast<std::uint32_t>(n - lo), e, prime});
  };
  for (std::size_t i = 0; i < roots.primes.size(); ++i) {
    const std::uint64_t prime = roots.primes[i];
    if (roots.all_residues[i]) {
      for (std::uint64_t n = lo; n <= hi; ++n) strike(n, prime);
      continue;
    }
    const std::uint64_t lo_mod = lo % prime;
    for (std::size_t k = roots.offsets[i]; k < roots.offsets[i + 1]; ++k) {
      const std::uint64_t r = roots.roots[k];
      std::uint64_t n = lo + (r + prime - lo_mod) % prime;
      for (; n <= hi; n += prime) strike(n, prime);
    }
  }
  // cofactors have no prime factor <= limit; below limit^2 they are prime
  std::vector<std::vector<PrimePower>> rest(len);
  for (std::size_t j = 0; j < len; ++j) {
    const std::uint64_t r = residual[j];
    if (r <= 1) continue;
    if (r / roots.limit < roots.limit) {
      rest[j].push_back({r, 1});
    } else {
      rest[j] = arith::rho_factor(r);
    }
  }
  BlockResult out;
  out.counts.assign(len, 0);
  for (const auto& h : hits) ++out.counts[h.local];
  for (std::size_t j = 0; j < len; ++j) out.counts[j] += rest[j].size();
  std::vector<std::size_t> start(len + 1, 0);
  for (std::size_t j = 0; j < len; ++j) start[j + 1] = start[j] + out.counts[j];
  out.factors.resize(start[len]);
  std::vector<std::size_t> cursor(start.begin(), start.end() - 1);
  // hits are generated in ascending prime order, so per-n order is ascending
  for (const auto& h : hits) out.factors[cursor[h.local]++] = {h.prime, h.exponent};
  for (std::size_t j = 0; j < len; ++j) {
    for (const auto& f : rest[j]) out.factors[cursor[j]++] = f;
  }
  return out;
}

}  // namespace

ValueTable sieve_values(const IntPolynomial& p, std::uint64_t n, unsigned threads) {
  if (n == 0) throw std::invalid_argument("sieve_values: N must be positive");
  std::vector<std::uint64_t> values(n);
  std::uint64_t max_value = 1;
  for (std::uint64_t k = 1; k <= n; ++k) {
    auto v = eval_i128(p, static_cast<std::int64_t>(k));
    if (v && *v <= 0) {
      throw DomainError("P(" + std::to_string(k) + ") = " + eval(p, static_cast<std::int64_t>(k)).get_str() +
                        " is not positive; shift the polynomial (x -> x + c) so that P(n) >= 1 on [1, N]");
    }
    if (!v || *v > static_cast<i128>(UINT64_MAX)) {
      throw DomainError("P(" + std::to_string(k) + ") exceeds 64 bits; reduce N");
    }
    values[k - 1] = static_cast<std::uint64_t>(*v);
    max_value = std::max(max_value, values[k - 1]);
  }

  // Roots are only needed for primes up to N; larger factors are split off the
  // cofactor, which has only a few prime factors.
  const std::uint64_t limit = std::min(arith::isqrt(max_value), std::max<std::uint64_t>(n, kMinSieveLimit));
  const RootTable roots = build_roots(p, limit, n);

  const std::uint64_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<BlockResult> results(blocks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t b; (b = next.fetch_add(1)) < blocks;) {
      const std::uint64_t lo = b * kBlock + 1;
      const std::uint64_t hi = std::min(n, lo + kBlock - 1);
      results[b] = sieve_block(roots, values, lo, hi);
    }
  };
  const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<std::size_t> offsets{0};
  offsets.reserve(n + 1);
  std::vector<PrimePower> factors;
  std::size_t total = 0;
  for (const auto& r : results) total += r.factors.size();
  factors.reserve(total);
  for (auto& r : results) {
    for (std::size_t c : r.counts) offsets.push_back(offsets.back() + c);
    factors.insert(factors.end(), r.factors.begin(), r.factors.end());
    r = BlockResult{};
  }
  return ValueTable(p, std::move(values), std::move(offsets), std::move(factors));
}

std::uint64_t squarefree_count(const ValueTable& table) {
  std::uint64_t count = 0;
  for (std::uint64_t n = 1; n <= table.size(); ++n) count += table.is_squarefree(n) ? 1 : 0;
  return count;
}

double kappa_euler(const IntPolynomial& p, std::uint64_t prime_bound) {
  if (!is_admissible(p)) {
    throw DomainError("polynomial " + p.to_string() + " is not admissible: a prime square divides every value");
  }
  long double product = 1.0L;
  for (std::uint64_t prime : arith::primes_up_to(prime_bound)) {
    const std::uint64_t rho = count_roots_prime_square(p, prime);
    if (rho == 0) continue;
    const long double p2 = static_cast<long double>(prime) * static_cast<long double>(prime);
    product *= 1.0L - static_cast<long double>(rho) / p2;
  }
  return static_cast<double>(product);
}

LargestPrimeStats largest_prime_stats(const ValueTable& table, double c, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("largest_prime_stats: bins must be positive");
  LargestPrimeStats s;
  s.n = table.size();
  s.c = c;
  s.hist_lo = 0.0;
  s.hist_hi = std::max(2.0, static_cast<double>(table.polynomial().degree()) + 1.0);
  s.hist_counts.assign(bins, 0);
  std::uint64_t gt_n = 0;
  std::uint64_t gt_nlogn = 0;
  std::uint64_t hist_total = 0;
  double ratio_sum = 0.0;
  for (std::uint64_t n = 1; n <= table.size(); ++n) {
    const std::uint64_t lp = table.largest_prime_or_one(n);
    if (lp == 1) continue;
    const double nd = static_cast<double>(n);
    if (lp > n) ++gt_n;
    if (static_cast<double>(lp) > c * nd * std::log(nd)) ++gt_nlogn;
    if (n >= 2) {
      const double ratio = std::log(static_cast<double>(lp)) / std::log(nd);
      auto bin = static_cast<std::size_t>((ratio - s.hist_lo) / (s.hist_hi - s.hist_lo) * static_cast<double>(bins));
      s.hist_counts[std::min(bin, bins - 1)] += 1;
      ratio_sum += ratio;
      ++hist_total;
    }
  }
  s.proportion_gt_n = static_cast<double>(gt_n) / static_cast<double>(s.n);
  s.proportion_gt_nlogn = static_cast<double>(gt_nlogn) / static_cast<double>(s.n);
  s.mean_log_ratio = hist_total ? ratio_sum / static_cast<double>(hist_total) : 0.0;
  return s;
}

std::uint64_t smooth_count(std::uint64_t x, std::uint64_t y) {
  if (x < 2 || y < 2) throw std::invalid_argument("smooth_count: x, y must be >= 2");
  if (y >= x) return x;
  const auto primes = arith::primes_up_to(y);
  std::vector<std::uint64_t> residual(kBlock);
  std::uint64_t count = 0;
  for (std::uint64_t lo = 1; lo <= x; lo += kBlock) {
    const std::uint64_t hi = std::min(x, lo + kBlock - 1);
    for (std::uint64_t m = lo; m <= hi; ++m) residual[m - lo] = m;
    for (std::uint64_t p : primes) {
      for (std::uint64_t m = (lo + p - 1) / p * p; m <= hi; m += p) {
        std::uint64_t& r = residual[m - lo];
        while (r % p == 0) r /= p;
      }
    }
    for (std::uint64_t m = lo; m <= hi; ++m) count += residual[m - lo] == 1 ? 1 : 0;
  }
  return count;
}

}  // namespace rmfpoly
