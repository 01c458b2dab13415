#include "rmfpoly/fluctuations.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "rmfpoly/errors.hpp"
#include "rmfpoly/seed.hpp"
#include "rmfpoly/stats.hpp"

namespace rmfpoly {

std::string_view to_string(ScaleMode m) {
  switch (m) {
    case ScaleMode::PaperSchedule: return "paper";
    case ScaleMode::GeometricSurrogate: return "geometric";
    case ScaleMode::Explicit: break;
  }
  return "explicit";
}

namespace {

void require_increasing(const std::vector<std::uint64_t>& xs) {
  if (xs.empty()) throw std::invalid_argument("scale set is empty");
  if (xs.front() < 1) throw std::invalid_argument("scales must be positive");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] <= xs[i - 1]) throw DomainError("scales are not strictly increasing; raise the cap or lower k");
  }
}

double log_safe(double x) { return std::log(std::max(x, 1.0)); }

// log log x, floored so the normalization stays positive at tiny x.
double loglog(double x) { return std::max(std::log(log_safe(x)), 1.0); }

}  // namespace

ScaleSet make_scales(std::uint64_t base, std::size_t k, ScaleMode mode, std::uint64_t cap) {
  if (base < 16) throw std::invalid_argument("base scale X must be at least 16");
  if (k < 2) throw std::invalid_argument("need at least two scales");
  ScaleSet s;
  s.mode = mode;
  s.base = base;
  s.cap = cap;
  const double lx = std::log(static_cast<double>(base));
  if (mode == ScaleMode::PaperSchedule) {
    for (std::size_t i = 1; i <= k; ++i) {
      const double li = std::log(3.0 * static_cast<double>(i));
      const double lxi = static_cast<double>(i) * li * li * lx;
      if (lxi > std::log(static_cast<double>(cap))) {
        throw InfeasibleScale("scale x_" + std::to_string(i) + " = exp(" + std::to_string(lxi) +
                              ") exceeds the cap " + std::to_string(cap));
      }
      s.xs.push_back(static_cast<std::uint64_t>(std::llround(std::exp(lxi))));
    }
  } else if (mode == ScaleMode::GeometricSurrogate) {
    if (cap <= base) throw std::invalid_argument("cap must exceed the base scale");
    const double lr = (std::log(static_cast<double>(cap)) - lx) / static_cast<double>(k);
    for (std::size_t i = 1; i <= k; ++i) {
      s.xs.push_back(i == k ? cap : static_cast<std::uint64_t>(std::llround(std::exp(lx + lr * static_cast<double>(i)))));
    }
  } else {
    throw std::invalid_argument("explicit scales need explicit_scales()");
  }
  require_increasing(s.xs);
  return s;
}

ScaleSet explicit_scales(std::vector<std::uint64_t> xs) {
  require_increasing(xs);
  ScaleSet s;
  s.mode = ScaleMode::Explicit;
  s.base = xs.front();
  s.cap = xs.back();
  s.xs = std::move(xs);
  return s;
}

std::size_t PrimeClassSets::scale_of(std::uint64_t prime) const {
  auto it = std::lower_bound(index_.begin(), index_.end(), prime,
                             [](const auto& e, std::uint64_t p) { return e.first < p; });
  return it != index_.end() && it->first == prime ? it->second : npos;
}

PrimeClassSets build_prime_class_sets(const ScaleSet& scales, const ValueTable& table, double c, double floor) {
  if (table.size() < scales.largest()) throw std::invalid_argument("value table shorter than the largest scale");
  PrimeClassSets out;
  out.c = c;
  out.floor = floor;
  const std::size_t k = scales.size();
  out.sets.resize(k);
  for (std::uint64_t x : scales.xs) {
    const auto xd = static_cast<double>(x);
    out.thresholds.push_back(std::max(c * xd * log_safe(xd), floor * xd));
  }
  const double t_min = *std::min_element(out.thresholds.begin(), out.thresholds.end());

  // first n at which each large prime appears
  std::unordered_map<std::uint64_t, std::uint64_t> first;
  for (std::uint64_t n = 1; n <= scales.largest(); ++n) {
    for (const auto& pp : table.factors(n)) {
      if (static_cast<double>(pp.prime) > t_min) first.emplace(pp.prime, n);
    }
  }
  for (const auto& [p, n0] : first) {
    const auto i = static_cast<std::size_t>(std::lower_bound(scales.xs.begin(), scales.xs.end(), n0) - scales.xs.begin());
    if (static_cast<double>(p) > out.thresholds[i]) out.sets[i].push_back(p);
  }
  for (std::size_t i = 0; i < k; ++i) {
    std::sort(out.sets[i].begin(), out.sets[i].end());
    for (std::uint64_t p : out.sets[i]) out.index_.emplace_back(p, static_cast<std::uint32_t>(i));
  }
  std::sort(out.index_.begin(), out.index_.end());
  return out;
}

SetPropertyCheck check_set_properties(const ScaleSet& scales, const PrimeClassSets& sets, const ValueTable& table) {
  SetPropertyCheck r;
  const IntPolynomial q({1, 0, 1});
  std::vector<std::uint64_t> all;
  for (std::size_t i = 0; i < sets.sets.size(); ++i) {
    const auto xi = static_cast<double>(scales.xs[i]);
    const std::uint64_t prev = i == 0 ? 0 : scales.xs[i - 1];
    for (std::uint64_t p : sets.sets[i]) {
      all.push_back(p);
      if (!(static_cast<double>(p) > sets.c * xi * std::log(xi))) r.above_threshold = false;
      // the n with p | n^2 + 1 are exactly the residues +-r mod p
      const auto roots = roots_mod_prime(q, p);
      std::uint64_t smallest = UINT64_MAX, hits = 0;
      for (std::uint64_t root : roots) {
        const std::uint64_t n0 = root == 0 ? p : root;
        smallest = std::min(smallest, n0);
        if (n0 <= scales.xs[i]) hits += 1 + (scales.xs[i] - n0) / p;
      }
      if (smallest <= prev) r.fresh = false;
      if (smallest > scales.xs[i]) r.attained = false;
      if (hits > 1) r.single_value_per_prime = false;
    }
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) r.disjoint = false;

  // For each n, count A_i primes per scale i with n <= x_i.
  for (std::uint64_t n = 1; n <= scales.largest() && r.single_prime_per_value; ++n) {
    std::vector<std::size_t> seen;
    for (const auto& pp : table.factors(n)) {
      const std::size_t i = sets.scale_of(pp.prime);
      if (i == PrimeClassSets::npos || n > scales.xs[i]) continue;
      if (pp.exponent > 1 || std::find(seen.begin(), seen.end(), i) != seen.end()) {
        r.single_prime_per_value = false;
        break;
      }
      seen.push_back(i);
    }
  }
  return r;
}

ThreeSums three_sum_decomposition(const RmfSampler& f, const ScaleSet& scales, const PrimeClassSets& sets,
                                  const ValueTable& table, std::size_t i) {
  if (i >= scales.size()) throw std::invalid_argument("scale index out of range");
  ThreeSums s;
  for (std::uint64_t n = 1; n <= scales.xs[i]; ++n) {
    const auto fac = table.factors(n);
    const int v = rademacher_value(f, fac);
    s.total += v;
    bool any = false, earlier = false;
    unsigned own = 0, own_exp = 0;
    for (const auto& pp : fac) {
      const std::size_t j = sets.scale_of(pp.prime);
      if (j == PrimeClassSets::npos) continue;
      any = true;
      if (j < i) earlier = true;
      if (j == i) {
        ++own;
        own_exp = pp.exponent;
      }
    }
    if (!any) {
      s.s3 += v;
    } else if (earlier) {
      s.s2 += v;
    } else if (own == 1 && own_exp == 1) {
      s.s1 += v;
    }
  }
  return s;
}

namespace {

enum : std::uint8_t { kNone = 0, kSingle = 1, kEarlier = 2, kResidual = 3 };

struct TermLayout {
  std::vector<std::uint16_t> scale;  // first i with n <= x_i
  std::vector<std::uint8_t> kind;
  std::vector<std::uint16_t> s2_start;
};

}  // namespace

FluctuationReport lil_scan(const ScaleSet& scales, const LilOptions& opt) {
  if (opt.trials == 0) throw std::invalid_argument("trials must be positive");
  const std::size_t k = scales.size();
  if (k > 65535) throw std::invalid_argument("too many scales");
  const std::uint64_t xk = scales.largest();
  const ValueTable table = sieve_values(IntPolynomial({1, 0, 1}), xk, opt.threads);
  const PrimeClassSets sets = build_prime_class_sets(scales, table, opt.c, opt.floor);

  FluctuationReport rep;
  rep.scales = scales;
  rep.trials = opt.trials;
  rep.seed = opt.seed;
  rep.c = opt.c;
  rep.floor = opt.floor;
  rep.sets_ok = check_set_properties(scales, sets, table).ok();
  rep.thresholds = opt.thresholds;

  // Classify each n once. With the threshold floor, an A-prime dividing
  // n^2+1 has scale at most j(n); S2 picks n up from start(n) onwards.
  TermLayout lay;
  lay.scale.resize(xk + 1);
  lay.kind.resize(xk + 1);
  lay.s2_start.resize(xk + 1);
  rep.rows.resize(k);
  std::vector<std::uint64_t> sf_single(k, 0), s2_support_start(k + 1, 0), s2_sf_start(k + 1, 0);
  std::size_t j = 0;
  for (std::uint64_t n = 1; n <= xk; ++n) {
    while (scales.xs[j] < n) ++j;
    lay.scale[n] = static_cast<std::uint16_t>(j);
    std::size_t min_a = PrimeClassSets::npos;
    unsigned count = 0, exp = 0;
    for (const auto& pp : table.factors(n)) {
      const std::size_t a = sets.scale_of(pp.prime);
      if (a == PrimeClassSets::npos) continue;
      min_a = std::min(min_a, a);
      ++count;
      exp = pp.exponent;
    }
    std::uint8_t kind = kNone;
    if (min_a != PrimeClassSets::npos) {
      kind = min_a < j ? kEarlier : (count == 1 && exp == 1 ? kSingle : kResidual);
      if (kind == kResidual) rep.residual_zero = false;
      if (min_a > j) throw std::logic_error("A-prime of a later scale divides an earlier value");
      const std::size_t start = min_a < j ? j : j + 1;
      lay.s2_start[n] = static_cast<std::uint16_t>(start);
      ++s2_support_start[start];
      if (table.is_squarefree(n)) ++s2_sf_start[start];
      if (kind == kSingle && table.is_squarefree(n)) ++sf_single[j];
    }
    lay.kind[n] = kind;
  }
  std::uint64_t support = 0, support_sf = 0;
  for (std::size_t i = 0; i < k; ++i) {
    support += s2_support_start[i];
    support_sf += s2_sf_start[i];
    auto& row = rep.rows[i];
    row.x = scales.xs[i];
    const auto xd = static_cast<double>(row.x);
    row.threshold = sets.thresholds[i];
    row.set_size = sets.sets[i].size();
    row.set_ratio = static_cast<double>(row.set_size) / xd;
    row.beta_exact = static_cast<double>(sf_single[i]) / xd;
    row.s2_support = support;
    row.s2_var_exact = static_cast<double>(support_sf);
  }

  // Per-trial pass.
  rep.s1.assign(opt.trials, std::vector<std::int64_t>(k, 0));
  std::vector<std::vector<double>> stat(opt.trials, std::vector<double>(k, 0.0));
  std::vector<std::vector<std::int64_t>> s2(opt.trials, std::vector<std::int64_t>(k, 0));
  std::vector<double> good(opt.trials, 0.0);
  std::vector<std::uint8_t> exact(opt.trials, 1);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    std::vector<std::int64_t> d_m(k + 1), d_s2(k + 1), d_s3(k + 1), res(k);
    for (std::uint64_t t; (t = next.fetch_add(1)) < opt.trials;) {
      std::fill(d_m.begin(), d_m.end(), 0);
      std::fill(d_s2.begin(), d_s2.end(), 0);
      std::fill(d_s3.begin(), d_s3.end(), 0);
      std::fill(res.begin(), res.end(), 0);
      auto& s1 = rep.s1[t];
      const RmfSampler f(seed::derive(opt.seed, t), Model::Rademacher);
      for (std::uint64_t n = 1; n <= xk; ++n) {
        if (!table.is_squarefree(n)) continue;
        const int v = rademacher_value(f, table.factors(n));
        const std::size_t sc = lay.scale[n];
        d_m[sc] += v;
        switch (lay.kind[n]) {
          case kNone: d_s3[sc] += v; break;
          case kSingle: s1[sc] += v; d_s2[lay.s2_start[n]] += v; break;
          case kEarlier: d_s2[lay.s2_start[n]] += v; break;
          default: res[sc] += v; d_s2[lay.s2_start[n]] += v; break;
        }
      }
      std::int64_t m = 0, a2 = 0, a3 = 0;
      unsigned good_count = 0;
      for (std::size_t i = 0; i < k; ++i) {
        m += d_m[i];
        a2 += d_s2[i];
        a3 += d_s3[i];
        s2[t][i] = a2;
        if (s1[i] + a2 + a3 + res[i] != m || res[i] != 0) exact[t] = 0;
        const auto xd = static_cast<double>(scales.xs[i]);
        stat[t][i] = std::abs(static_cast<double>(m)) / std::sqrt(xd * loglog(xd));
        const double bound = std::sqrt(xd) * std::pow(loglog(xd), 0.01);
        if (std::abs(static_cast<double>(a2)) <= bound && std::abs(static_cast<double>(a3)) <= bound) ++good_count;
      }
      good[t] = static_cast<double>(good_count) / static_cast<double>(k);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < std::max(1U, opt.threads); ++i) pool.emplace_back(worker);
    worker();
  }

  const auto trials = static_cast<double>(opt.trials);
  for (std::uint8_t e : exact) rep.partition_exact = rep.partition_exact && e != 0;
  for (std::size_t i = 0; i < k; ++i) {
    auto& row = rep.rows[i];
    std::vector<double> col(opt.trials), s1col(opt.trials);
    double s2sq = 0.0;
    for (std::uint64_t t = 0; t < opt.trials; ++t) {
      col[t] = stat[t][i];
      s1col[t] = static_cast<double>(rep.s1[t][i]);
      s2sq += static_cast<double>(s2[t][i]) * static_cast<double>(s2[t][i]) / trials;
    }
    row.stat_max = *std::max_element(col.begin(), col.end());
    row.stat_median = stats::median(col);
    row.beta_hat = stats::variance(s1col) / static_cast<double>(row.x);
    row.s2_var_hat = s2sq;
  }

  // Studentize S1 by its exact standard deviation sqrt(beta_i x_i).
  rep.studentized_level = std::sqrt(std::log(static_cast<double>(k)));
  rep.max_stat.resize(opt.trials);
  rep.studentized_max.resize(opt.trials);
  std::uint64_t over = 0;
  std::vector<std::uint64_t> exceed(opt.thresholds.size(), 0);
  for (std::uint64_t t = 0; t < opt.trials; ++t) {
    rep.max_stat[t] = *std::max_element(stat[t].begin(), stat[t].end());
    double best = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const auto& row = rep.rows[i];
      if (row.beta_exact < opt.beta_floor) continue;
      best = std::max(best, std::abs(static_cast<double>(rep.s1[t][i])) /
                                std::sqrt(row.beta_exact * static_cast<double>(row.x)));
    }
    rep.studentized_max[t] = best;
    if (best >= rep.studentized_level) ++over;
    for (std::size_t h = 0; h < opt.thresholds.size(); ++h) {
      if (rep.max_stat[t] >= opt.thresholds[h]) ++exceed[h];
    }
    rep.good_scale_fraction += good[t] / trials;
  }
  rep.studentized_exceed_fraction = static_cast<double>(over) / trials;
  rep.studentized_median = stats::median(rep.studentized_max);
  for (std::uint64_t e : exceed) rep.exceed_fraction.push_back(static_cast<double>(e) / trials);
  return rep;
}

}  // namespace rmfpoly
