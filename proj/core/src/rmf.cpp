#include "rmfpoly/rmf.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "rmfpoly/errors.hpp"
#include "rmfpoly/moments.hpp"
#include "rmfpoly/seed.hpp"
#include "rmfpoly/stats.hpp"

namespace rmfpoly {

std::string_view to_string(Model m) { return m == Model::Rademacher ? "rademacher" : "steinhaus"; }

std::string_view to_string(Normalization n) {
  return n == Normalization::ExactSecondMoment ? "exact" : "kappa";
}

namespace {
std::uint64_t prime_hash(std::uint64_t seed, std::uint64_t p) { return seed::mix64(seed::mix64(seed) ^ p); }
}  // namespace

int RmfSampler::sign(std::uint64_t prime) const { return (prime_hash(seed_, prime) >> 63U) != 0 ? -1 : 1; }

std::uint64_t RmfSampler::turn(std::uint64_t prime) const { return prime_hash(seed_, prime) >> 11U; }

std::complex<double> turn_to_unit(std::uint64_t t) {
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(t & kTurnMask) * 0x1.0p-53;
  return {std::cos(theta), std::sin(theta)};
}

int rademacher_value(const RmfSampler& f, std::span<const PrimePower> factors) {
  int s = 1;
  for (const auto& pp : factors) {
    if (pp.exponent > 1) return 0;
    s *= f.sign(pp.prime);
  }
  return s;
}

std::uint64_t steinhaus_turn(const RmfSampler& f, std::span<const PrimePower> factors) {
  std::uint64_t t = 0;
  for (const auto& pp : factors) t += f.turn(pp.prime) * pp.exponent;
  return t & kTurnMask;
}

std::complex<double> f_value(const RmfSampler& f, std::span<const PrimePower> factors) {
  if (f.model() == Model::Rademacher) return {static_cast<double>(rademacher_value(f, factors)), 0.0};
  return turn_to_unit(steinhaus_turn(f, factors));
}

std::int64_t rademacher_sum(const RmfSampler& f, const ValueTable& table) {
  std::int64_t s = 0;
  for (std::uint64_t n = 1; n <= table.size(); ++n) s += rademacher_value(f, table.factors(n));
  return s;
}

std::complex<double> partial_sum(const RmfSampler& f, const ValueTable& table) {
  if (f.model() == Model::Rademacher) return {static_cast<double>(rademacher_sum(f, table)), 0.0};
  std::complex<double> s = 0.0;
  for (std::uint64_t n = 1; n <= table.size(); ++n) s += turn_to_unit(steinhaus_turn(f, table.factors(n)));
  return s;
}

std::map<std::uint64_t, std::complex<double>> partial_sum_by_class(const RmfSampler& f, const ValueTable& table) {
  std::map<std::uint64_t, std::complex<double>> out;
  for (std::uint64_t n = 1; n <= table.size(); ++n) out[table.largest_prime_or_one(n)] += f_value(f, table.factors(n));
  return out;
}

std::uint64_t steinhaus_second_moment(const ValueTable& table) {
  std::map<std::uint64_t, std::uint64_t> mult;
  for (std::uint64_t n = 1; n <= table.size(); ++n) ++mult[table.value(n)];
  std::uint64_t s = 0;
  for (const auto& [v, m] : mult) s += m * m;
  return s;
}

bool is_pure_power_of_linear(const IntPolynomial& p) {
  const int d = p.degree();
  const BigInt cd = p.leading();
  const BigInt cd1 = p.coeff(d - 1);
  // P = cd (x + c)^d with c = cd1 / (d cd). Compare coefficients after
  // clearing denominators: c_k (d cd)^(d-k) == cd binom(d,k) cd1^(d-k).
  const BigInt dcd = cd * d;
  BigInt binom = 1;
  for (int k = d; k >= 0; --k) {
    const int e = d - k;
    if (e > 0) binom = binom * (d - e + 1) / e;
    BigInt lhs = p.coeff(k), rhs = cd * binom, l = 1, r = 1;
    mpz_pow_ui(l.get_mpz_t(), dcd.get_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(r.get_mpz_t(), cd1.get_mpz_t(), static_cast<unsigned long>(e));
    if (lhs * l != rhs * r) return false;
  }
  return true;
}

CltReport monte_carlo_clt(const ValueTable& table, const CltOptions& opt) {
  if (opt.trials == 0) throw std::invalid_argument("trials must be positive");
  if (table.size() == 0) throw std::invalid_argument("N must be positive");
  const IntPolynomial& poly = table.polynomial();

  CltReport rep;
  rep.n = table.size();
  rep.trials = opt.trials;
  rep.seed = opt.seed;
  rep.model = opt.model;
  rep.normalization = opt.normalization;
  rep.ks_vacuous = opt.trials < kKsMinTrials;
  rep.hist_lo = opt.hist_lo;
  rep.hist_hi = opt.hist_hi;

  const bool rad = opt.model == Model::Rademacher;
  if (poly.degree() < 2) {
    rep.outside_theorem = true;
  } else if (rad) {
    rep.outside_theorem = classify(poly).kind == PolyClass::Kind::Unsupported || !is_admissible(poly);
  } else {
    rep.outside_theorem = is_pure_power_of_linear(poly);
  }

  if (opt.normalization == Normalization::ExactSecondMoment) {
    rep.variance_used = static_cast<double>(rad ? second_moment_exact(table) : steinhaus_second_moment(table));
  } else {
    rep.variance_used = static_cast<double>(rep.n) * (rad ? kappa_euler(poly) : 1.0);
  }
  if (!(rep.variance_used > 0.0)) throw DomainError("second moment is zero: no squarefree values up to N");

  std::vector<std::complex<double>> raw(opt.trials);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t t; (t = next.fetch_add(1)) < opt.trials;) {
      raw[t] = partial_sum(RmfSampler(seed::derive(opt.seed, t), opt.model), table);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < std::max(1U, opt.threads); ++i) pool.emplace_back(worker);
    worker();
  }

  const double scale = 1.0 / std::sqrt(rep.variance_used);
  const auto trials = static_cast<double>(opt.trials);
  stats::Histogram hist(opt.hist_lo, opt.hist_hi, opt.hist_bins);
  rep.samples.reserve(opt.trials);
  for (const auto& m : raw) {
    const double a2 = std::norm(m);
    rep.raw_abs2 += a2 / trials;
    rep.raw_abs4 += a2 * a2 / trials;
    const std::complex<double> s = m * scale;
    const double x = s.real();
    rep.samples.push_back(x);
    rep.mean += x / trials;
    rep.m2 += x * x / trials;
    rep.m4 += x * x * x * x / trials;
    rep.abs2 += std::norm(s) / trials;
    rep.abs4 += std::norm(s) * std::norm(s) / trials;
    hist.add(x);
  }
  const double sigma = rad ? 1.0 : std::sqrt(0.5);
  rep.ks = stats::ks_statistic(rep.samples, [sigma](double x) { return stats::normal_cdf(x, sigma); });
  rep.hist_counts = std::move(hist.counts);
  rep.hist_underflow = hist.underflow;
  rep.hist_overflow = hist.overflow;
  return rep;
}

CltReport monte_carlo_clt(const IntPolynomial& p, std::uint64_t n, const CltOptions& opt) {
  return monte_carlo_clt(sieve_values(p, n, opt.threads), opt);
}

}  // namespace rmfpoly
