#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "rmfpoly/poly.hpp"
#include "rmfpoly/sieve.hpp"

namespace rmfpoly {

enum class Model { Rademacher, Steinhaus };
enum class Normalization { ExactSecondMoment, KappaN };

std::string_view to_string(Model m);
std::string_view to_string(Normalization n);

/// One realization of a random multiplicative function, addressed by prime.
/// f(p) depends only on (seed, p), so realizations are reproducible and the
/// same prime gets the same value regardless of evaluation order.
class RmfSampler {
 public:
  RmfSampler(std::uint64_t seed, Model model) : seed_(seed), model_(model) {}

  std::uint64_t seed() const { return seed_; }
  Model model() const { return model_; }

  /// Rademacher f(p) in {-1, +1}.
  int sign(std::uint64_t prime) const;
  /// Steinhaus f(p) = exp(2 pi i t / 2^53); returns t.
  std::uint64_t turn(std::uint64_t prime) const;

 private:
  std::uint64_t seed_;
  Model model_;
};

inline constexpr std::uint64_t kTurnMask = (std::uint64_t{1} << 53U) - 1;

std::complex<double> turn_to_unit(std::uint64_t t);

/// Rademacher f(m): 0 unless m is squarefree.
int rademacher_value(const RmfSampler& f, std::span<const PrimePower> factors);
/// Steinhaus f(m) as a fraction of a full turn (completely multiplicative).
std::uint64_t steinhaus_turn(const RmfSampler& f, std::span<const PrimePower> factors);

std::complex<double> f_value(const RmfSampler& f, std::span<const PrimePower> factors);

std::int64_t rademacher_sum(const RmfSampler& f, const ValueTable& table);
std::complex<double> partial_sum(const RmfSampler& f, const ValueTable& table);

/// Partial sums split by P+(P(n)); key 1 collects the Unit values.
std::map<std::uint64_t, std::complex<double>> partial_sum_by_class(const RmfSampler& f, const ValueTable& table);

/// sum over v of m_v^2 where m_v counts n <= N with P(n) = v: E|M|^2 for Steinhaus.
std::uint64_t steinhaus_second_moment(const ValueTable& table);

/// True when P is a constant multiple of a pure power (x + c)^d, c rational.
bool is_pure_power_of_linear(const IntPolynomial& p);

struct CltOptions {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  Model model = Model::Rademacher;
  Normalization normalization = Normalization::ExactSecondMoment;
  unsigned threads = 1;
  std::size_t hist_bins = 32;
  double hist_lo = -4.0;
  double hist_hi = 4.0;
};

struct CltReport {
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  Model model = Model::Rademacher;
  Normalization normalization = Normalization::ExactSecondMoment;
  bool outside_theorem = false;
  double variance_used = 0.0;  // S = M / sqrt(variance_used)

  // raw partial sums M, E over trials
  double raw_abs2 = 0.0;
  double raw_abs4 = 0.0;

  // normalized S; for Steinhaus the m* fields refer to Re S
  double mean = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
  double abs2 = 0.0;  // E|S|^2
  double abs4 = 0.0;  // E|S|^4
  double ks = 0.0;    // against N(0,1), or N(0,1/2) for Re S in the Steinhaus case
  bool ks_vacuous = false;

  std::vector<double> samples;  // Re S per trial, in trial order
  std::vector<std::uint64_t> hist_counts;
  std::uint64_t hist_underflow = 0;
  std::uint64_t hist_overflow = 0;
  double hist_lo = 0.0;
  double hist_hi = 0.0;
};

inline constexpr std::uint64_t kKsMinTrials = 100;

CltReport monte_carlo_clt(const ValueTable& table, const CltOptions& opt);
CltReport monte_carlo_clt(const IntPolynomial& p, std::uint64_t n, const CltOptions& opt);

}  // namespace rmfpoly
