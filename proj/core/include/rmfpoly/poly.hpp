#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rmfpoly/arith.hpp"

namespace rmfpoly {

/// Integer polynomial c0 + c1 x + ... + cd x^d with d >= 1 and cd != 0.
///
/// Coefficients are stored in ascending degree order. Trailing zero
/// coefficients passed to the constructor are trimmed, so the stored degree
/// always equals the index of the last nonzero coefficient.
class IntPolynomial {
 public:
  explicit IntPolynomial(std::vector<std::int64_t> coeffs);

  /// Parses the comma-separated ascending form, e.g. "1,0,1" for x^2 + 1.
  static IntPolynomial parse(std::string_view text);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<std::int64_t>& coeffs() const { return coeffs_; }
  std::int64_t coeff(int i) const { return coeffs_.at(static_cast<std::size_t>(i)); }
  std::int64_t leading() const { return coeffs_.back(); }

  /// Human readable form, e.g. "x^2 + 1".
  std::string to_string() const;
  /// Round-trips through parse().
  std::string to_csv() const;

  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

 private:
  std::vector<std::int64_t> coeffs_;
};

struct LinearFactor {
  std::int64_t a = 0;  // coefficient of x
  std::int64_t b = 0;  // constant term
  friend bool operator==(const LinearFactor&, const LinearFactor&) = default;
};

struct PolyClass {
  enum class Kind { DistinctLinearFactors, IrreducibleQuadratic, Unsupported };
  Kind kind = Kind::Unsupported;
  /// Populated for DistinctLinearFactors; the product equals P exactly.
  std::vector<LinearFactor> factors;
};

std::string_view to_string(PolyClass::Kind kind);

/// Exact value P(n).
BigInt eval(const IntPolynomial& p, const BigInt& n);
BigInt eval(const IntPolynomial& p, std::int64_t n);

/// Fixed-width fast path; nullopt on 128-bit overflow.
std::optional<i128> eval_i128(const IntPolynomial& p, std::int64_t n);

/// P(n) mod m in [0, m), for m >= 1.
std::uint64_t eval_mod(const IntPolynomial& p, std::uint64_t n, std::uint64_t m);

/// gcd of all values P(n), n in Z, computed as gcd(P(0), ..., P(d)).
BigInt fixed_divisor(const IntPolynomial& p);

/// True iff no prime square divides every value, i.e. the fixed divisor is
/// squarefree.
bool is_admissible(const IntPolynomial& p);

/// Splits off integer linear factors and applies the quadratic discriminant
/// test. Throws std::invalid_argument for degree < 2.
PolyClass classify(const IntPolynomial& p);

/// Sorted residues r in [0, m) with P(r) = 0 mod m, by exhaustive scan per
/// prime (or prime square) and CRT recombination. m must be squarefree or a
/// prime square; anything else throws std::invalid_argument.
std::vector<std::uint64_t> roots_mod(const IntPolynomial& p, std::uint64_t m);

/// Roots of P modulo a prime p. Small primes are scanned; larger ones go
/// through distinct-degree and equal-degree splitting over F_p. When P is
/// identically zero mod p every residue is a root.
std::vector<std::uint64_t> roots_mod_prime(const IntPolynomial& p, std::uint64_t prime);

/// rho_P(p^2) = #{x mod p^2 : P(x) = 0 mod p^2}. Small primes use the
/// exhaustive scan of roots_mod; larger ones lift the roots mod p.
std::uint64_t count_roots_prime_square(const IntPolynomial& p, std::uint64_t prime);

}  // namespace rmfpoly
