#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <gmpxx.h>

namespace rmfpoly {

using BigInt = mpz_class;
using u128 = unsigned __int128;
using i128 = __int128;

struct PrimePower {
  std::uint64_t prime = 0;
  std::uint32_t exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

namespace arith {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);
std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

// floor(sqrt(n)), exact.
std::uint64_t isqrt(std::uint64_t n);
std::uint64_t isqrt(u128 n);
bool is_perfect_square(u128 n);

// All primes p <= limit, ascending (segmented Eratosthenes).
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(std::uint64_t n);

// Factorization by trial division; n >= 1. Intended for small inputs and
// test oracles, not for the polynomial-value sieve.
std::vector<PrimePower> trial_factor(std::uint64_t n);

// Factorization of any 64-bit n >= 1: trial division by small primes, then
// Miller-Rabin and Brent's rho on the cofactor. Deterministic.
std::vector<PrimePower> rho_factor(std::uint64_t n);

// Squarefreeness of an arbitrary positive integer: trial division up to the
// cube root, then a perfect-square test on the cofactor.
bool is_squarefree(const BigInt& n);

std::uint64_t to_u64(const BigInt& v);
BigInt from_i128(i128 v);
BigInt from_u128(u128 v);

// Product of prime powers; throws std::overflow_error past 64 bits.
std::uint64_t product(std::span<const PrimePower> factors);

}  // namespace arith
}  // namespace rmfpoly
