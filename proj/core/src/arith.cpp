#include "rmfpoly/arith.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace rmfpoly::arith {

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t isqrt(u128 n) {
  if (n == 0) return 0;
  auto r = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
  if (r > 0xFFFFFFFFFFFFFFFFULL) r = 0xFFFFFFFFFFFFFFFFULL;
  while (r > 0 && r * r > n) --r;
  while (r < 0xFFFFFFFFFFFFFFFFULL && (r + 1) * (r + 1) <= n) ++r;
  return static_cast<std::uint64_t>(r);
}

bool is_perfect_square(u128 n) {
  u128 r = isqrt(n);
  return r * r == n;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  const std::uint64_t root = isqrt(limit);
  std::vector<char> small(root + 1, 1);
  std::vector<std::uint64_t> base;
  for (std::uint64_t i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (std::uint64_t j = i * i; j <= root; j += i) small[j] = 0;
  }
  constexpr std::uint64_t kSegment = 1U << 18;
  std::vector<char> seg(kSegment);
  for (std::uint64_t lo = 2; lo <= limit; lo += kSegment) {
    const std::uint64_t hi = std::min(limit, lo + kSegment - 1);
    std::fill(seg.begin(), seg.end(), 1);
    for (std::uint64_t p : base) {
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      for (std::uint64_t j = start; j <= hi; j += p) seg[j - lo] = 0;
    }
    for (std::uint64_t i = lo; i <= hi; ++i) {
      if (seg[i - lo]) primes.push_back(i);
    }
  }
  return primes;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<PrimePower> trial_factor(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("trial_factor: n must be positive");
  std::vector<PrimePower> out;
  auto take = [&](std::uint64_t p) {
    std::uint32_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) out.push_back({p, e});
  };
  take(2);
  take(3);
  for (std::uint64_t p = 5; p <= n / p; p += 6) {
    take(p);
    take(p + 2);
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

namespace {

std::uint64_t brent_split(std::uint64_t n) {
  if (n % 2 == 0) return 2;
  for (std::uint64_t c = 1;; ++c) {
    auto f = [&](std::uint64_t v) { return (mulmod(v, v, n) + c) % n; };
    std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
    constexpr std::uint64_t m = 128;
    for (std::uint64_t r = 1; g == 1; r <<= 1U) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      for (std::uint64_t k = 0; k < r && g == 1; k += m) {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = gcd(q, n);
      }
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void rho_collect(std::uint64_t n, std::vector<std::uint64_t>& primes) {
  if (n == 1) return;
  if (is_prime(n)) {
    primes.push_back(n);
    return;
  }
  const std::uint64_t r = isqrt(n);
  if (r * r == n) {
    rho_collect(r, primes);
    rho_collect(r, primes);
    return;
  }
  const std::uint64_t d = brent_split(n);
  rho_collect(d, primes);
  rho_collect(n / d, primes);
}

}  // namespace

std::vector<PrimePower> rho_factor(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("rho_factor: n must be positive");
  std::vector<PrimePower> out;
  auto take = [&](std::uint64_t p) {
    std::uint32_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) out.push_back({p, e});
  };
  for (std::uint64_t p = 2; p < 1000 && p <= n / p; p += p == 2 ? 1 : 2) take(p);
  if (n < 1000 * 1000) {
    if (n > 1) out.push_back({n, 1});
    return out;
  }
  std::vector<std::uint64_t> primes;
  rho_collect(n, primes);
  std::sort(primes.begin(), primes.end());
  for (std::uint64_t p : primes) {
    if (!out.empty() && out.back().prime == p) {
      ++out.back().exponent;
    } else {
      out.push_back({p, 1});
    }
  }
  return out;
}

bool is_squarefree(const BigInt& n) {
  if (n <= 0) throw std::invalid_argument("is_squarefree: n must be positive");
  BigInt m = n;
  BigInt cube_root;
  mpz_root(cube_root.get_mpz_t(), m.get_mpz_t(), 3);
  const std::uint64_t bound = to_u64(cube_root) + 1;
  for (std::uint64_t p = 2; p <= bound; p += (p == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(m.get_mpz_t(), p) == 0) continue;
    m /= static_cast<unsigned long>(p);
    if (mpz_divisible_ui_p(m.get_mpz_t(), p) != 0) return false;
  }
  // Remaining cofactor has at most two prime factors, all > bound.
  return m == 1 || mpz_perfect_square_p(m.get_mpz_t()) == 0;
}

std::uint64_t to_u64(const BigInt& v) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64) {
    throw std::overflow_error("value does not fit in 64 unsigned bits");
  }
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

BigInt from_u128(u128 v) {
  BigInt hi = static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64U));
  BigInt lo = static_cast<unsigned long>(static_cast<std::uint64_t>(v));
  return (hi << 64) + lo;
}

BigInt from_i128(i128 v) {
  if (v >= 0) return from_u128(static_cast<u128>(v));
  return -from_u128(static_cast<u128>(-(v + 1)) + 1);
}

std::uint64_t product(std::span<const PrimePower> factors) {
  std::uint64_t acc = 1;
  for (const auto& f : factors) {
    for (std::uint32_t e = 0; e < f.exponent; ++e) {
      if (__builtin_mul_overflow(acc, f.prime, &acc)) {
        throw std::overflow_error("prime power product exceeds 64 bits");
      }
    }
  }
  return acc;
}

}  // namespace rmfpoly::arith
