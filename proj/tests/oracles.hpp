#pragma once

// Independent brute-force reference implementations used by the tests. They
// are deliberately naive and share no code paths with the library beyond
// IntPolynomial and exact evaluation.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "rmfpoly/poly.hpp"

namespace oracle {

using rmfpoly::IntPolynomial;
using u64 = std::uint64_t;

inline mpz_class value(const IntPolynomial& p, long n) {
  mpz_class acc = 0;
  for (int i = p.degree(); i >= 0; --i) acc = acc * n + mpz_class(static_cast<long>(p.coeff(i)));
  return acc;
}

inline std::vector<std::pair<u64, unsigned>> factor(u64 n) {
  std::vector<std::pair<u64, unsigned>> f;
  for (u64 d = 2; d * d <= n; ++d) {
    unsigned e = 0;
    while (n % d == 0) {
      n /= d;
      ++e;
    }
    if (e) f.emplace_back(d, e);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

inline bool squarefree(u64 n) {
  for (const auto& [p, e] : factor(n)) {
    if (e > 1) return false;
  }
  return true;
}

inline u64 largest_prime(u64 n) { return n == 1 ? 1 : factor(n).back().first; }

inline bool is_square(u64 v) {
  auto r = static_cast<u64>(__builtin_sqrtl(static_cast<long double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r * r == v;
}

inline std::vector<u64> roots_scan(const IntPolynomial& p, u64 m) {
  std::vector<u64> r;
  for (u64 x = 0; x < m; ++x) {
    mpz_class v = value(p, static_cast<long>(x)) % mpz_class(static_cast<unsigned long>(m));
    if (v == 0) r.push_back(x);
  }
  return r;
}

inline mpz_class fixed_divisor(const IntPolynomial& p, long upto = 1000) {
  mpz_class g = 0;
  for (long n = 0; n <= upto; ++n) {
    mpz_class v = value(p, n);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  return g;
}

/// For every prime p <= bound some n in [0, p^2) has p^2 not dividing P(n).
inline bool admissible_by_scan(const IntPolynomial& p, u64 bound = 50) {
  for (u64 q = 2; q <= bound; ++q) {
    if (factor(q).size() != 1 || factor(q)[0].second != 1) continue;
    bool escapes = false;
    for (u64 n = 0; n < q * q && !escapes; ++n) {
      mpz_class v = value(p, static_cast<long>(n)) % mpz_class(static_cast<unsigned long>(q * q));
      if (v != 0) escapes = true;
    }
    if (!escapes) return false;
  }
  return true;
}

struct Quadruples {
  std::vector<u64> fourth;    // index N -> ordered squarefree quadruples in [1,N]^4 with square product
  std::vector<u64> diagonal;  // of which equal in pairs under some pairing
};

/// O(N^4) enumeration. Needs the product of four values to fit in 64 bits.
inline Quadruples quadruples(const std::vector<u64>& values) {
  const std::size_t n = values.size();
  std::vector<u64> by_max(n + 1, 0), diag_by_max(n + 1, 0);
  std::vector<bool> sf(n);
  for (std::size_t i = 0; i < n; ++i) sf[i] = squarefree(values[i]);
  for (std::size_t a = 0; a < n; ++a) {
    if (!sf[a]) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (!sf[b]) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (!sf[c]) continue;
        for (std::size_t d = 0; d < n; ++d) {
          if (!sf[d]) continue;
          const u64 prod = values[a] * values[b] * values[c] * values[d];
          if (!is_square(prod)) continue;
          const std::size_t m = std::max(std::max(a, b), std::max(c, d)) + 1;
          ++by_max[m];
          const u64 va = values[a], vb = values[b], vc = values[c], vd = values[d];
          if ((va == vb && vc == vd) || (va == vc && vb == vd) || (va == vd && vb == vc)) ++diag_by_max[m];
        }
      }
    }
  }
  Quadruples q;
  q.fourth.assign(n + 1, 0);
  q.diagonal.assign(n + 1, 0);
  for (std::size_t m = 1; m <= n; ++m) {
    q.fourth[m] = q.fourth[m - 1] + by_max[m];
    q.diagonal[m] = q.diagonal[m - 1] + diag_by_max[m];
  }
  return q;
}

struct ClassSums {
  u64 second = 0;
  u64 fourth = 0;
  u64 cross = 0;
};

/// Per-largest-prime-class expectations by direct quadruple enumeration.
inline ClassSums class_sums(const std::vector<u64>& values) {
  const std::size_t n = values.size();
  std::vector<u64> cls(n);
  std::vector<bool> sf(n);
  for (std::size_t i = 0; i < n; ++i) {
    sf[i] = squarefree(values[i]);
    cls[i] = largest_prime(values[i]);
  }
  ClassSums s;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (sf[a] && sf[b] && cls[a] == cls[b] && values[a] == values[b]) ++s.second;
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (!sf[a]) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (!sf[b] || cls[b] != cls[a]) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (!sf[c]) continue;
        for (std::size_t d = 0; d < n; ++d) {
          if (!sf[d] || cls[d] != cls[c]) continue;
          if (!is_square(values[a] * values[b] * values[c] * values[d])) continue;
          if (cls[a] == cls[c]) {
            ++s.fourth;
          } else {
            ++s.cross;
          }
        }
      }
    }
  }
  return s;
}

inline std::vector<std::pair<long, long>> curve_points(const IntPolynomial& p, long a, long b, long n) {
  std::vector<mpz_class> vals(static_cast<std::size_t>(n + 1));
  for (long x = 1; x <= n; ++x) vals[static_cast<std::size_t>(x)] = value(p, x);
  std::vector<std::pair<long, long>> pts;
  for (long x = 1; x <= n; ++x) {
    for (long y = 1; y <= n; ++y) {
      if (a * vals[static_cast<std::size_t>(x)] == b * vals[static_cast<std::size_t>(y)]) pts.emplace_back(x, y);
    }
  }
  return pts;
}

/// Solutions of x^2 - 2 y^2 = 1 with 1 <= x, y <= n, from the fundamental unit.
inline std::vector<std::pair<long, long>> pell_2(long n) {
  std::vector<std::pair<long, long>> out;
  long x = 3, y = 2;
  while (x <= n && y <= n) {
    out.emplace_back(x, y);
    const long nx = 3 * x + 4 * y, ny = 2 * x + 3 * y;
    x = nx;
    y = ny;
  }
  return out;
}

inline u64 smooth_count(u64 x, u64 y) {
  u64 c = 0;
  for (u64 n = 1; n <= x; ++n) {
    if (largest_prime(n) <= y) ++c;
  }
  return c;
}

}  // namespace oracle
