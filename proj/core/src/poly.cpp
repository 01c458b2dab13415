#include "rmfpoly/poly.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include "rmfpoly/errors.hpp"

namespace rmfpoly {

IntPolynomial::IntPolynomial(std::vector<std::int64_t> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  if (coeffs_.size() < 2) {
    throw std::invalid_argument("polynomial must have degree >= 1");
  }
}

IntPolynomial IntPolynomial::parse(std::string_view text) {
  std::vector<std::int64_t> coeffs;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view item = text.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty() && item.front() == '+') item.remove_prefix(1);
    std::int64_t value = 0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || end != item.data() + item.size()) {
      throw std::invalid_argument("bad polynomial coefficient '" + std::string(item) +
                                  "' (expected comma-separated ascending integers, e.g. 1,0,1)");
    }
    coeffs.push_back(value);
    pos = comma + 1;
  }
  return IntPolynomial(std::move(coeffs));
}

std::string IntPolynomial::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    std::int64_t c = coeffs_[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    const bool negative = c < 0;
    const auto mag = negative ? -static_cast<i128>(c) : static_cast<i128>(c);
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    if (mag != 1 || i == 0) os << static_cast<std::uint64_t>(mag);
    if (i >= 1) os << 'x';
    if (i >= 2) os << '^' << i;
    first = false;
  }
  return os.str();
}

std::string IntPolynomial::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(coeffs_[i]);
  }
  return out;
}

std::string_view to_string(PolyClass::Kind kind) {
  switch (kind) {
    case PolyClass::Kind::DistinctLinearFactors: return "DistinctLinearFactors";
    case PolyClass::Kind::IrreducibleQuadratic: return "IrreducibleQuadratic";
    case PolyClass::Kind::Unsupported: return "Unsupported";
  }
  return "Unsupported";
}

BigInt eval(const IntPolynomial& p, const BigInt& n) {
  BigInt acc = 0;
  for (int i = p.degree(); i >= 0; --i) {
    acc = acc * n + BigInt(static_cast<long>(p.coeff(i)));
  }
  return acc;
}

BigInt eval(const IntPolynomial& p, std::int64_t n) {
  if (auto fast = eval_i128(p, n)) return arith::from_i128(*fast);
  return eval(p, BigInt(static_cast<long>(n)));
}

std::optional<i128> eval_i128(const IntPolynomial& p, std::int64_t n) {
  i128 acc = 0;
  const i128 x = n;
  for (int i = p.degree(); i >= 0; --i) {
    if (__builtin_mul_overflow(acc, x, &acc)) return std::nullopt;
    if (__builtin_add_overflow(acc, static_cast<i128>(p.coeff(i)), &acc)) return std::nullopt;
  }
  return acc;
}

namespace {

std::uint64_t reduce(std::int64_t c, std::uint64_t m) {
  i128 r = static_cast<i128>(c) % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<std::uint64_t>(r);
}

}  // namespace

std::uint64_t eval_mod(const IntPolynomial& p, std::uint64_t n, std::uint64_t m) {
  if (m == 0) throw std::invalid_argument("eval_mod: modulus must be positive");
  n %= m;
  std::uint64_t acc = 0;
  for (int i = p.degree(); i >= 0; --i) {
    acc = arith::mulmod(acc, n, m);
    acc = static_cast<std::uint64_t>((static_cast<u128>(acc) + reduce(p.coeff(i), m)) % m);
  }
  return acc;
}

BigInt fixed_divisor(const IntPolynomial& p) {
  BigInt g = 0;
  for (int k = 0; k <= p.degree(); ++k) {
    BigInt v = eval(p, static_cast<std::int64_t>(k));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  if (g == 0) throw DomainError("fixed_divisor: polynomial vanishes at 0..deg");
  return g;
}

bool is_admissible(const IntPolynomial& p) { return arith::is_squarefree(fixed_divisor(p)); }

// ---------------------------------------------------------------------------
// classify

namespace {

using BigPoly = std::vector<BigInt>;

std::vector<std::uint64_t> divisors(const BigInt& v) {
  BigInt mag = abs(v);
  const std::uint64_t n = arith::to_u64(mag);
  std::vector<std::uint64_t> divs{1};
  for (const auto& [prime, exp] : arith::trial_factor(n)) {
    const std::size_t count = divs.size();
    std::uint64_t pk = 1;
    for (std::uint32_t e = 0; e < exp; ++e) {
      pk *= prime;
      for (std::size_t i = 0; i < count; ++i) divs.push_back(divs[i] * pk);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

// q^d Q(num/q) == 0
bool vanishes_at(const BigPoly& q, const BigInt& num, const BigInt& den) {
  const std::size_t d = q.size() - 1;
  BigInt acc = 0;
  BigInt num_pow = 1;
  std::vector<BigInt> den_pow(d + 1, 1);
  for (std::size_t i = 1; i <= d; ++i) den_pow[i] = den_pow[i - 1] * den;
  for (std::size_t i = 0; i <= d; ++i) {
    acc += q[i] * num_pow * den_pow[d - i];
    num_pow *= num;
  }
  return acc == 0;
}

std::optional<std::pair<BigInt, BigInt>> rational_root(const BigPoly& q) {
  for (std::uint64_t den : divisors(q.back())) {
    for (std::uint64_t num : divisors(q.front())) {
      if (arith::gcd(num, den) != 1) continue;
      for (int sign : {1, -1}) {
        BigInt n = BigInt(static_cast<unsigned long>(num)) * sign;
        BigInt d = static_cast<unsigned long>(den);
        if (vanishes_at(q, n, d)) return std::make_pair(n, d);
      }
    }
  }
  return std::nullopt;
}

// Q / (den x - num), exact.
BigPoly divide_linear(const BigPoly& q, const BigInt& num, const BigInt& den) {
  const std::size_t d = q.size() - 1;
  BigPoly r(d);
  BigInt carry = 0;  // R_i for the index above
  for (std::size_t i = d; i >= 1; --i) {
    BigInt t = q[i] + num * carry;
    if (!mpz_divisible_p(t.get_mpz_t(), den.get_mpz_t())) {
      throw std::logic_error("classify: inexact linear division");
    }
    r[i - 1] = t / den;
    carry = r[i - 1];
  }
  return r;
}

std::int64_t to_i64(const BigInt& v) {
  if (!v.fits_slong_p()) throw std::overflow_error("linear factor coefficient exceeds 64 bits");
  return v.get_si();
}

}  // namespace

PolyClass classify(const IntPolynomial& p) {
  if (p.degree() < 2) throw std::invalid_argument("classify: degree must be >= 2");
  BigPoly q;
  for (auto c : p.coeffs()) q.emplace_back(static_cast<long>(c));

  std::vector<std::pair<BigInt, BigInt>> linear;  // (a, b) for a x + b
  while (q.size() >= 3) {
    if (q.front() == 0) {
      linear.emplace_back(1, 0);
      q.erase(q.begin());
      continue;
    }
    auto root = rational_root(q);
    if (!root) break;
    const auto& [num, den] = *root;
    q = divide_linear(q, num, den);
    linear.emplace_back(den, -num);
  }

  PolyClass out;
  if (q.size() <= 2) {
    if (q.size() == 2) {
      linear.emplace_back(q[1], q[0]);
    } else {
      linear.front().first *= q[0];
      linear.front().second *= q[0];
    }
    bool distinct = linear.size() >= 2;
    for (std::size_t i = 0; i < linear.size() && distinct; ++i) {
      for (std::size_t j = i + 1; j < linear.size(); ++j) {
        if (linear[i].first * linear[j].second == linear[j].first * linear[i].second) {
          distinct = false;
          break;
        }
      }
    }
    if (distinct) {
      out.kind = PolyClass::Kind::DistinctLinearFactors;
      for (const auto& [a, b] : linear) out.factors.push_back({to_i64(a), to_i64(b)});
    }
    return out;
  }
  if (p.degree() == 2) {
    const BigInt a = static_cast<long>(p.coeff(2));
    const BigInt b = static_cast<long>(p.coeff(1));
    const BigInt c = static_cast<long>(p.coeff(0));
    BigInt disc = b * b - 4 * a * c;
    if (disc < 0 || mpz_perfect_square_p(disc.get_mpz_t()) == 0) {
      out.kind = PolyClass::Kind::IrreducibleQuadratic;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// roots modulo m

namespace {

std::vector<std::uint64_t> scan_roots(const IntPolynomial& p, std::uint64_t m) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t r = 0; r < m; ++r) {
    if (eval_mod(p, r, m) == 0) out.push_back(r);
  }
  return out;
}

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  // extended Euclid on signed 128-bit
  i128 t = 0, new_t = 1;
  i128 r = m, new_r = a % m;
  while (new_r != 0) {
    i128 q = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - q * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - q * new_r);
  }
  if (r != 1) throw std::logic_error("inverse_mod: not invertible");
  if (t < 0) t += m;
  return static_cast<std::uint64_t>(t);
}

// Polynomials over F_p, ascending coefficients, no trailing zeros.
using FpPoly = std::vector<std::uint64_t>;

void trim(FpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

FpPoly poly_mod(FpPoly a, const FpPoly& m, std::uint64_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  const std::uint64_t inv_lead = inverse_mod(m.back(), p);
  while (a.size() > dm) {
    const std::uint64_t factor = arith::mulmod(a.back(), inv_lead, p);
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) {
      a[shift + i] = (a[shift + i] + p - arith::mulmod(factor, m[i], p)) % p;
    }
    trim(a);
  }
  return a;
}

FpPoly poly_div(FpPoly a, const FpPoly& m, std::uint64_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  if (a.size() <= dm) return {};
  FpPoly quot(a.size() - dm, 0);
  const std::uint64_t inv_lead = inverse_mod(m.back(), p);
  for (std::size_t k = a.size(); k-- > dm;) {
    const std::uint64_t factor = arith::mulmod(a[k], inv_lead, p);
    const std::size_t shift = k - dm;
    quot[shift] = factor;
    for (std::size_t i = 0; i <= dm; ++i) {
      a[shift + i] = (a[shift + i] + p - arith::mulmod(factor, m[i], p)) % p;
    }
  }
  trim(quot);
  return quot;
}

FpPoly poly_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& m, std::uint64_t p) {
  if (a.empty() || b.empty()) return {};
  FpPoly prod(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      prod[i + j] = (prod[i + j] + arith::mulmod(a[i], b[j], p)) % p;
    }
  }
  return poly_mod(std::move(prod), m, p);
}

FpPoly poly_powmod(FpPoly base, std::uint64_t exp, const FpPoly& m, std::uint64_t p) {
  FpPoly result{1};
  result = poly_mod(result, m, p);
  base = poly_mod(std::move(base), m, p);
  while (exp > 0) {
    if (exp & 1U) result = poly_mulmod(result, base, m, p);
    base = poly_mulmod(base, base, m, p);
    exp >>= 1U;
  }
  return result;
}

FpPoly make_monic(FpPoly a, std::uint64_t p) {
  const std::uint64_t inv = inverse_mod(a.back(), p);
  for (auto& c : a) c = arith::mulmod(c, inv, p);
  return a;
}

FpPoly poly_gcd(FpPoly a, FpPoly b, std::uint64_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    FpPoly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a.empty() ? a : make_monic(std::move(a), p);
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31U);
}

// g monic, squarefree, product of distinct linear factors over F_p, p odd.
void split_linear(const FpPoly& g, std::uint64_t p, std::uint64_t& rng, std::vector<std::uint64_t>& out) {
  const std::size_t deg = g.size() - 1;
  if (deg == 0) return;
  if (deg == 1) {
    out.push_back((p - g[0]) % p);
    return;
  }
  for (;;) {
    const std::uint64_t a = splitmix(rng) % p;
    FpPoly s = poly_powmod(FpPoly{a, 1}, (p - 1) / 2, g, p);
    if (s.empty()) s = {0};
    s[0] = (s[0] + p - 1) % p;
    FpPoly d = poly_gcd(g, s, p);
    if (d.size() >= 2 && d.size() < g.size()) {
      split_linear(d, p, rng, out);
      split_linear(poly_div(g, d, p), p, rng, out);
      return;
    }
  }
}

constexpr std::uint64_t kScanPrimeLimit = 64;
constexpr std::uint64_t kScanSquareLimit = 1024;

}  // namespace

std::vector<std::uint64_t> roots_mod(const IntPolynomial& p, std::uint64_t m) {
  if (m == 0) throw std::invalid_argument("roots_mod: modulus must be positive");
  const auto factors = arith::trial_factor(m);
  const bool squarefree =
      std::all_of(factors.begin(), factors.end(), [](const PrimePower& f) { return f.exponent == 1; });
  const bool prime_square = factors.size() == 1 && factors[0].exponent == 2;
  if (!squarefree && !prime_square) {
    throw std::invalid_argument("roots_mod: modulus must be squarefree or a prime square");
  }
  std::vector<std::uint64_t> acc{0};
  std::uint64_t acc_mod = 1;
  for (const auto& f : factors) {
    const std::uint64_t q = f.exponent == 2 ? f.prime * f.prime : f.prime;
    const auto local = scan_roots(p, q);
    std::vector<std::uint64_t> next;
    next.reserve(acc.size() * local.size());
    const std::uint64_t inv = acc_mod == 1 ? 0 : inverse_mod(acc_mod % q, q);
    for (std::uint64_t r1 : acc) {
      for (std::uint64_t r2 : local) {
        // x = r1 + acc_mod * t, t = (r2 - r1) / acc_mod mod q
        const std::uint64_t diff = (r2 + q - r1 % q) % q;
        const std::uint64_t t = acc_mod == 1 ? diff : arith::mulmod(diff, inv, q);
        next.push_back(static_cast<std::uint64_t>(r1 + static_cast<u128>(acc_mod) * t));
      }
    }
    acc = std::move(next);
    acc_mod *= q;
  }
  std::sort(acc.begin(), acc.end());
  return acc;
}

std::vector<std::uint64_t> roots_mod_prime(const IntPolynomial& p, std::uint64_t prime) {
  FpPoly f;
  for (auto c : p.coeffs()) f.push_back(reduce(c, prime));
  trim(f);
  if (f.empty()) {
    std::vector<std::uint64_t> all(prime);
    for (std::uint64_t r = 0; r < prime; ++r) all[r] = r;
    return all;
  }
  if (f.size() == 1) return {};
  if (prime <= kScanPrimeLimit) return scan_roots(p, prime);

  f = make_monic(std::move(f), prime);
  FpPoly h = poly_powmod(FpPoly{0, 1}, prime, f, prime);
  h.resize(std::max<std::size_t>(h.size(), 2), 0);
  h[1] = (h[1] + prime - 1) % prime;
  trim(h);
  FpPoly g = h.empty() ? f : poly_gcd(f, h, prime);
  std::vector<std::uint64_t> out;
  std::uint64_t rng = prime;
  split_linear(g, prime, rng, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t count_roots_prime_square(const IntPolynomial& p, std::uint64_t prime) {
  if (prime <= kScanSquareLimit) return roots_mod(p, prime * prime).size();

  const bool vanishes = std::all_of(p.coeffs().begin(), p.coeffs().end(),
                                    [&](std::int64_t c) { return reduce(c, prime) == 0; });
  if (vanishes) {
    std::vector<std::int64_t> reduced;
    for (auto c : p.coeffs()) reduced.push_back(c / static_cast<std::int64_t>(prime));
    const bool twice = std::all_of(reduced.begin(), reduced.end(),
                                   [&](std::int64_t c) { return reduce(c, prime) == 0; });
    if (twice) return prime * prime;
    return prime * roots_mod_prime(IntPolynomial(std::move(reduced)), prime).size();
  }

  // P(r + t p) = P(r) + t p P'(r) mod p^2.
  const std::uint64_t p2 = prime * prime;
  std::uint64_t count = 0;
  for (std::uint64_t r : roots_mod_prime(p, prime)) {
    std::uint64_t deriv = 0;
    for (int i = p.degree(); i >= 1; --i) {
      deriv = arith::mulmod(deriv, r, prime);
      const std::uint64_t term = arith::mulmod(reduce(p.coeff(i), prime), static_cast<std::uint64_t>(i) % prime, prime);
      deriv = (deriv + term) % prime;
    }
    if (deriv != 0) {
      count += 1;
    } else if (eval_mod(p, r, p2) == 0) {
      count += prime;
    }
  }
  return count;
}

}  // namespace rmfpoly
