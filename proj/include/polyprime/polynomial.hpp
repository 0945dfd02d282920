#pragma once

// Exact integer polynomials in one variable.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyprime/error.hpp"
#include "polyprime/resources.hpp"
#include "polyprime/sieve.hpp"

namespace polyprime {

namespace checked {

inline std::int64_t add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw RangeError("64-bit overflow in addition");
  return r;
}

inline std::int64_t mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw RangeError("64-bit overflow in multiplication");
  return r;
}

inline std::int64_t neg(std::int64_t a) {
  if (a == std::numeric_limits<std::int64_t>::min()) throw RangeError("64-bit overflow in negation");
  return -a;
}

}  // namespace checked

// f(x) = c_k x^k + ... + c_0 with c_k != 0 and k >= 1.
class IntPolynomial {
 public:
  // Coefficients in ascending order of degree: {c_0, c_1, ..., c_k}.
  explicit IntPolynomial(std::vector<std::int64_t> ascending) : c_(std::move(ascending)) {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
    if (c_.empty()) throw ParseError("zero polynomial");
    if (c_.size() == 1) throw ParseError("constant polynomial: degree must be at least 1");
  }

  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  std::int64_t leading() const noexcept { return c_.back(); }
  std::int64_t coefficient(int i) const noexcept {
    return i >= 0 && i <= degree() ? c_[static_cast<std::size_t>(i)] : 0;
  }
  const std::vector<std::int64_t>& ascending() const noexcept { return c_; }
  std::vector<std::int64_t> descending() const { return {c_.rbegin(), c_.rend()}; }

  IntPolynomial operator-() const {
    std::vector<std::int64_t> out(c_.size());
    std::transform(c_.begin(), c_.end(), out.begin(), checked::neg);
    return IntPolynomial(std::move(out));
  }

  // gcd of all coefficients (positive).
  std::uint64_t content() const noexcept {
    std::uint64_t g = 0;
    for (auto c : c_) g = std::gcd(g, c < 0 ? 0ULL - static_cast<std::uint64_t>(c) : static_cast<std::uint64_t>(c));
    return g;
  }

  std::int64_t max_abs_coefficient() const {
    std::int64_t m = 0;
    for (auto c : c_) m = std::max(m, c < 0 ? checked::neg(c) : c);
    return m;
  }

  // Canonical text, e.g. "2x^3 - x + 1".
  std::string to_string() const {
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      const std::int64_t c = c_[static_cast<std::size_t>(i)];
      if (c == 0) continue;
      const bool negative = c < 0;
      const std::uint64_t mag = negative ? 0ULL - static_cast<std::uint64_t>(c) : static_cast<std::uint64_t>(c);
      if (out.empty()) {
        if (negative) out += '-';
      } else {
        out += negative ? " - " : " + ";
      }
      if (mag != 1 || i == 0) out += std::to_string(mag);
      if (i >= 1) out += 'x';
      if (i >= 2) out += '^' + std::to_string(i);
    }
    return out;
  }

  friend bool operator==(const IntPolynomial&, const IntPolynomial&) = default;

 private:
  std::vector<std::int64_t> c_;
};

namespace detail {

class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : s_(text) {}

  IntPolynomial parse() {
    skip_ws();
    if (peek() == '[') return parse_list();
    std::map<int, std::int64_t> terms;
    bool first = true;
    while (true) {
      skip_ws();
      if (at_end()) break;
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = get() == '-' ? -1 : 1;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      auto [coef, exponent] = parse_term();
      auto& slot = terms[exponent];
      slot = checked::add(slot, checked::mul(sign, coef));
      first = false;
    }
    if (first) fail("empty polynomial");
    const int top = terms.rbegin()->first;
    std::vector<std::int64_t> asc(static_cast<std::size_t>(top) + 1, 0);
    for (auto [e, c] : terms) asc[static_cast<std::size_t>(e)] = c;
    return IntPolynomial(std::move(asc));
  }

 private:
  IntPolynomial parse_list() {
    get();  // '['
    std::vector<std::int64_t> desc;
    while (true) {
      skip_ws();
      int sign = 1;
      if (peek() == '+' || peek() == '-') sign = get() == '-' ? -1 : 1;
      skip_ws();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected integer coefficient");
      desc.push_back(checked::mul(sign, parse_uint()));
      skip_ws();
      const char c = get();
      if (c == ']') break;
      if (c != ',') fail("expected ',' or ']'");
    }
    skip_ws();
    if (!at_end()) fail("trailing characters after coefficient list");
    return IntPolynomial(std::vector<std::int64_t>(desc.rbegin(), desc.rend()));
  }

  std::pair<std::int64_t, int> parse_term() {
    std::int64_t coef = 1;
    bool have_coef = false;
    if (std::isdigit(static_cast<unsigned char>(peek()))) {
      coef = parse_uint();
      have_coef = true;
      skip_ws();
      if (peek() == '*') {
        get();
        skip_ws();
        if (peek() != 'x' && peek() != 'X') fail("expected 'x' after '*'");
      }
    }
    if (peek() != 'x' && peek() != 'X') {
      if (!have_coef) fail("expected coefficient or 'x'");
      return {coef, 0};
    }
    get();
    skip_ws();
    int exponent = 1;
    if (peek() == '^') {
      get();
      skip_ws();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected exponent");
      const auto e = parse_uint();
      if (e > 64) fail("exponent too large");
      exponent = static_cast<int>(e);
    }
    return {coef, exponent};
  }

  std::int64_t parse_uint() {
    std::int64_t v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = checked::add(checked::mul(v, 10), get() - '0');
    }
    return v;
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  char get() { return at_end() ? '\0' : s_[pos_++]; }
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("malformed polynomial \"" + std::string(s_) + "\" at offset " +
                     std::to_string(pos_) + ": " + why);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Accepts "2x^3 - x + 1", "2*x^3-x+1" or a descending list "[2,0,-1,1]".
inline IntPolynomial parse_polynomial(std::string_view text) {
  return detail::PolyParser(text).parse();
}

// Sign flip so that the leading coefficient is positive.
inline IntPolynomial normalize(const IntPolynomial& f) { return f.leading() > 0 ? f : -f; }

// Exact f(x); throws RangeError when the value does not fit in 64 bits.
inline std::int64_t evaluate(const IntPolynomial& f, std::int64_t x) {
  constexpr __int128 kLimit = (__int128{1} << 100);
  __int128 acc = 0;
  const auto& c = f.ascending();
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    __int128 next;
    if (__builtin_mul_overflow(acc, static_cast<__int128>(x), &next) || next > kLimit || next < -kLimit)
      throw RangeError("overflow evaluating " + f.to_string() + " at " + std::to_string(x));
    acc = next + *it;
  }
  if (acc > std::numeric_limits<std::int64_t>::max() || acc < std::numeric_limits<std::int64_t>::min())
    throw RangeError("value of " + f.to_string() + " at " + std::to_string(x) + " exceeds 64 bits");
  return static_cast<std::int64_t>(acc);
}

// f(x) mod m in [0, m).
inline std::uint64_t evaluate_mod(const IntPolynomial& f, std::int64_t x, std::uint64_t m) {
  const auto mm = static_cast<__int128>(m);
  __int128 xr = x % mm;
  if (xr < 0) xr += mm;
  __int128 acc = 0;
  const auto& c = f.ascending();
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    __int128 cr = *it % mm;
    if (cr < 0) cr += mm;
    acc = (acc * xr + cr) % mm;
  }
  return static_cast<std::uint64_t>(acc);
}

// Largest d >= 0 with lead * d^k <= bound (0 when bound < lead).
inline std::int64_t floor_root(std::int64_t bound, std::int64_t lead, int k) {
  if (bound < lead) return 0;
  auto fits = [&](std::int64_t d) {
    __int128 v = lead;
    for (int i = 0; i < k; ++i) {
      v *= d;
      if (v > bound) return false;
    }
    return true;
  };
  auto d = static_cast<std::int64_t>(std::pow(static_cast<double>(bound) / static_cast<double>(lead), 1.0 / k));
  d = std::max<std::int64_t>(d, 0);
  while (d > 0 && !fits(d)) --d;
  while (fits(d + 1)) ++d;
  return d;
}

// Values f(d), d >= 1, inside [lo, hi], sorted and deduplicated.
struct PolynomialImage {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::vector<std::int64_t> values;
  // Least n with f(d) > hi for every d > n.
  std::int64_t m_prime = 0;
  // floor((hi / c_k)^(1/k)).
  std::int64_t m = 0;
  // Last argument evaluated; every d beyond it has f(d) > hi.
  std::int64_t certified_d = 0;
};

// Past this argument f is strictly increasing on the integers.
inline std::int64_t monotone_from(const IntPolynomial& f) {
  const std::int64_t lead = f.leading();
  const std::int64_t num = checked::mul(f.degree(), f.max_abs_coefficient());
  return checked::add(1, (num + lead - 1) / lead);
}

inline PolynomialImage image_in_window(const IntPolynomial& f, std::int64_t lo, std::int64_t hi) {
  if (f.leading() <= 0) throw ArgumentError("image_in_window expects a normalized polynomial");
  if (hi < lo) throw ArgumentError("empty window: hi < lo");
  PolynomialImage image;
  image.lo = lo;
  image.hi = hi;
  image.m = hi >= 0 ? floor_root(hi, f.leading(), f.degree()) : 0;
  const std::int64_t increasing = monotone_from(f);
  for (std::int64_t d = 1;; ++d) {
    const std::int64_t v = evaluate(f, d);
    if (v <= hi) image.m_prime = d;
    if (v >= lo && v <= hi) {
      if (image.values.size() % 4096 == 0) require_memory((image.values.size() + 4096) * 8, "polynomial image");
      image.values.push_back(v);
    }
    if (d > increasing && v > hi) {
      image.certified_d = d;
      break;
    }
  }
  std::sort(image.values.begin(), image.values.end());
  image.values.erase(std::unique(image.values.begin(), image.values.end()), image.values.end());
  return image;
}

namespace detail {

// Calls visit(r) for each r in [0, m) with f(r) = 0 mod m, stopping early when
// visit returns false. The first k+1
// values come from modular Horner; the rest follow from the forward
// difference table, so each residue costs k modular additions.
template <class Visit>
void for_each_root_mod(const IntPolynomial& f, std::uint64_t m, Visit&& visit) {
  if (m < 2) throw ArgumentError("modulus must be at least 2, got " + std::to_string(m));
  if (m > kRootCountCap) {
    throw ResourceError("modulus " + std::to_string(m) + " exceeds the root-count cap " +
                        std::to_string(kRootCountCap));
  }
  const int k = f.degree();
  std::vector<std::uint64_t> diff(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i <= k; ++i) diff[static_cast<std::size_t>(i)] = evaluate_mod(f, i, m);
  for (int level = 1; level <= k; ++level) {
    for (int i = k; i >= level; --i) {
      auto& a = diff[static_cast<std::size_t>(i)];
      const auto b = diff[static_cast<std::size_t>(i - 1)];
      a = a >= b ? a - b : a + m - b;
    }
  }
  for (std::uint64_t r = 0; r < m; ++r) {
    if (diff[0] == 0 && !visit(r)) return;
    for (int i = 0; i < k; ++i) {
      auto& a = diff[static_cast<std::size_t>(i)];
      a += diff[static_cast<std::size_t>(i + 1)];
      if (a >= m) a -= m;
    }
  }
}

}  // namespace detail

// Residues r in [0, m) with f(r) = 0 mod m, by exhaustive evaluation.
inline std::vector<std::uint64_t> roots_mod(const IntPolynomial& f, std::uint64_t m) {
  std::vector<std::uint64_t> out;
  detail::for_each_root_mod(f, m, [&](std::uint64_t r) {
    out.push_back(r);
    return true;
  });
  return out;
}

// z_f(m) without materializing the roots.
inline std::uint64_t count_roots_mod(const IntPolynomial& f, std::uint64_t m) {
  std::uint64_t z = 0;
  detail::for_each_root_mod(f, m, [&](std::uint64_t) {
    ++z;
    return true;
  });
  return z;
}

struct IntersectiveResult {
  bool pass = true;
  // Least modulus without a root, when one exists below the bound.
  std::optional<std::uint64_t> witness;
};

// f has a root mod n for all n <= bound iff it does so for every prime power
// q <= bound (CRT), and the least failing n is always a prime power.
inline IntersectiveResult is_intersective_up_to(const IntPolynomial& f, std::uint64_t bound) {
  if (bound < 1) throw ArgumentError("bound must be positive");
  if (bound > kRootCountCap) {
    throw ResourceError("bound " + std::to_string(bound) + " exceeds the root-count cap");
  }
  std::vector<std::uint64_t> prime_powers;
  for (std::uint64_t p : detail::small_primes_upto(bound)) {
    for (std::uint64_t q = p; q <= bound; q *= p) {
      prime_powers.push_back(q);
      if (q > bound / p) break;
    }
  }
  std::sort(prime_powers.begin(), prime_powers.end());
  for (auto q : prime_powers) {
    bool found = false;
    detail::for_each_root_mod(f, q, [&](std::uint64_t) {
      found = true;
      return false;
    });
    if (!found) return {false, q};
  }
  return {};
}

}  // namespace polyprime
