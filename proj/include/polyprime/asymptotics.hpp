#pragma once

// Predicted main terms: Gauss sums, singular series (Euler product and
// q-sum), local bias factors and the linear-form geometry factor C_k.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "polyprime/counting.hpp"
#include "polyprime/error.hpp"
#include "polyprime/fft.hpp"
#include "polyprime/polynomial.hpp"
#include "polyprime/sieve.hpp"

namespace polyprime {

inline constexpr std::uint64_t kDefaultTruncationPrime = 100'000;
inline constexpr std::uint64_t kDefaultTruncationQ = 10'000;
inline constexpr double kImaginaryTolerance = 1e-9;

namespace arith {

// Prime factorization by trial division, ascending, with multiplicity.
inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline int moebius(std::uint64_t n) {
  int mu = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

inline std::uint64_t totient(std::uint64_t n) {
  std::uint64_t phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace arith

// S_{a/q} = sum_{r=0}^{q-1} e(a f(r) / q). Phases are taken from the exact
// residues a f(r) mod q, so each distinct residue costs one exponential.
inline std::complex<double> gauss_sum(const IntPolynomial& f, std::uint64_t a, std::uint64_t q) {
  if (q == 0) throw ArgumentError("gauss_sum needs q >= 1");
  if (a >= q) throw ArgumentError("gauss_sum needs 0 <= a < q");
  require_memory(q * 8, "Gauss sum histogram");
  std::vector<std::uint64_t> hist(q, 0);
  for (std::uint64_t r = 0; r < q; ++r) {
    const auto fr = static_cast<unsigned __int128>(evaluate_mod(f, static_cast<std::int64_t>(r), q));
    ++hist[static_cast<std::size_t>(fr * a % q)];
  }
  std::complex<double> s = 0.0;
  for (std::uint64_t j = 0; j < q; ++j) {
    if (hist[j] == 0) continue;
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(q);
    s += static_cast<double>(hist[j]) * std::polar(1.0, phase);
  }
  return s;
}

// F(q) = mu(q)^2 / (q phi(q)^2) * sum_{(a,q)=1} S_{a/q}. All S_{a/q} are read
// off one length-q DFT of the residue histogram of f mod q.
inline double series_term(const IntPolynomial& f, std::uint64_t q) {
  if (q == 0) throw ArgumentError("series_term needs q >= 1");
  if (arith::moebius(q) == 0) return 0.0;
  if (q == 1) return 1.0;
  std::vector<std::complex<double>> hist(q, 0.0);
  for (std::uint64_t r = 0; r < q; ++r) hist[evaluate_mod(f, static_cast<std::int64_t>(r), q)] += 1.0;
  const auto sums = fft::dft(hist, +1);
  std::vector<char> coprime(q, 1);
  for (auto [p, e] : arith::factorize(q)) {
    for (std::uint64_t a = 0; a < q; a += p) coprime[a] = 0;
  }
  std::complex<double> total = 0.0;
  for (std::uint64_t a = 1; a < q; ++a) {
    if (coprime[a]) total += sums[a];
  }
  const double phi = static_cast<double>(arith::totient(q));
  const std::complex<double> term = total / (static_cast<double>(q) * phi * phi);
  if (std::fabs(term.imag()) >= kImaginaryTolerance) {
    throw AccuracyError("series term F(" + std::to_string(q) + ") has imaginary part " +
                        std::to_string(term.imag()));
  }
  return term.real();
}

// 1 + (z_f(p) - 1) / (p - 1)^2.
inline double euler_factor(const IntPolynomial& f, std::uint64_t p) {
  const auto z = static_cast<double>(count_roots_mod(f, p));
  const double d = static_cast<double>(p - 1) * static_cast<double>(p - 1);
  return (d + z - 1.0) / d;
}

// Probability that a prime difference lands on f's residues mod p, relative
// to the uniform 1/p: z/(p-1) + (p-2)(p-z)/(p-1)^2.
inline double bias_factor(const IntPolynomial& f, std::uint64_t p) {
  const auto z = static_cast<double>(count_roots_mod(f, p));
  const double pp = static_cast<double>(p);
  const double d = (pp - 1.0) * (pp - 1.0);
  // Numerator is an integer, identical to the one in euler_factor.
  return (z * (pp - 1.0) + (pp - 2.0) * (pp - z)) / d;
}

struct SingularSeriesResult {
  double value = 0.0;
  std::uint64_t truncation_prime = 0;
  // Relative bound on the omitted factors: |S / value - 1| <= tail_bound.
  double tail_bound = 0.0;
  std::vector<std::pair<std::uint64_t, double>> factors;
};

enum class PrimeClass { P0, P1, P2 };

inline const char* to_string(PrimeClass c) {
  switch (c) {
    case PrimeClass::P0: return "P0";
    case PrimeClass::P1: return "P1";
    case PrimeClass::P2: return "P2";
  }
  return "?";
}

// P0: p divides neither a1 nor a2; P2: p divides both; P1: otherwise.
inline PrimeClass partition_prime(LinearForm form, std::uint64_t p) {
  const auto ip = static_cast<std::int64_t>(p);
  const bool d1 = form.a1 % ip == 0;
  const bool d2 = form.a2 % ip == 0;
  if (d1 && d2) return PrimeClass::P2;
  if (d1 || d2) return PrimeClass::P1;
  return PrimeClass::P0;
}

inline double bias_factor_linear_form(const IntPolynomial& f, LinearForm form, std::uint64_t p) {
  switch (partition_prime(form, p)) {
    case PrimeClass::P0: return bias_factor(f, p);
    case PrimeClass::P1: {
      const auto z = static_cast<double>(count_roots_mod(f, p));
      return (static_cast<double>(p) - z) / static_cast<double>(p - 1);
    }
    case PrimeClass::P2: return static_cast<double>(count_roots_mod(f, p));
  }
  return 0.0;
}

namespace detail {

// 1 + F(p) with the class-dependent normalisation of F and
// sum_{a=1}^{p-1} S_{a/p} = p (z - 1) substituted exactly.
inline double local_factor(const IntPolynomial& f, LinearForm form, std::uint64_t p) {
  const auto z = static_cast<double>(count_roots_mod(f, p));
  const double pm1 = static_cast<double>(p - 1);
  switch (partition_prime(form, p)) {
    case PrimeClass::P0: return (pm1 * pm1 + (z - 1.0)) / (pm1 * pm1);
    case PrimeClass::P1: return (pm1 - (z - 1.0)) / pm1;
    case PrimeClass::P2: return z;
  }
  return 0.0;
}

inline std::vector<std::uint64_t> extra_primes(const IntPolynomial& f, LinearForm form, std::uint64_t bound) {
  // Primes above the truncation that still carry a non-negligible factor:
  // divisors of the content of f (z = p there) and of a1 a2.
  std::vector<std::uint64_t> out;
  auto add = [&](std::uint64_t n) {
    for (auto [p, e] : arith::factorize(n)) {
      if (p > bound) out.push_back(p);
    }
  };
  add(f.content());
  add(static_cast<std::uint64_t>(form.a1));
  add(static_cast<std::uint64_t>(form.a2 < 0 ? -form.a2 : form.a2));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

// Euler product over p <= P for the linear form's singular series. The
// product short-circuits to an exact 0 once a factor vanishes.
inline SingularSeriesResult generalized_singular_series(const IntPolynomial& f, LinearForm form,
                                                        std::uint64_t truncation) {
  if (truncation < 2) throw ArgumentError("truncation prime must be at least 2");
  SingularSeriesResult result;
  result.truncation_prime = truncation;
  auto primes = build_prime_table(std::max<std::uint64_t>(truncation, 2)).primes();
  for (auto p : detail::extra_primes(f, form, truncation)) primes.push_back(p);
  double value = 1.0;
  for (auto p : primes) {
    const double factor = detail::local_factor(f, form, p);
    result.factors.emplace_back(p, factor);
    if (factor == 0.0) {
      result.value = 0.0;
      result.tail_bound = 0.0;
      return result;
    }
    value *= factor;
  }
  const double c = std::max(f.degree() - 1, 1);
  result.value = value;
  result.tail_bound = std::expm1(c / static_cast<double>(truncation - 1));
  return result;
}

// prod_p (1 + (z_f(p) - 1)/(p - 1)^2) truncated at P, with tail bound.
inline SingularSeriesResult singular_series(const IntPolynomial& f,
                                            std::uint64_t truncation = kDefaultTruncationPrime) {
  if (truncation < 2) throw ArgumentError("truncation prime must be at least 2");
  SingularSeriesResult result;
  result.truncation_prime = truncation;
  auto primes = build_prime_table(truncation).primes();
  for (auto p : detail::extra_primes(f, LinearForm{}, truncation)) primes.push_back(p);
  double value = 1.0;
  for (auto p : primes) {
    const double factor = euler_factor(f, p);
    result.factors.emplace_back(p, factor);
    if (factor == 0.0) {
      result.value = 0.0;
      result.tail_bound = 0.0;
      return result;
    }
    value *= factor;
  }
  result.value = value;
  result.tail_bound = std::expm1(std::max(f.degree() - 1, 1) / static_cast<double>(truncation - 1));
  return result;
}

// sum_{q <= Q} F(q); converges slowly, used as a cross-check of the product.
inline double singular_series_qsum(const IntPolynomial& f, std::uint64_t truncation = kDefaultTruncationQ) {
  if (truncation < 1) throw ArgumentError("q-sum truncation must be at least 1");
  double total = 0.0;
  for (std::uint64_t q = 1; q <= truncation; ++q) total += series_term(f, q);
  return total;
}

// C_k(a1, a2), the archimedean factor of the linear form.
inline double c_factor(int k, LinearForm form) {
  if (k < 1) throw ArgumentError("degree must be at least 1");
  const double a1 = static_cast<double>(form.a1);
  const double a2 = static_cast<double>(form.a2);
  const double e = 1.0 / k;
  auto root = [e](double x) { return x <= 0.0 ? 0.0 : std::pow(x, e); };
  if (form.a2 > 0) return (root(a1 + a2) - root(a1)) / a2 + (root(a1 + a2) - root(a2)) / a1;
  if (form.a2 >= -form.a1) return (root(a1 + a2) - root(a1)) / a2 + root(a1 + a2) / a1;
  return -root(a1) / a2;
}

// S(f,a1,a2) C_k(a1,a2) c_k^{-1/k} k/(k+1) N^{(k+1)/k}.
inline double main_term_weighted(const IntPolynomial& f, LinearForm form, double n, double series_value) {
  const int k = f.degree();
  const double geometry = form.is_difference() ? 1.0 : c_factor(k, form);
  if (series_value == 0.0) return 0.0;
  return series_value * geometry * std::pow(static_cast<double>(f.leading()), -1.0 / k) *
         (static_cast<double>(k) / (k + 1)) * std::pow(n, static_cast<double>(k + 1) / k);
}

inline double main_term_unweighted(const IntPolynomial& f, LinearForm form, double n, double series_value) {
  const double log_n = std::log(n);
  return main_term_weighted(f, form, n, series_value) / (log_n * log_n);
}

}  // namespace polyprime
