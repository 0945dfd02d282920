#pragma once

// Exact prime-pair counts r_{f,a1,a2}(N) and von Mangoldt weighted counts
// R_{f,a1,a2}(N), each by a direct loop and by FFT correlation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polyprime/error.hpp"
#include "polyprime/fft.hpp"
#include "polyprime/parallel.hpp"
#include "polyprime/polynomial.hpp"
#include "polyprime/sieve.hpp"

namespace polyprime {

// a1 * p1 + a2 * p2 with a1 > 0 and a2 != 0. The default is the difference.
struct LinearForm {
  std::int64_t a1 = 1;
  std::int64_t a2 = -1;

  LinearForm() = default;
  LinearForm(std::int64_t first, std::int64_t second) : a1(first), a2(second) {
    if (a1 <= 0) throw ArgumentError("linear form needs a1 > 0, got " + std::to_string(a1));
    if (a2 == 0) throw ArgumentError("linear form needs a2 != 0");
  }

  bool is_difference() const noexcept { return a1 == 1 && a2 == -1; }

  friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

enum class CountPath { automatic, direct, spectral };

struct CountOptions {
  CountPath path = CountPath::automatic;
  // automatic selects the spectral path above this N.
  std::uint64_t crossover = 100'000;
  unsigned threads = 1;

  bool use_spectral(std::uint64_t n) const noexcept {
    return path == CountPath::spectral || (path == CountPath::automatic && n > crossover);
  }
};

// Real sequence indexed by the integers in [lo, lo + values.size()).
struct Spectrum {
  std::int64_t lo = 0;
  std::vector<double> values;

  std::int64_t hi() const noexcept { return lo + static_cast<std::int64_t>(values.size()) - 1; }
  double at(std::int64_t s) const noexcept {
    if (s < lo || s > hi()) return 0.0;
    return values[static_cast<std::size_t>(s - lo)];
  }
};

// spectrum[s] = sum over a1*n1 + a2*n2 = s of w[n1] * w[n2], where w[n] is the
// weight at the integer n, n = 0..w.size()-1. Computed by one zero-padded
// real FFT correlation, O(L log L) with L >= (a1 + |a2|) * N.
inline Spectrum pair_sum_spectrum(std::span<const double> w, LinearForm form) {
  if (w.size() < 2) throw BoundsError("spectrum needs at least two weights");
  const auto n = static_cast<std::int64_t>(w.size()) - 1;
  const std::int64_t b = form.a2 < 0 ? -form.a2 : form.a2;
  const std::int64_t span_len = checked::add(checked::add(checked::mul(form.a1, n), checked::mul(b, n)), 1);
  const std::size_t len = fft::next_pow2(static_cast<std::size_t>(span_len));
  if (len > (std::size_t{1} << 31)) throw ResourceError("spectrum length exceeds FFT size limit");

  Spectrum out;
  out.values.resize(static_cast<std::size_t>(span_len));
  if (form.a2 == -form.a1) {
    // Autocorrelation of w placed on the lattice a1 * Z.
    fft::RealBuffer x(len);
    for (std::int64_t i = 0; i <= n; ++i) x.real()[i * form.a1] = w[static_cast<std::size_t>(i)];
    x.forward();
    auto* c = x.spectrum();
    for (std::size_t j = 0; j < x.spectrum_size(); ++j) {
      c[j][0] = c[j][0] * c[j][0] + c[j][1] * c[j][1];
      c[j][1] = 0.0;
    }
    x.backward();
    const double scale = 1.0 / static_cast<double>(len);
    const std::int64_t reach = form.a1 * n;
    out.lo = -reach;
    for (std::int64_t s = -reach; s <= reach; ++s) {
      const std::size_t idx = s >= 0 ? static_cast<std::size_t>(s) : len - static_cast<std::size_t>(-s);
      out.values[static_cast<std::size_t>(s + reach)] = x.real()[idx] * scale;
    }
    return out;
  }

  fft::RealBuffer x(len);
  fft::RealBuffer y(len);
  for (std::int64_t i = 0; i <= n; ++i) {
    x.real()[i * form.a1] = w[static_cast<std::size_t>(i)];
    const std::int64_t pos = form.a2 > 0 ? i * b : (n - i) * b;
    y.real()[pos] = w[static_cast<std::size_t>(i)];
  }
  x.forward();
  y.forward();
  auto* cx = x.spectrum();
  auto* cy = y.spectrum();
  for (std::size_t j = 0; j < x.spectrum_size(); ++j) {
    const double re = cx[j][0] * cy[j][0] - cx[j][1] * cy[j][1];
    const double im = cx[j][0] * cy[j][1] + cx[j][1] * cy[j][0];
    cx[j][0] = re;
    cx[j][1] = im;
  }
  x.backward();
  const double scale = 1.0 / static_cast<double>(len);
  out.lo = form.a2 > 0 ? 0 : -b * n;
  for (std::int64_t t = 0; t < span_len; ++t) out.values[static_cast<std::size_t>(t)] = x.real()[t] * scale;
  return out;
}

// spectrum[h] = sum_n w[n] * w[n - h] over shifts h in [-(N-1), N-1].
inline Spectrum shift_spectrum(std::span<const double> w) {
  Spectrum full = pair_sum_spectrum(w, LinearForm{});
  const auto reach = static_cast<std::int64_t>(w.size()) - 2;
  Spectrum out;
  out.lo = -reach;
  out.values.assign(full.values.begin() + (-reach - full.lo), full.values.begin() + (reach - full.lo) + 1);
  return out;
}

namespace detail {

inline void require_normalized(const IntPolynomial& f) {
  if (f.leading() <= 0) throw ArgumentError("counting expects a normalized polynomial (c_k > 0)");
}

inline std::vector<double> prime_indicator(const PrimeTable& table) {
  require_memory((table.limit() + 1) * 8, "prime indicator");
  std::vector<double> w(table.limit() + 1, 0.0);
  for (auto p : table.primes()) w[p] = 1.0;
  return w;
}

inline std::uint64_t rounded_count(double v) {
  const double r = std::nearbyint(v);
  if (std::fabs(v - r) > 0.25 || r < 0) {
    throw AccuracyError("spectral count " + std::to_string(v) + " is not near an integer");
  }
  return static_cast<std::uint64_t>(r);
}

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

constexpr std::size_t kBlock = 64;

}  // namespace detail

// r_{f,a1,a2}(N) = #{(p1, p2) in P_N^2 : a1 p1 + a2 p2 in f({1, 2, ...})}.
inline std::uint64_t count_pairs_linear_form(const PrimeTable& table, const IntPolynomial& f,
                                             LinearForm form, const CountOptions& options = {}) {
  detail::require_normalized(f);
  const auto primes = table.primes();
  if (primes.empty()) return 0;
  const auto pmin = static_cast<std::int64_t>(primes.front());
  const auto pmax = static_cast<std::int64_t>(primes.back());
  const std::int64_t lo = checked::add(checked::mul(form.a1, pmin),
                                       std::min(checked::mul(form.a2, pmin), checked::mul(form.a2, pmax)));
  const std::int64_t hi = checked::add(checked::mul(form.a1, pmax),
                                       std::max(checked::mul(form.a2, pmin), checked::mul(form.a2, pmax)));
  const PolynomialImage image = image_in_window(f, lo, hi);
  const auto& targets = image.values;
  if (targets.empty()) return 0;

  if (options.use_spectral(table.limit())) {
    const Spectrum spec = pair_sum_spectrum(detail::prime_indicator(table), form);
    std::uint64_t total = 0;
    for (auto v : targets) total += detail::rounded_count(spec.at(v));
    return total;
  }

  // Direct: for each target v, solve a2 * p2 = v - a1 * p1, scanning only the
  // primes p1 in residue classes mod |a2| where a solution can exist.
  const std::int64_t b = form.a2 < 0 ? -form.a2 : form.a2;
  std::vector<std::vector<std::int64_t>> by_residue(static_cast<std::size_t>(b));
  for (auto p : primes) by_residue[static_cast<std::size_t>(p % static_cast<std::uint64_t>(b))].push_back(static_cast<std::int64_t>(p));
  const std::int64_t limit = static_cast<std::int64_t>(table.limit());

  const std::size_t blocks = (targets.size() + detail::kBlock - 1) / detail::kBlock;
  std::vector<std::uint64_t> partial(blocks, 0);
  for_each_block(blocks, options.threads, [&](std::size_t blk) {
    std::uint64_t acc = 0;
    const std::size_t end = std::min(targets.size(), (blk + 1) * detail::kBlock);
    for (std::size_t i = blk * detail::kBlock; i < end; ++i) {
      const std::int64_t v = targets[i];
      const std::int64_t want = detail::floor_mod(v, b);
      for (std::int64_t r = 0; r < b; ++r) {
        if (detail::floor_mod(form.a1 * r, b) != want) continue;
        for (std::int64_t p1 : by_residue[static_cast<std::size_t>(r)]) {
          const std::int64_t p2 = (v - form.a1 * p1) / form.a2;
          if (p2 >= 2 && p2 <= limit && table.is_prime(static_cast<std::uint64_t>(p2))) ++acc;
        }
      }
    }
    partial[blk] = acc;
  });
  std::uint64_t total = 0;
  for (auto c : partial) total += c;
  return total;
}

// r_f(N): ordered pairs with p1 - p2 in the image of f.
inline std::uint64_t count_pairs_exact(const PrimeTable& table, const IntPolynomial& f,
                                       const CountOptions& options = {}) {
  return count_pairs_linear_form(table, f, LinearForm{}, options);
}

// Argument cutoff M = floor((max(a1, a1 + a2) N / c_k)^(1/k)) of the weighted count.
inline std::int64_t weighted_cutoff(const IntPolynomial& f, LinearForm form, std::uint64_t n) {
  const std::int64_t scale = std::max(form.a1, checked::add(form.a1, form.a2));
  return floor_root(checked::mul(scale, static_cast<std::int64_t>(n)), f.leading(), f.degree());
}

// R_{f,a1,a2}(N) = sum_{d=1}^{M} sum_{a1 n1 + a2 n2 = f(d)} L(n1) L(n2), with
// L the von Mangoldt function truncated to [1, N]. Arguments d with equal f(d)
// are counted separately.
inline double weighted_count_linear_form(const LambdaWeights& lambda, const IntPolynomial& f,
                                         LinearForm form, const CountOptions& options = {}) {
  detail::require_normalized(f);
  const std::int64_t m = weighted_cutoff(f, form, lambda.limit());
  if (m < 1) return 0.0;
  std::vector<std::int64_t> targets(static_cast<std::size_t>(m));
  for (std::int64_t d = 1; d <= m; ++d) targets[static_cast<std::size_t>(d - 1)] = evaluate(f, d);
  std::vector<double> per_d(targets.size(), 0.0);

  if (options.use_spectral(lambda.limit())) {
    const Spectrum spec = pair_sum_spectrum(lambda.values(), form);
    for (std::size_t i = 0; i < targets.size(); ++i) per_d[i] = spec.at(targets[i]);
    return pairwise_sum(per_d);
  }

  const auto support = lambda.support();
  const std::int64_t b = form.a2 < 0 ? -form.a2 : form.a2;
  const std::int64_t limit = static_cast<std::int64_t>(lambda.limit());
  const std::size_t blocks = (targets.size() + detail::kBlock - 1) / detail::kBlock;
  for_each_block(blocks, options.threads, [&](std::size_t blk) {
    std::vector<double> terms;
    const std::size_t end = std::min(targets.size(), (blk + 1) * detail::kBlock);
    for (std::size_t i = blk * detail::kBlock; i < end; ++i) {
      const std::int64_t s = targets[i];
      terms.clear();
      // n2 in [1, limit] confines a1 * n1 to [lo, hi].
      const std::int64_t lo = form.a2 > 0 ? s - form.a2 * limit : s - form.a2;
      const std::int64_t hi = form.a2 > 0 ? s - form.a2 : s - form.a2 * limit;
      if (hi < form.a1) continue;
      const auto first = std::lower_bound(support.begin(), support.end(),
                                          static_cast<std::uint64_t>(std::max<std::int64_t>(lo, 0) / form.a1));
      const auto last = std::upper_bound(first, support.end(), static_cast<std::uint64_t>(hi / form.a1));
      for (auto it = first; it != last; ++it) {
        const auto n1 = static_cast<std::int64_t>(*it);
        const std::int64_t t = s - form.a1 * n1;
        if (b != 1 && t % form.a2 != 0) continue;
        const std::int64_t n2 = t / form.a2;
        if (n2 < 1 || n2 > limit) continue;
        const double w2 = lambda(n2);
        if (w2 != 0.0) terms.push_back(lambda(n1) * w2);
      }
      per_d[i] = pairwise_sum(terms);
    }
  });
  return pairwise_sum(per_d);
}

// R_f(N) = sum_{d=1}^{M} sum_n L(n) L(n - f(d)).
inline double weighted_count(const LambdaWeights& lambda, const IntPolynomial& f,
                             const CountOptions& options = {}) {
  return weighted_count_linear_form(lambda, f, LinearForm{}, options);
}

inline std::uint64_t count_pairs_exact(const IntPolynomial& f, std::uint64_t n,
                                       const CountOptions& options = {}) {
  return count_pairs_exact(build_prime_table(n, {kDefaultSegmentSize, options.threads}), f, options);
}

inline std::uint64_t count_pairs_linear_form(const IntPolynomial& f, LinearForm form, std::uint64_t n,
                                             const CountOptions& options = {}) {
  return count_pairs_linear_form(build_prime_table(n, {kDefaultSegmentSize, options.threads}), f, form,
                                 options);
}

inline double weighted_count(const IntPolynomial& f, std::uint64_t n, const CountOptions& options = {}) {
  return weighted_count(lambda_weights(n, {kDefaultSegmentSize, options.threads}), f, options);
}

inline double weighted_count_linear_form(const IntPolynomial& f, LinearForm form, std::uint64_t n,
                                         const CountOptions& options = {}) {
  return weighted_count_linear_form(lambda_weights(n, {kDefaultSegmentSize, options.threads}), f, form,
                                    options);
}

}  // namespace polyprime
