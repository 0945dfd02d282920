#pragma once

// Exponential sums, the major-arc building blocks, and numerical checks of
// the circle-method identity R_f(N) = int_0^1 |L^(a)|^2 S_M(a) da.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "polyprime/asymptotics.hpp"
#include "polyprime/counting.hpp"
#include "polyprime/error.hpp"
#include "polyprime/fft.hpp"
#include "polyprime/parallel.hpp"
#include "polyprime/polynomial.hpp"
#include "polyprime/sieve.hpp"

namespace polyprime {

namespace detail {

// e(t) = exp(2 pi i t) with t reduced mod 1 in extended precision.
inline std::complex<double> unit(long double t) {
  t -= std::floor(t);
  return std::polar(1.0, static_cast<double>(2.0L * std::numbers::pi_v<long double> * t));
}

}  // namespace detail

struct ArcPoint {
  double alpha = 0.0;
  std::complex<double> value_lambda_hat;
  std::complex<double> value_weyl;
};

// L^_N(alpha) = sum_n L_N(n) e(-n alpha), by direct summation.
inline std::complex<double> lambda_hat(const LambdaWeights& lambda, double alpha) {
  std::complex<double> s = 0.0;
  for (auto n : lambda.support()) {
    s += lambda(static_cast<std::int64_t>(n)) * detail::unit(-static_cast<long double>(n) * alpha);
  }
  return s;
}

// S_M(alpha) = sum_{d=1}^{M} e(f(d) alpha).
inline std::complex<double> weyl_sum(const IntPolynomial& f, std::int64_t m, double alpha) {
  if (m < 0) throw ArgumentError("weyl_sum needs M >= 0");
  std::complex<double> s = 0.0;
  for (std::int64_t d = 1; d <= m; ++d) {
    s += detail::unit(static_cast<long double>(evaluate(f, d)) * alpha);
  }
  return s;
}

inline ArcPoint arc_point(const LambdaWeights& lambda, const IntPolynomial& f, std::int64_t m, double alpha) {
  return {alpha, lambda_hat(lambda, alpha), weyl_sum(f, m, alpha)};
}

// nu_N(beta) = sum_{n=1}^{N} e(-n beta)
//            = e(-(N+1) beta / 2) sin(pi N beta) / sin(pi beta).
inline std::complex<double> nu(std::uint64_t n, double beta) {
  const long double frac = beta - std::floor(static_cast<long double>(beta));
  if (frac == 0.0L) return static_cast<double>(n);
  const long double pi = std::numbers::pi_v<long double>;
  // sin(pi x) with x = N beta reduced to [0, 1) and the sign of the half-turns.
  const long double nb = static_cast<long double>(n) * frac;
  const long double whole = std::floor(nb);
  const long double sign = std::fmod(whole, 2.0L) == 0.0L ? 1.0L : -1.0L;
  const long double ratio = sign * std::sin(pi * (nb - whole)) / std::sin(pi * frac);
  return detail::unit(-static_cast<long double>(n + 1) * frac / 2.0L) * static_cast<double>(ratio);
}

struct QuadratureOptions {
  double relative_tolerance = 1e-8;  // absolute tolerance is this times M
  std::size_t max_panels = std::size_t{1} << 22;
};

// I_M(beta) = int_0^M e(f(x) beta) dx by adaptive Gauss-Kronrod (7, 15).
// The initial grid puts at most a quarter turn of phase on each panel.
inline std::complex<double> i_m(const IntPolynomial& f, double m, double beta,
                                const QuadratureOptions& options = {}) {
  if (m < 0) throw ArgumentError("i_m needs M >= 0");
  if (m == 0) return 0.0;
  if (beta == 0.0) return m;
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();

  const auto& c = f.ascending();
  auto phase_fn = [&](double x) {
    long double v = 0.0L;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + static_cast<long double>(*it);
    return detail::unit(v * beta);
  };

  struct Panel {
    double a, b;
    std::complex<double> value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto integrate = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const auto center = phase_fn(mid);
    std::complex<double> kron = wk[0] * center;
    std::complex<double> gauss = wg[0] * center;
    for (std::size_t i = 1; i < xk.size(); ++i) {
      const auto pair = phase_fn(mid - half * xk[i]) + phase_fn(mid + half * xk[i]);
      kron += wk[i] * pair;
      if (i % 2 == 0) gauss += wg[i / 2] * pair;
    }
    return Panel{a, b, kron * half, std::abs((kron - gauss) * half)};
  };

  // |d/dx (f(x) beta)| <= |beta| sum_i i |c_i| M^(i-1) on [0, M].
  double slope = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    slope += static_cast<double>(i) * std::fabs(static_cast<double>(c[i])) * std::pow(m, static_cast<double>(i - 1));
  }
  const double turns = std::fabs(beta) * slope * m;
  const auto initial = static_cast<std::size_t>(std::ceil(std::max(1.0, 4.0 * turns)));
  if (initial > options.max_panels) {
    throw AccuracyError("I_M integrand oscillates beyond the panel cap");
  }

  const double tolerance = options.relative_tolerance * m;
  std::priority_queue<Panel> heap;
  double total_error = 0.0;
  for (std::size_t i = 0; i < initial; ++i) {
    const double a = m * static_cast<double>(i) / static_cast<double>(initial);
    const double b = m * static_cast<double>(i + 1) / static_cast<double>(initial);
    const Panel panel = integrate(a, b);
    total_error += panel.error;
    heap.push(panel);
  }
  while (total_error > tolerance) {
    if (heap.size() >= options.max_panels) {
      throw AccuracyError("I_M quadrature did not reach tolerance within " +
                          std::to_string(options.max_panels) + " panels");
    }
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = integrate(worst.a, mid);
    const Panel right = integrate(mid, worst.b);
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  std::vector<Panel> all;
  all.reserve(heap.size());
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  std::vector<double> re(all.size()), im(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    re[i] = all[i].value.real();
    im[i] = all[i].value.imag();
  }
  return {pairwise_sum(re), pairwise_sum(im)};
}

struct OrthogonalityReport {
  double lhs = 0.0;  // weighted count by direct summation
  double rhs = 0.0;  // zero-frequency coefficient of |L^|^2 S_M
  double relative_error = 0.0;
  std::size_t dft_length = 0;
};

inline constexpr std::uint64_t kOrthogonalityMaxN = 10'000;

// Both sides of R_f(N) = int_0^1 |L^_N(a)|^2 S_M(a) da. The integrand is a
// trigonometric polynomial with frequencies in [-(N + max|f|), N + max|f|],
// so the mean over L > 2 (N + max|f|) equispaced points is exact.
inline OrthogonalityReport verify_orthogonality(const LambdaWeights& lambda, const IntPolynomial& f) {
  const std::uint64_t n = lambda.limit();
  if (n > kOrthogonalityMaxN) {
    throw BoundsError("orthogonality check is limited to N <= " + std::to_string(kOrthogonalityMaxN));
  }
  OrthogonalityReport report;
  report.lhs = weighted_count(lambda, f, {CountPath::direct, 0, 1});

  const std::int64_t m = weighted_cutoff(f, LinearForm{}, n);
  std::int64_t reach = 0;
  std::vector<std::int64_t> shifts;
  for (std::int64_t d = 1; d <= m; ++d) {
    shifts.push_back(evaluate(f, d));
    reach = std::max(reach, shifts.back() < 0 ? -shifts.back() : shifts.back());
  }
  const std::uint64_t bandwidth = 2 * (n + static_cast<std::uint64_t>(reach)) + 1;
  require_memory(bandwidth * 4 * sizeof(std::complex<double>), "orthogonality DFT");
  const std::size_t len = fft::next_pow2(bandwidth);
  report.dft_length = len;

  std::vector<std::complex<double>> lam(len, 0.0), hist(len, 0.0);
  for (auto k : lambda.support()) lam[k] = lambda(static_cast<std::int64_t>(k));
  const auto ilen = static_cast<std::int64_t>(len);
  for (auto s : shifts) hist[static_cast<std::size_t>(detail::floor_mod(s, ilen))] += 1.0;
  const auto lam_hat = fft::dft(lam, -1);  // L^(j / len)
  const auto weyl = fft::dft(hist, +1);    // S_M(j / len)
  std::vector<double> terms(len);
  for (std::size_t j = 0; j < len; ++j) terms[j] = std::norm(lam_hat[j]) * weyl[j].real();
  report.rhs = pairwise_sum(terms) / static_cast<double>(len);
  report.relative_error = std::fabs(report.lhs - report.rhs) / std::max(std::fabs(report.lhs), 1.0);
  return report;
}

// prob[r] = Pr(a1 p1 + a2 p2 = r mod m) for primes p1, p2 <= N drawn uniformly.
inline std::vector<double> empirical_form_distribution(const PrimeTable& table, std::uint64_t m, LinearForm form) {
  const auto counts = prime_residue_counts(table, m);
  const double total = static_cast<double>(table.count());
  const auto im = static_cast<std::int64_t>(m);
  std::vector<double> prob(m, 0.0);
  for (std::uint64_t i = 0; i < m; ++i) {
    if (counts[i] == 0) continue;
    for (std::uint64_t j = 0; j < m; ++j) {
      if (counts[j] == 0) continue;
      const auto r = detail::floor_mod(detail::floor_mod(form.a1, im) * static_cast<std::int64_t>(i) +
                                           detail::floor_mod(form.a2, im) * static_cast<std::int64_t>(j),
                                       im);
      prob[static_cast<std::size_t>(r)] += static_cast<double>(counts[i]) * static_cast<double>(counts[j]);
    }
  }
  for (auto& p : prob) p /= total * total;
  return prob;
}

// Residue distribution of p1 - p2 mod m.
inline std::vector<double> empirical_difference_distribution(const PrimeTable& table, std::uint64_t m) {
  return empirical_form_distribution(table, m, LinearForm{});
}

// 1/(p-1) at residue 0 and (p-2)/(p-1)^2 elsewhere.
inline std::vector<double> predicted_difference_distribution(std::uint64_t p) {
  const double pm1 = static_cast<double>(p - 1);
  std::vector<double> prob(p, (pm1 - 1.0) / (pm1 * pm1));
  prob[0] = 1.0 / pm1;
  return prob;
}

// Bias factor measured from the prime residues up to N:
// sum_a Pr(a1 p1 + a2 p2 = a mod p) #{x mod p : f(x) = a}.
inline double empirical_bias_factor(const PrimeTable& table, const IntPolynomial& f, LinearForm form,
                                    std::uint64_t p) {
  const auto prob = empirical_form_distribution(table, p, form);
  std::vector<std::uint64_t> solutions(p, 0);
  for (std::uint64_t x = 0; x < p; ++x) ++solutions[evaluate_mod(f, static_cast<std::int64_t>(x), p)];
  double b = 0.0;
  for (std::uint64_t a = 0; a < p; ++a) b += prob[a] * static_cast<double>(solutions[a]);
  return b;
}

}  // namespace polyprime
