#pragma once

// Thin RAII layer over FFTW for real-data correlations and complex DFTs.

#include <fftw3.h>

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "polyprime/error.hpp"
#include "polyprime/resources.hpp"

namespace polyprime::fft {

namespace detail {

// FFTW's planner is not reentrant.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

struct PlanDestroy {
  void operator()(fftw_plan p) const noexcept {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

}  // namespace detail

inline std::size_t next_pow2(std::size_t n) {
  std::size_t l = 1;
  while (l < n) l <<= 1;
  return l;
}

// Real buffer of length n, padded so it can hold n/2+1 complex values in place.
class RealBuffer {
 public:
  explicit RealBuffer(std::size_t n) : n_(n) {
    const std::size_t doubles = 2 * (n / 2 + 1);
    require_memory(doubles * sizeof(double), "FFT buffer");
    data_.reset(static_cast<double*>(fftw_malloc(doubles * sizeof(double))));
    if (!data_) throw ResourceError("fftw_malloc failed");
    std::fill(data_.get(), data_.get() + doubles, 0.0);
  }

  std::size_t size() const noexcept { return n_; }
  double* real() noexcept { return data_.get(); }
  std::span<double> values() noexcept { return {data_.get(), n_}; }
  fftw_complex* spectrum() noexcept { return reinterpret_cast<fftw_complex*>(data_.get()); }
  std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

  void forward() { execute(FFTW_FORWARD); }
  // Unnormalized inverse; callers divide by size().
  void backward() { execute(FFTW_BACKWARD); }

 private:
  void execute(int direction) {
    detail::Plan plan;
    {
      std::lock_guard lock(detail::planner_mutex());
      plan.reset(direction == FFTW_FORWARD
                     ? fftw_plan_dft_r2c_1d(static_cast<int>(n_), real(), spectrum(), FFTW_ESTIMATE)
                     : fftw_plan_dft_c2r_1d(static_cast<int>(n_), spectrum(), real(), FFTW_ESTIMATE));
    }
    if (!plan) throw ResourceError("FFTW planning failed");
    fftw_execute(plan.get());
  }

  std::size_t n_;
  std::unique_ptr<double, detail::FftwFree> data_;
};

namespace detail {

using Complex = std::complex<double>;
using ComplexBuffer = std::unique_ptr<fftw_complex, FftwFree>;

inline ComplexBuffer complex_buffer(std::size_t n) {
  require_memory(n * sizeof(fftw_complex), "DFT buffer");
  ComplexBuffer buf(static_cast<fftw_complex*>(fftw_malloc(n * sizeof(fftw_complex))));
  if (!buf) throw ResourceError("fftw_malloc failed");
  return buf;
}

// In-place power-of-two plans, planned once per (length, direction) and run
// through fftw_execute_dft on caller buffers.
inline fftw_plan pow2_plan(std::size_t n, int direction) {
  std::lock_guard lock(planner_mutex());
  struct Entry {
    Plan plan;
    ComplexBuffer scratch;
  };
  static std::map<std::pair<std::size_t, int>, Entry> cache;
  auto& e = cache[{n, direction}];
  if (!e.plan) {
    e.scratch.reset(static_cast<fftw_complex*>(fftw_malloc(n * sizeof(fftw_complex))));
    if (!e.scratch) throw ResourceError("fftw_malloc failed");
    e.plan.reset(fftw_plan_dft_1d(static_cast<int>(n), e.scratch.get(), e.scratch.get(), direction,
                                  FFTW_ESTIMATE));
    if (!e.plan) throw ResourceError("FFTW planning failed");
  }
  return e.plan.get();
}

inline void run_pow2(fftw_complex* data, std::size_t n, int direction) {
  fftw_execute_dft(pow2_plan(n, direction), data, data);
}

inline Complex at(const fftw_complex* v, std::size_t i) { return {v[i][0], v[i][1]}; }
inline void put(fftw_complex* v, std::size_t i, Complex z) {
  v[i][0] = z.real();
  v[i][1] = z.imag();
}

}  // namespace detail

// out[j] = sum_t in[t] * exp(sign * 2 pi i j t / n) for arbitrary n.
// Lengths other than powers of two go through Bluestein's chirp transform.
inline std::vector<std::complex<double>> dft(std::span<const std::complex<double>> in, int sign) {
  using detail::Complex;
  const std::size_t n = in.size();
  const int direction = sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD;
  std::vector<Complex> out(n);
  if (n == 0) return out;
  if ((n & (n - 1)) == 0) {
    auto buf = detail::complex_buffer(n);
    for (std::size_t i = 0; i < n; ++i) detail::put(buf.get(), i, in[i]);
    detail::run_pow2(buf.get(), n, direction);
    for (std::size_t i = 0; i < n; ++i) out[i] = detail::at(buf.get(), i);
    return out;
  }
  // j t = (j^2 + t^2 - (j - t)^2) / 2, so out[j] = w_j sum_t (in[t] w_t) conj(w_{j-t})
  // with w_m = exp(sign pi i m^2 / n); m^2 is reduced mod 2n exactly.
  const std::size_t len = next_pow2(2 * n - 1);
  std::vector<Complex> w(n);
  const unsigned __int128 period = 2 * static_cast<unsigned __int128>(n);
  const long double pi = 3.141592653589793238462643383279502884L;
  for (std::size_t m = 0; m < n; ++m) {
    const auto r = static_cast<std::uint64_t>(static_cast<unsigned __int128>(m) * m % period);
    const long double phase = (sign > 0 ? pi : -pi) * static_cast<long double>(r) / static_cast<long double>(n);
    w[m] = std::polar(1.0, static_cast<double>(phase));
  }
  auto a = detail::complex_buffer(len);
  auto b = detail::complex_buffer(len);
  for (std::size_t i = 0; i < len; ++i) {
    detail::put(a.get(), i, 0.0);
    detail::put(b.get(), i, 0.0);
  }
  for (std::size_t t = 0; t < n; ++t) detail::put(a.get(), t, in[t] * w[t]);
  detail::put(b.get(), 0, std::conj(w[0]));
  for (std::size_t m = 1; m < n; ++m) {
    detail::put(b.get(), m, std::conj(w[m]));
    detail::put(b.get(), len - m, std::conj(w[m]));
  }
  detail::run_pow2(a.get(), len, FFTW_FORWARD);
  detail::run_pow2(b.get(), len, FFTW_FORWARD);
  for (std::size_t i = 0; i < len; ++i) detail::put(a.get(), i, detail::at(a.get(), i) * detail::at(b.get(), i));
  detail::run_pow2(a.get(), len, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t j = 0; j < n; ++j) out[j] = w[j] * detail::at(a.get(), j) * scale;
  return out;
}

}  // namespace polyprime::fft
