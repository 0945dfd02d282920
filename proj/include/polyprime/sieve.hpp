#pragma once

// Primality bitmaps, von Mangoldt weights and residue-class statistics.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polyprime/error.hpp"
#include "polyprime/parallel.hpp"
#include "polyprime/resources.hpp"

namespace polyprime {

struct SieveOptions {
  std::size_t segment_size = kDefaultSegmentSize;
  unsigned threads = 1;
};

// Immutable primality indicator over {0..limit}.
class PrimeTable {
 public:
  PrimeTable() = default;

  std::uint64_t limit() const noexcept { return limit_; }

  bool is_prime(std::uint64_t n) const noexcept {
    if (n > limit_) return false;
    return (words_[n >> 6] >> (n & 63)) & 1u;
  }

  // pi(limit), from the bitmap.
  std::uint64_t count() const noexcept { return count_; }

  std::vector<std::uint64_t> primes() const {
    std::vector<std::uint64_t> out;
    out.reserve(count_);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      for (std::uint64_t bits = words_[w]; bits != 0; bits &= bits - 1) {
        out.push_back(w * 64 + static_cast<std::uint64_t>(std::countr_zero(bits)));
      }
    }
    return out;
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const PrimeTable&, const PrimeTable&) = default;

 private:
  friend PrimeTable build_prime_table(std::uint64_t, const SieveOptions&);
  friend PrimeTable build_prime_table_monolithic(std::uint64_t);

  PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> words)
      : limit_(limit), words_(std::move(words)) {
    for (auto w : words_) count_ += static_cast<std::uint64_t>(std::popcount(w));
  }

  std::uint64_t limit_ = 0;
  std::uint64_t count_ = 0;
  std::vector<std::uint64_t> words_;
};

namespace detail {

inline void check_sieve_limit(std::uint64_t n) {
  if (n < 2) throw BoundsError("sieve limit must be at least 2, got " + std::to_string(n));
  if (n > kMaxSieveLimit) {
    throw BoundsError("sieve limit " + std::to_string(n) + " exceeds the maximum " +
                      std::to_string(kMaxSieveLimit));
  }
}

inline std::vector<std::uint32_t> small_primes_upto(std::uint64_t n) {
  std::vector<std::uint8_t> composite(n + 1, 0);
  std::vector<std::uint32_t> out;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = 1;
  }
  return out;
}

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace detail

// Segmented sieve of Eratosthenes. Only the output bitmap scales with N; each
// worker holds one segment buffer at a time.
inline PrimeTable build_prime_table(std::uint64_t n, const SieveOptions& options = {}) {
  detail::check_sieve_limit(n);
  if (options.segment_size == 0) throw ArgumentError("segment size must be positive");
  const std::uint64_t word_count = n / 64 + 1;
  require_memory(word_count * 8 + options.segment_size * resolve_threads(options.threads),
                 "prime table");

  const auto base = detail::small_primes_upto(detail::isqrt(n));
  std::vector<std::uint64_t> words(word_count, 0);
  const std::uint64_t seg = options.segment_size;
  const std::uint64_t segments = n / seg + 1;

  for_each_block(segments, options.threads, [&](std::size_t s) {
    const std::uint64_t lo = s * seg;
    const std::uint64_t hi = std::min(n + 1, lo + seg);  // [lo, hi)
    std::vector<std::uint8_t> flags(hi - lo, 1);
    for (std::uint64_t i = lo; i < std::min<std::uint64_t>(hi, 2); ++i) flags[i - lo] = 0;
    for (std::uint32_t p : base) {
      const std::uint64_t pp = std::uint64_t{p} * p;
      if (pp >= hi) break;
      std::uint64_t start = std::max(pp, (lo + p - 1) / p * p);
      for (std::uint64_t j = start; j < hi; j += p) flags[j - lo] = 0;
    }
    // Segment edges need not align with words, so bits are merged atomically.
    std::uint64_t pending = 0;
    std::uint64_t word = lo >> 6;
    for (std::uint64_t i = lo; i < hi; ++i) {
      if ((i >> 6) != word) {
        if (pending) std::atomic_ref<std::uint64_t>(words[word]).fetch_or(pending, std::memory_order_relaxed);
        pending = 0;
        word = i >> 6;
      }
      if (flags[i - lo]) pending |= std::uint64_t{1} << (i & 63);
    }
    if (pending) std::atomic_ref<std::uint64_t>(words[word]).fetch_or(pending, std::memory_order_relaxed);
  });
  return PrimeTable(n, std::move(words));
}

// Whole-range sieve; reference path for the segmented builder.
inline PrimeTable build_prime_table_monolithic(std::uint64_t n) {
  detail::check_sieve_limit(n);
  require_memory(n + 1 + (n / 64 + 1) * 8, "monolithic prime table");
  std::vector<std::uint8_t> flags(n + 1, 1);
  flags[0] = flags[1] = 0;
  for (std::uint64_t i = 2; i * i <= n; ++i) {
    if (!flags[i]) continue;
    for (std::uint64_t j = i * i; j <= n; j += i) flags[j] = 0;
  }
  std::vector<std::uint64_t> words(n / 64 + 1, 0);
  for (std::uint64_t i = 0; i <= n; ++i) {
    if (flags[i]) words[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
  return PrimeTable(n, std::move(words));
}

// Truncated von Mangoldt function: weight log p at n = p^j <= limit, else 0.
class LambdaWeights {
 public:
  explicit LambdaWeights(const PrimeTable& table) : limit_(table.limit()) {
    require_memory((limit_ + 1) * 8, "von Mangoldt weights");
    values_.assign(limit_ + 1, 0.0);
    for (std::uint64_t p : table.primes()) {
      const double lp = std::log(static_cast<double>(p));
      for (std::uint64_t q = p;; q *= p) {
        values_[q] = lp;
        support_.push_back(q);
        if (q > limit_ / p) break;
      }
    }
    std::sort(support_.begin(), support_.end());
    std::vector<double> nonzero;
    nonzero.reserve(support_.size());
    for (auto m : support_) nonzero.push_back(values_[m]);
    psi_ = pairwise_sum(nonzero);
  }

  std::uint64_t limit() const noexcept { return limit_; }

  double operator()(std::int64_t n) const noexcept {
    if (n < 1 || static_cast<std::uint64_t>(n) > limit_) return 0.0;
    return values_[static_cast<std::size_t>(n)];
  }

  // Dense view indexed by n in [0, limit]; entry 0 is zero.
  std::span<const double> values() const noexcept { return values_; }

  // Prime powers <= limit in increasing order.
  std::span<const std::uint64_t> support() const noexcept { return support_; }

  // Chebyshev psi(limit).
  double psi() const noexcept { return psi_; }

 private:
  std::uint64_t limit_;
  std::vector<double> values_;
  std::vector<std::uint64_t> support_;
  double psi_ = 0.0;
};

inline LambdaWeights lambda_weights(std::uint64_t n, const SieveOptions& options = {}) {
  return LambdaWeights(build_prime_table(n, options));
}

// counts[r] = #{p <= limit prime : p = r mod m}.
inline std::vector<std::uint64_t> prime_residue_counts(const PrimeTable& table, std::uint64_t m) {
  if (m < 2) throw ArgumentError("modulus must be at least 2, got " + std::to_string(m));
  require_memory(m * 8, "residue counts");
  std::vector<std::uint64_t> counts(m, 0);
  const auto words = table.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::uint64_t bits = words[w]; bits != 0; bits &= bits - 1) {
      const std::uint64_t p = w * 64 + static_cast<std::uint64_t>(std::countr_zero(bits));
      ++counts[p % m];
    }
  }
  return counts;
}

inline std::vector<std::uint64_t> prime_residue_counts(std::uint64_t n, std::uint64_t m,
                                                       const SieveOptions& options = {}) {
  if (m < 2) throw ArgumentError("modulus must be at least 2, got " + std::to_string(m));
  return prime_residue_counts(build_prime_table(n, options), m);
}

}  // namespace polyprime
