#pragma once

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>

#include "polyprime/error.hpp"

namespace polyprime {

#ifndef POLYPRIME_SEGMENT_SIZE
#define POLYPRIME_SEGMENT_SIZE (std::size_t{1} << 18)
#endif

inline constexpr std::size_t kDefaultSegmentSize = POLYPRIME_SEGMENT_SIZE;

// Hard ceiling on any sieve limit, independent of the memory budget.
inline constexpr std::uint64_t kMaxSieveLimit = 1'000'000'000;

// Largest modulus accepted by the exhaustive root counter.
inline constexpr std::uint64_t kRootCountCap = 10'000'000;

inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{4} << 30;

// Parses sizes such as "512M", "2G", "1048576". Returns 0 on malformed input.
inline std::uint64_t parse_byte_size(std::string_view text) {
  if (text.empty()) return 0;
  std::uint64_t value = 0;
  std::size_t i = 0;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    value = value * 10 + static_cast<std::uint64_t>(text[i] - '0');
    if (value > (std::uint64_t{1} << 50)) return 0;
  }
  if (i == 0) return 0;
  if (i == text.size()) return value;
  if (i + 1 != text.size() && !(i + 2 == text.size() && (text[i + 1] == 'B' || text[i + 1] == 'b')))
    return 0;
  switch (std::toupper(static_cast<unsigned char>(text[i]))) {
    case 'K': return value << 10;
    case 'M': return value << 20;
    case 'G': return value << 30;
    case 'T': return value << 40;
    case 'B': return value;
    default: return 0;
  }
}

// Allocation ceiling in bytes, read from POLYPRIME_MAX_MEMORY when set.
inline std::uint64_t memory_budget() {
  if (const char* env = std::getenv("POLYPRIME_MAX_MEMORY")) {
    if (auto parsed = parse_byte_size(env); parsed > 0) return parsed;
  }
  return kDefaultMemoryBudget;
}

inline void require_memory(std::uint64_t bytes, std::string_view what) {
  if (bytes > memory_budget()) {
    throw ResourceError(std::string(what) + " needs " + std::to_string(bytes) +
                        " bytes, over the memory budget of " +
                        std::to_string(memory_budget()) + " (POLYPRIME_MAX_MEMORY)");
  }
}

}  // namespace polyprime
