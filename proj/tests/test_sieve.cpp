#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "oracles.hpp"
#include "polyprime/sieve.hpp"

using namespace polyprime;

TEST(Sieve, SmallTable) {
  const auto t = build_prime_table(10);
  EXPECT_EQ(t.primes(), (std::vector<std::uint64_t>{2, 3, 5, 7}));
  EXPECT_FALSE(t.is_prime(0));
  EXPECT_FALSE(t.is_prime(1));
  EXPECT_FALSE(t.is_prime(11));  // beyond the limit
}

TEST(Sieve, PrimeCounts) {
  EXPECT_EQ(build_prime_table(100).count(), 25u);
  EXPECT_EQ(build_prime_table(1'000'000).count(), 78498u);
}

TEST(Sieve, AgreesWithTrialDivision) {
  const auto t = build_prime_table(10'000);
  for (std::int64_t n = 0; n <= 10'000; ++n) ASSERT_EQ(t.is_prime(n), oracle::is_prime(n)) << n;
}

TEST(Sieve, SegmentSizeIndependent) {
  const auto reference = build_prime_table_monolithic(200'003);
  for (std::size_t seg : {1u, 7u, 64u, 1000u, 4096u, 1u << 18}) {
    EXPECT_EQ(build_prime_table(200'003, {seg, 1}), reference) << "segment " << seg;
  }
  EXPECT_EQ(build_prime_table(200'003, {999, 4}), reference);
  EXPECT_EQ(build_prime_table(1'000'000, {1u << 12, 3}), build_prime_table_monolithic(1'000'000));
}

TEST(Sieve, BoundsErrors) {
  EXPECT_THROW(build_prime_table(1), BoundsError);
  EXPECT_THROW(build_prime_table(0), BoundsError);
  EXPECT_THROW(build_prime_table(kMaxSieveLimit + 1), BoundsError);
  EXPECT_THROW(lambda_weights(1), BoundsError);
}

TEST(Sieve, MemoryBudget) {
  ::setenv("POLYPRIME_MAX_MEMORY", "1M", 1);
  EXPECT_THROW(build_prime_table(100'000'000), ResourceError);
  EXPECT_NO_THROW(build_prime_table(100'000));
  ::unsetenv("POLYPRIME_MAX_MEMORY");
  EXPECT_EQ(parse_byte_size("2G"), std::uint64_t{2} << 30);
  EXPECT_EQ(parse_byte_size("512MB"), std::uint64_t{512} << 20);
  EXPECT_EQ(parse_byte_size("12345"), 12345u);
  EXPECT_EQ(parse_byte_size("lots"), 0u);
}

TEST(Lambda, Values) {
  const auto w = lambda_weights(10);
  EXPECT_DOUBLE_EQ(w(8), std::log(2.0));
  EXPECT_DOUBLE_EQ(w(9), std::log(3.0));
  EXPECT_EQ(w(6), 0.0);
  EXPECT_EQ(w(1), 0.0);
  EXPECT_EQ(w(11), 0.0);
  EXPECT_NEAR(w.psi(), 7.832014180505469, 1e-12);
  EXPECT_EQ(w.support().size(), 7u);  // 2 3 4 5 7 8 9
}

TEST(Lambda, MatchesOracleAndPsiBand) {
  const auto w = lambda_weights(20'000);
  for (std::int64_t n = 1; n <= 3000; ++n) ASSERT_DOUBLE_EQ(w(n), oracle::mangoldt(n)) << n;
  const auto table = build_prime_table(20'000);
  for (auto p : table.primes()) ASSERT_EQ(w(static_cast<std::int64_t>(p)), std::log(static_cast<double>(p)));
  EXPECT_LT(std::fabs(w.psi() / 20'000.0 - 1.0), 0.12);
  EXPECT_LT(std::fabs(lambda_weights(10'000).psi() / 10'000.0 - 1.0), 0.12);
}

TEST(Residues, Examples) {
  EXPECT_EQ(prime_residue_counts(10, 2), (std::vector<std::uint64_t>{1, 3}));
  const auto c4 = prime_residue_counts(100, 4);
  EXPECT_EQ(c4[1], 11u);
  EXPECT_EQ(c4[3], 13u);
  const auto c3 = prime_residue_counts(1'000'000, 3);
  EXPECT_LT(std::fabs(static_cast<double>(c3[1]) - static_cast<double>(c3[2])) / static_cast<double>(c3[1]), 0.01);
  EXPECT_THROW(prime_residue_counts(10, 1), ArgumentError);
}

TEST(Residues, SumToPi) {
  const auto t = build_prime_table(50'000);
  for (std::uint64_t m = 2; m <= 60; ++m) {
    const auto c = prime_residue_counts(t, m);
    EXPECT_EQ(std::accumulate(c.begin(), c.end(), std::uint64_t{0}), t.count()) << m;
  }
}
