#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "polyprime/polynomial.hpp"

using namespace polyprime;

namespace {
IntPolynomial P(const char* s) { return parse_polynomial(s); }
}  // namespace

TEST(Parse, Monomials) {
  EXPECT_EQ(P("x^2").descending(), (std::vector<std::int64_t>{1, 0, 0}));
  const auto f = P("2x^3 - x + 1");
  EXPECT_EQ(f.degree(), 3);
  EXPECT_EQ(f.descending(), (std::vector<std::int64_t>{2, 0, -1, 1}));
  EXPECT_EQ(P("2*x^3-x+1"), f);
  EXPECT_EQ(P("  1 - x + 2 x ^ 3 "), f);
  EXPECT_EQ(P("[2,0,-1,1]"), f);
  EXPECT_EQ(P("x^2 + x^2"), P("2x^2"));
  EXPECT_EQ(P("-x^2+3").descending(), (std::vector<std::int64_t>{-1, 0, 3}));
}

TEST(Parse, Errors) {
  EXPECT_THROW(P("5"), ParseError);
  EXPECT_THROW(P("x - x"), ParseError);
  EXPECT_THROW(P(""), ParseError);
  EXPECT_THROW(P("x^"), ParseError);
  EXPECT_THROW(P("2x 3"), ParseError);
  EXPECT_THROW(P("y^2"), ParseError);
  EXPECT_THROW(P("[1,2"), ParseError);
  EXPECT_THROW(P("[0,0,7]"), ParseError);
}

TEST(Parse, CanonicalTextRoundTrips) {
  for (const char* s : {"x^2", "2x^3 - x + 1", "-x^2 + 3", "x^3 - x", "2x + 1", "x^2 - 3x", "7x^5 - 2x^4 + x"}) {
    const auto f = P(s);
    EXPECT_EQ(P(f.to_string().c_str()), f) << s;
  }
  EXPECT_EQ(P("2x^3-x+1").to_string(), "2x^3 - x + 1");
  EXPECT_EQ(P("-x^2+3").to_string(), "-x^2 + 3");
}

TEST(Normalize, SignFlip) {
  EXPECT_EQ(normalize(P("x^2")), P("x^2"));
  EXPECT_EQ(normalize(P("-x^2+3")), P("x^2-3"));
  EXPECT_EQ(normalize(P("-2x^3-x")), P("2x^3+x"));
  for (const char* s : {"x^2", "-x^2+3", "2x+1", "-5x^3+x-4"}) {
    const auto f = P(s);
    EXPECT_EQ(normalize(-normalize(f)), normalize(f));
  }
}

TEST(Evaluate, Exact) {
  EXPECT_EQ(evaluate(P("x^2"), 4), 16);
  EXPECT_EQ(evaluate(P("2x^3-x+1"), 2), 15);
  EXPECT_EQ(evaluate(P("2x^3-x+1"), -3), -50);
  EXPECT_THROW(evaluate(P("x^2"), std::int64_t{1} << 40), RangeError);
  EXPECT_EQ(evaluate(P("x^2"), std::int64_t{1} << 31), std::int64_t{1} << 62);
}

TEST(Image, Examples) {
  const auto a = image_in_window(P("x^2"), 1, 10);
  EXPECT_EQ(a.values, (std::vector<std::int64_t>{1, 4, 9}));
  EXPECT_EQ(a.m_prime, 3);
  EXPECT_EQ(a.m, 3);
  const auto b = image_in_window(P("x^2-3x"), -10, 10);
  EXPECT_EQ(b.values, (std::vector<std::int64_t>{-2, 0, 4, 10}));
  EXPECT_EQ(b.m_prime, 5);
  EXPECT_EQ(image_in_window(P("2x^2+1"), 1, 50).values, (std::vector<std::int64_t>{3, 9, 19, 33}));
  EXPECT_THROW(image_in_window(P("-x^2"), 0, 10), ArgumentError);
  EXPECT_THROW(image_in_window(P("x^2"), 10, 0), ArgumentError);
}

TEST(Image, MatchesNaiveEnumeration) {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> coef(-6, 6), deg(1, 4), lead(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = deg(rng);
    std::vector<std::int64_t> c(static_cast<std::size_t>(k) + 1);
    for (auto& x : c) x = coef(rng);
    c.back() = lead(rng);
    const IntPolynomial f(c);
    const std::int64_t hi = std::uniform_int_distribution<std::int64_t>(1, 100'000)(rng);
    const std::int64_t lo = -std::uniform_int_distribution<std::int64_t>(0, 1000)(rng);
    const auto image = image_in_window(f, lo, hi);
    auto naive = oracle::image_set(f, lo, hi, 100'000);
    std::vector<std::int64_t> expect(naive.begin(), naive.end());
    std::sort(expect.begin(), expect.end());
    ASSERT_EQ(image.values, expect) << f.to_string() << " on [" << lo << "," << hi << "]";
    ASSERT_TRUE(std::adjacent_find(image.values.begin(), image.values.end(), std::greater_equal<>()) ==
                image.values.end());
    // M' is the last argument whose value is within reach of the window top.
    std::int64_t v;
    if (image.m_prime > 0) {
      ASSERT_TRUE(oracle::eval(f, image.m_prime, v));
      ASSERT_LE(v, hi);
    }
  }
}

TEST(Roots, Examples) {
  EXPECT_EQ(roots_mod(P("x^2"), 7), (std::vector<std::uint64_t>{0}));
  EXPECT_TRUE(roots_mod(P("2x+1"), 2).empty());
  EXPECT_EQ(roots_mod(P("x^2-1"), 8), (std::vector<std::uint64_t>{1, 3, 5, 7}));
  EXPECT_EQ(roots_mod(P("x^2+1"), 5), (std::vector<std::uint64_t>{2, 3}));
  EXPECT_THROW(roots_mod(P("x"), 1), ArgumentError);
  EXPECT_THROW(roots_mod(P("x"), kRootCountCap + 1), ResourceError);
}

TEST(Roots, AgreeWithOracleAndDegreeBound) {
  const auto primes = oracle::primes_upto(1000);
  for (const char* s : {"x^2+1", "x^2-1", "2x^3+x", "x^3-x", "x^3-2", "x^4+x+1", "3x^2-7x+11", "x^5-x"}) {
    const auto f = P(s);
    for (auto p : primes) {
      const auto z = roots_mod(f, static_cast<std::uint64_t>(p)).size();
      ASSERT_EQ(z, oracle::root_count(f, p)) << s << " mod " << p;
      ASSERT_LE(z, static_cast<std::size_t>(f.degree())) << s << " mod " << p;
    }
  }
}

TEST(Roots, CrtMultiplicative) {
  for (const char* s : {"x^2+1", "x^2-1", "x^3-x", "2x^3+x", "x^2-x"}) {
    const auto f = P(s);
    for (std::uint64_t m1 = 2; m1 <= 40; ++m1)
      for (std::uint64_t m2 = 2; m1 * m2 <= 1000; ++m2) {
        if (std::gcd(m1, m2) != 1) continue;
        ASSERT_EQ(count_roots_mod(f, m1 * m2), count_roots_mod(f, m1) * count_roots_mod(f, m2))
            << s << " " << m1 << "*" << m2;
      }
  }
}

TEST(Intersective, Classification) {
  EXPECT_TRUE(is_intersective_up_to(P("x^2-x"), 1000).pass);
  const auto a = is_intersective_up_to(P("x^2+1"), 100);
  EXPECT_FALSE(a.pass);
  EXPECT_EQ(a.witness, 3u);
  EXPECT_EQ(is_intersective_up_to(P("2x+1"), 100).witness, 2u);
  // (x^2 - 13)(x^2 - 17)(x^2 - 221) has a root mod every n without a rational root.
  const auto h = P("x^6 - 251x^4 + 6851x^2 - 48841");
  EXPECT_TRUE(is_intersective_up_to(h, 2000).pass);
  for (std::int64_t n = 2; n <= 300; ++n) ASSERT_GT(oracle::root_count(h, n), 0u) << n;
  // (x^2 - 2)(x^2 - 3)(x^2 - 6) has roots mod every prime but none mod 8.
  EXPECT_EQ(is_intersective_up_to(P("x^6 - 11x^4 + 36x^2 - 36"), 2000).witness, 8u);
  // The least failing modulus matches a scan over every n.
  const auto g = P("x^2 - 5");
  const auto r = is_intersective_up_to(g, 100);
  std::uint64_t least = 0;
  for (std::uint64_t n = 2; n <= 100 && least == 0; ++n)
    if (oracle::root_count(g, static_cast<std::int64_t>(n)) == 0) least = n;
  EXPECT_EQ(r.witness.value_or(0), least);
}
