// How many pairs of primes up to N differ by a perfect square, and how does
// that compare with the predicted main term?

#include <cstdio>
#include <cstdlib>

#include "polyprime/polyprime.hpp"

int main(int argc, char** argv) {
  const std::uint64_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1'000'000;
  const auto f = polyprime::parse_polynomial("x^2");
  const auto table = polyprime::build_prime_table(n);
  const polyprime::LambdaWeights lambda(table);

  const auto exact = polyprime::count_pairs_exact(table, f);
  const double weighted = polyprime::weighted_count(lambda, f);
  const auto series = polyprime::singular_series(f);
  const polyprime::LinearForm diff;
  const double main_r = polyprime::main_term_unweighted(f, diff, static_cast<double>(n), series.value);
  const double main_w = polyprime::main_term_weighted(f, diff, static_cast<double>(n), series.value);

  std::printf("N = %llu\n", static_cast<unsigned long long>(n));
  std::printf("r_f(N)  = %llu   predicted %.6g   ratio %.6f\n", static_cast<unsigned long long>(exact), main_r,
              static_cast<double>(exact) / main_r);
  std::printf("R_f(N)  = %.6g   predicted %.6g   ratio %.6f\n", weighted, main_w, weighted / main_w);
  return 0;
}
