#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ldt/estimate.hpp"
#include "ldt/tables.hpp"

namespace ldt {

// The (k, ell) agreement test: sample a uniform ell-flat U and two
// independent uniform k-flats containing U; accept iff the two table
// entries agree on U as polynomials.
struct TestSpec {
  int k = 3;
  int ell = 2;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;
};

// Entries of v1 and v2 compared on the shared flat u (contained in both),
// through u's own canonical parameterization.
bool entries_agree_on(const CubesTable& table, const AffineFlat& v1,
                      const AffineFlat& v2, const AffineFlat& u);

Estimate estimate_pass(const CubesTable& table, const TestSpec& spec, int threads = 0);

// Pass probabilities of two intersection dimensions side by side, with the
// two-sided comparison alpha_{k r k} vs alpha_{k r' k}. The vanishing terms
// of the comparison are replaced by an explicit fudge factor.
struct VariantReport {
  int k = 0;
  int r = 0;
  int r_prime = 0;
  Estimate alpha_r;
  Estimate alpha_r_prime;
  double slack_term = 0.0;  // q^{-(k - 2 r' + r + 1)}
  double fudge = 0.5;
  bool lower_ok = false;  // (1-fudge) alpha_r <= alpha_r' within CIs
  bool upper_ok = false;  // alpha_r' <= alpha_r + (1+fudge) slack within CIs
};

VariantReport compare_variants(const CubesTable& table, int r, int r_prime,
                               std::uint64_t trials, std::uint64_t seed,
                               double fudge = 0.5, int threads = 0);

// One draw of the six-step sampling distribution over
// (x, sigma, C1, y, tau, C2): uniform x; a uniform cube C1 through x with
// sigma read off the table; uniform y in C1 other than x; a uniform plane
// P in C1 through x and y; a uniform cube C2 through P with tau read at y.
struct DSample {
  std::vector<std::uint32_t> x;
  std::vector<std::uint32_t> y;
  std::uint32_t sigma = 0;
  std::uint32_t tau = 0;
  AffineFlat c1;
  AffineFlat c2;
  bool pass = false;  // entries agree on the shared plane
};

DSample sample_D(const CubesTable& table, RngStream& rng);

// Pr[C2 lands in C_{x,sigma} and the entries agree on the shared plane],
// conditioned on C1 in C_{x,sigma} and the plane containing x. Conditioning
// is realized by rejection; exceeding the draw cap raises RareEventError.
Estimate conditional_pass(const CubesTable& table, std::span<const std::uint32_t> x,
                          std::uint32_t sigma, std::uint64_t trials, std::uint64_t seed,
                          std::uint64_t reject_cap = 1000000, int threads = 0);

}  // namespace ldt
