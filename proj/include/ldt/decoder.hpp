#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "ldt/estimate.hpp"
#include "ldt/tables.hpp"
#include "ldt/tester.hpp"

namespace ldt {

// Knobs of the decoding pipeline. Negative values resolve to their defaults:
// gamma = 1/(1000 d^3), measure_threshold = epsilon_hat/5, theta = 8 d gamma,
// and epsilon_hat is estimated with the (k, k-1) test when unset.
struct DecoderParams {
  double epsilon_hat = -1.0;
  double gamma = -1.0;
  double measure_threshold = -1.0;
  double theta = -1.0;
  std::uint64_t estimate_trials = 200;   // per excellence / membership estimate
  std::uint64_t epsilon_trials = 20000;  // for the automatic epsilon_hat
  std::uint64_t agreement_trials = 4000;
  int plurality_budget = 200;
  int ransac_rounds = 50;
  int ransac_check = 400;
  int num_seeds = 10;
  std::uint64_t reject_cap = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct ResolvedDecoderParams {
  double epsilon_hat;
  double gamma;
  double measure_threshold;
  double theta;
};

ResolvedDecoderParams resolve_params(const CubesTable& table, const DecoderParams& params);

// Both conditions of the excellence definition, estimated under the
// definition's own distribution, plus the p_{x,sigma} diagnostic. The
// verdict compares at CI-adjusted boundaries so estimates near the
// threshold do not flap.
struct ExcellenceReport {
  std::vector<std::uint32_t> x;
  std::uint32_t sigma = 0;
  Estimate mu_x;               // measure of C_{x,sigma} among cubes through x
  Estimate line_disagreement;  // entries of two members differing on a line
  Estimate p_x_sigma;          // agree at x yet differ on the shared line
  bool excellent = false;
};

ExcellenceReport assess_excellence(const CubesTable& table, std::span<const std::uint32_t> x,
                                   std::uint32_t sigma, const DecoderParams& params);

// Pointwise plurality of T(C)(y) over cubes through x and y carrying value
// sigma at x. Memoized; every point draws from its own keyed stream, so the
// value at y never depends on query order.
class PluralityFn {
 public:
  PluralityFn(const CubesTable& table, std::vector<std::uint32_t> x, std::uint32_t sigma,
              int budget, std::uint64_t reject_cap, std::uint64_t seed);

  std::uint32_t value(std::span<const std::uint32_t> y);
  std::span<const std::uint32_t> x() const { return x_; }
  std::uint32_t sigma() const { return sigma_; }
  // Points where no qualifying cube showed up within the cap; their value
  // was assigned arbitrarily (zero).
  std::uint64_t flagged_points() const { return flagged_; }

 private:
  const CubesTable* table_;
  std::vector<std::uint32_t> x_;
  std::uint32_t sigma_;
  int budget_;
  std::uint64_t reject_cap_;
  std::uint64_t seed_;
  std::uint64_t flagged_ = 0;
  std::map<std::vector<std::uint32_t>, std::uint32_t> memo_;
};

using PointFn = std::function<std::uint32_t(std::span<const std::uint32_t>)>;

// Failure rate of the d+2-point neighborhood test: on N = {y + i(h-y),
// i = 0..d+1} a degree-<= d univariate must fit the restriction of f; the
// trial fails when the leading finite-difference functional is nonzero.
// f must be pure; trials run in parallel.
Estimate rs_neighborhood_test(const PointFn& f, const Field& field, int n, int d,
                              std::uint64_t trials, std::uint64_t seed, int threads = 0);

struct FitResult {
  std::optional<MultiPoly> poly;  // best candidate when its score clears 1 - theta
  double best_score = 0.0;
  int rounds_used = 0;
};

// RANSAC-style recovery: interpolate candidates from C(n+d, d) random
// points, score each against f on a fresh sample and keep the best.
FitResult fit_global(const PointFn& f, const Field& field, int n, int d,
                     const DecoderParams& params, double theta, std::uint64_t seed);

struct DecodedCandidate {
  MultiPoly g;
  Estimate agreement;  // Pr_C[T(C) = g|_C] over uniform cubes
  std::vector<std::uint32_t> x;
  std::uint32_t sigma = 0;
  Estimate f_measure;  // fraction of C_{x,sigma} exactly matching g
};

struct SeedDiagnostics {
  ExcellenceReport excellence;
  bool rare_event = false;
  bool fitted = false;
  double best_score = 0.0;
  std::uint64_t plurality_flagged = 0;
};

struct DecodeReport {
  std::vector<DecodedCandidate> candidates;  // agreement descending
  std::vector<SeedDiagnostics> seeds;
  ResolvedDecoderParams resolved;
};

// The full pipeline: weighted (x, sigma) seeds, excellence gate, plurality
// function, global fit, dedup, agreement and F-measure reports. An empty
// candidate list is a valid outcome.
DecodeReport decode(const CubesTable& table, const DecoderParams& params);

struct EqualityWitness {
  bool equal = false;
  std::vector<std::uint32_t> witness;  // a differing point when unequal
  int probes = 0;
};

// Exact coefficient comparison; on inequality a differing point is found by
// the two-random-point probe anchored at x and y.
EqualityWitness candidate_equality_check(const MultiPoly& g1, const MultiPoly& g2,
                                         std::span<const std::uint32_t> x,
                                         std::span<const std::uint32_t> y, RngStream& rng);

}  // namespace ldt
