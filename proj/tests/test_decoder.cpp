#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ldt/decoder.hpp"
#include "ldt/errors.hpp"

using namespace ldt;

namespace {

CubesTable::Params params_for(const Field& f, int n, int d, int k, std::uint64_t seed) {
  return CubesTable::Params{f, n, d, k, seed};
}

DecoderParams fast_params(std::uint64_t seed) {
  DecoderParams p;
  p.seed = seed;
  p.estimate_trials = 200;
  p.epsilon_trials = 2000;
  p.agreement_trials = 2000;
  p.plurality_budget = 60;
  p.ransac_rounds = 20;
  p.ransac_check = 200;
  p.num_seeds = 4;
  p.reject_cap = 20000;
  return p;
}

}  // namespace

TEST_CASE("excellence holds trivially on honest tables") {
  Field f(7);
  RngStream rng(1, 0);
  MultiPoly g = random_poly(f, 4, 2, rng);
  HonestTable table(params_for(f, 4, 2, 3, 3), g);
  std::vector<std::uint32_t> x = rng.point(f, 4);

  DecoderParams params = fast_params(10);
  params.epsilon_hat = 1.0;
  ExcellenceReport report = assess_excellence(table, x, g.evaluate(x), params);
  CHECK(report.excellent);
  CHECK(report.mu_x.successes == report.mu_x.trials);
  CHECK(report.line_disagreement.successes == 0);
  CHECK(report.p_x_sigma.successes == 0);

  const std::uint32_t wrong = f.add(g.evaluate(x), 1);
  DecoderParams tight = params;
  tight.reject_cap = 2000;
  CHECK_THROWS_AS(assess_excellence(table, x, wrong, tight), RareEventError);
}

TEST_CASE("excellence usually holds for mildly corrupted tables") {
  Field f(11);
  RngStream rng(2, 0);
  MultiPoly g = random_poly(f, 4, 2, rng);
  CorruptedTable table(params_for(f, 4, 2, 3, 21), g, 0.3);

  int excellent = 0;
  for (int run = 0; run < 5; ++run) {
    DecoderParams params = fast_params(100 + run);
    std::vector<std::uint32_t> x = rng.point(f, 4);
    ExcellenceReport report = assess_excellence(table, x, g.evaluate(x), params);
    excellent += report.excellent;
  }
  CHECK(excellent >= 4);
}

TEST_CASE("the transversal diagnostic is estimated when geometry permits") {
  Field f(5);
  RngStream rng(20, 0);
  MultiPoly g = random_poly(f, 5, 1, rng);
  CorruptedTable table(params_for(f, 5, 1, 3, 13), g, 0.3);
  std::vector<std::uint32_t> x = rng.point(f, 5);
  DecoderParams params = fast_params(60);
  params.epsilon_hat = 0.5;
  ExcellenceReport report = assess_excellence(table, x, g.evaluate(x), params);
  CHECK(report.p_x_sigma.trials == params.estimate_trials);
  // Agreement at x with disagreement on the whole line needs a corrupted
  // member, so the diagnostic stays well below one.
  CHECK(report.p_x_sigma.p_hat() < 0.5);

  // At n = 4 two cubes always share a plane, so the diagnostic is skipped.
  MultiPoly g4 = random_poly(f, 4, 1, rng);
  CorruptedTable low(params_for(f, 4, 1, 3, 13), g4, 0.3);
  std::vector<std::uint32_t> x4 = rng.point(f, 4);
  ExcellenceReport r4 = assess_excellence(low, x4, g4.evaluate(x4), params);
  CHECK(r4.p_x_sigma.trials == 0);
}

TEST_CASE("plurality reproduces the encoded polynomial") {
  Field f(11);
  RngStream rng(3, 0);
  MultiPoly g = random_poly(f, 4, 2, rng);

  HonestTable honest(params_for(f, 4, 2, 3, 8), g);
  std::vector<std::uint32_t> x = rng.point(f, 4);
  PluralityFn plain(honest, x, g.evaluate(x), 40, 10000, 77);
  CHECK(plain.value(x) == g.evaluate(x));
  for (int i = 0; i < 50; ++i) {
    std::vector<std::uint32_t> y = rng.point(f, 4);
    CHECK(plain.value(y) == g.evaluate(y));
  }
  CHECK(plain.flagged_points() == 0);

  CorruptedTable corrupted(params_for(f, 4, 2, 3, 8), g, 0.3);
  PluralityFn noisy(corrupted, x, g.evaluate(x), 120, 20000, 78);
  int match = 0;
  const int probes = 200;
  for (int i = 0; i < probes; ++i) {
    std::vector<std::uint32_t> y = rng.point(f, 4);
    match += noisy.value(y) == g.evaluate(y);
  }
  CHECK(match >= probes * 97 / 100);
}

TEST_CASE("plurality memoization is stable") {
  Field f(5);
  RngStream rng(4, 0);
  MultiPoly g = random_poly(f, 4, 1, rng);
  CorruptedTable table(params_for(f, 4, 1, 3, 5), g, 0.5);
  std::vector<std::uint32_t> x = rng.point(f, 4);
  PluralityFn fn(table, x, g.evaluate(x), 30, 5000, 9);
  std::vector<std::uint32_t> y = rng.point(f, 4);
  const std::uint32_t first = fn.value(y);
  for (int i = 0; i < 5; ++i) CHECK(fn.value(y) == first);
}

TEST_CASE("neighborhood test accepts exact low-degree inputs") {
  Field f(11);
  RngStream rng(5, 0);
  for (int d : {1, 2, 3}) {
    MultiPoly g = random_poly(f, 2, d, rng);
    PointFn fn = [&g](std::span<const std::uint32_t> pt) { return g.evaluate(pt); };
    Estimate est = rs_neighborhood_test(fn, f, 2, d, 1000, 17 + d);
    CHECK(est.successes == 0);
  }
}

TEST_CASE("neighborhood test failure rate matches exhaustive counting at n=1") {
  Field f(7);
  MultiPoly g(f, 1, 2);
  g.set_coeff_of(std::vector<std::uint8_t>{2}, 1);
  g.set_coeff_of(std::vector<std::uint8_t>{1}, 3);
  g.set_coeff_of(std::vector<std::uint8_t>{0}, 5);
  PointFn fn = [&g](std::span<const std::uint32_t> pt) { return g.evaluate(pt); };

  // Independent oracle: interpolate a degree-1 fit through the d+2 = 3
  // neighborhood values for every ordered pair (y, h), y != h.
  std::uint64_t failures = 0, pairs = 0;
  for (std::uint32_t y = 0; y < 7; ++y) {
    for (std::uint32_t h = 0; h < 7; ++h) {
      if (y == h) continue;
      ++pairs;
      std::vector<std::vector<std::uint32_t>> pts;
      std::vector<std::uint32_t> vals;
      for (std::uint32_t i = 0; i < 3; ++i) {
        const std::uint32_t p = f.add(y, f.mul(i, f.sub(h, y)));
        pts.push_back({i});
        vals.push_back(fn(std::vector<std::uint32_t>{p}));
      }
      failures += interpolate(f, 1, 1, pts, vals).status != FitStatus::kOk;
    }
  }
  const double exact = static_cast<double>(failures) / pairs;
  CHECK(exact > 0.0);

  Estimate est = rs_neighborhood_test(fn, f, 1, 1, 20000, 23);
  CHECK(std::abs(est.p_hat() - exact) <= est.half_width());
}

TEST_CASE("neighborhood test detects a single overwritten point") {
  Field f(11);
  RngStream rng(6, 0);
  MultiPoly g = random_poly(f, 2, 2, rng);
  const std::vector<std::uint32_t> special{4, 9};
  PointFn fn = [&](std::span<const std::uint32_t> pt) {
    if (std::equal(pt.begin(), pt.end(), special.begin(), special.end())) {
      return f.add(g.evaluate(pt), 1);
    }
    return g.evaluate(pt);
  };

  // Exhaustive count over all ordered (y, h) pairs with y != h.
  std::uint64_t failures = 0, pairs = 0;
  std::vector<std::uint32_t> y(2), h(2), pt(2);
  for (std::uint32_t y0 = 0; y0 < 11; ++y0)
    for (std::uint32_t y1 = 0; y1 < 11; ++y1)
      for (std::uint32_t h0 = 0; h0 < 11; ++h0)
        for (std::uint32_t h1 = 0; h1 < 11; ++h1) {
          y = {y0, y1};
          h = {h0, h1};
          if (y == h) continue;
          ++pairs;
          std::vector<std::vector<std::uint32_t>> pts;
          std::vector<std::uint32_t> vals;
          for (std::uint32_t i = 0; i < 4; ++i) {
            for (int c = 0; c < 2; ++c) pt[c] = f.add(y[c], f.mul(i, f.sub(h[c], y[c])));
            pts.push_back({i});
            vals.push_back(fn(pt));
          }
          failures += interpolate(f, 1, 2, pts, vals).status != FitStatus::kOk;
        }
  const double exact = static_cast<double>(failures) / pairs;
  CHECK(exact > 0.0);

  Estimate est = rs_neighborhood_test(fn, f, 2, 2, 40000, 29);
  CHECK(std::abs(est.p_hat() - exact) <= est.half_width());
}

TEST_CASE("global fit recovers exact polynomials with score one") {
  Field f(11);
  RngStream rng(7, 0);
  MultiPoly g = random_poly(f, 3, 2, rng);
  PointFn fn = [&g](std::span<const std::uint32_t> pt) { return g.evaluate(pt); };
  DecoderParams params = fast_params(42);
  FitResult fit = fit_global(fn, f, 3, 2, params, 0.002, 99);
  REQUIRE(fit.poly.has_value());
  CHECK(*fit.poly == g);
  CHECK(fit.best_score == 1.0);
}

TEST_CASE("global fit survives sparse pointwise corruption") {
  Field f(11);
  RngStream rng(8, 0);
  int recovered = 0;
  for (int run = 0; run < 5; ++run) {
    MultiPoly g = random_poly(f, 3, 2, rng);
    PointFn fn = [&](std::span<const std::uint32_t> pt) {
      std::vector<std::uint8_t> bytes;
      for (auto v : pt) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
      }
      if (siphash24(1234, 5678 + run, bytes) % 100 == 0) return f.add(g.evaluate(pt), 1);
      return g.evaluate(pt);
    };
    DecoderParams params = fast_params(run);
    params.ransac_rounds = 50;
    params.ransac_check = 400;
    // The verification score of the true polynomial sits near 0.99 here, so
    // the acceptance threshold has to leave room for it.
    FitResult fit = fit_global(fn, f, 3, 2, params, 0.05, 1000 + run);
    recovered += fit.poly.has_value() && *fit.poly == g;
  }
  CHECK(recovered >= 4);
}

TEST_CASE("global fit refuses a uniformly random function") {
  Field f(11);
  PointFn fn = [&f](std::span<const std::uint32_t> pt) {
    std::vector<std::uint8_t> bytes;
    for (auto v : pt) {
      for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    return static_cast<std::uint32_t>(siphash24(42, 43, bytes) % 11);
  };
  DecoderParams params = fast_params(3);
  FitResult fit = fit_global(fn, f, 3, 2, params, 0.05, 12);
  CHECK_FALSE(fit.poly.has_value());
  CHECK(fit.best_score < 0.5);
}

TEST_CASE("decode recovers the encoding of an honest table exactly") {
  Field f(11);
  RngStream rng(9, 0);
  MultiPoly g = random_poly(f, 4, 2, rng);
  HonestTable table(params_for(f, 4, 2, 3, 31), g);
  DecodeReport report = decode(table, fast_params(5));
  REQUIRE(report.candidates.size() == 1);
  CHECK(report.candidates[0].g == g);
  CHECK(report.candidates[0].agreement.successes == report.candidates[0].agreement.trials);
  CHECK(report.candidates[0].f_measure.successes == report.candidates[0].f_measure.trials);
}

TEST_CASE("decode output does not depend on the thread count") {
  Field f(11);
  RngStream rng(10, 0);
  MultiPoly g = random_poly(f, 4, 1, rng);
  CorruptedTable table(params_for(f, 4, 1, 3, 77), g, 0.3);

  DecoderParams a = fast_params(12);
  a.threads = 1;
  DecoderParams b = fast_params(12);
  b.threads = 3;
  DecodeReport ra = decode(table, a);
  DecodeReport rb = decode(table, b);
  REQUIRE(ra.candidates.size() == rb.candidates.size());
  for (std::size_t i = 0; i < ra.candidates.size(); ++i) {
    CHECK(ra.candidates[i].g == rb.candidates[i].g);
    CHECK(ra.candidates[i].agreement == rb.candidates[i].agreement);
    CHECK(ra.candidates[i].f_measure == rb.candidates[i].f_measure);
  }
  REQUIRE(ra.seeds.size() == rb.seeds.size());
  for (std::size_t s = 0; s < ra.seeds.size(); ++s) {
    CHECK(ra.seeds[s].excellence.excellent == rb.seeds[s].excellence.excellent);
    CHECK(ra.seeds[s].excellence.mu_x == rb.seeds[s].excellence.mu_x);
    CHECK(ra.seeds[s].best_score == rb.seeds[s].best_score);
  }
}

TEST_CASE("candidate equality check produces witnesses quickly") {
  Field f(11);
  RngStream rng(11, 0);
  MultiPoly g = random_poly(f, 3, 2, rng);
  std::vector<std::uint32_t> x = rng.point(f, 3);
  std::vector<std::uint32_t> y = rng.point(f, 3);
  while (y == x) y = rng.point(f, 3);

  EqualityWitness same = candidate_equality_check(g, g, x, y, rng);
  CHECK(same.equal);

  MultiPoly shifted = g;
  shifted.set_coeff(0, f.add(shifted.coeff(0), 3));
  EqualityWitness diff = candidate_equality_check(g, shifted, x, y, rng);
  CHECK_FALSE(diff.equal);
  REQUIRE(!diff.witness.empty());
  CHECK(g.evaluate(diff.witness) != shifted.evaluate(diff.witness));

  int worst = 0;
  for (int i = 0; i < 100; ++i) {
    MultiPoly a = random_poly(f, 3, 2, rng);
    MultiPoly b = random_poly(f, 3, 2, rng);
    if (a == b) continue;
    EqualityWitness w = candidate_equality_check(a, b, x, y, rng);
    CHECK_FALSE(w.equal);
    CHECK(a.evaluate(w.witness) != b.evaluate(w.witness));
    worst = std::max(worst, w.probes);
  }
  CHECK(worst <= 10);
}
