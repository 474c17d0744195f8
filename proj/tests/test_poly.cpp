#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ldt/poly.hpp"
#include "test_util.hpp"

using namespace ldt;

namespace {

// Independent evaluation oracle: one repeated multiplication per exponent.
std::uint32_t naive_eval(const MultiPoly& p, std::span<const std::uint32_t> pt) {
  const Field& f = p.field();
  std::uint32_t acc = 0;
  for (int i = 0; i < p.table().count(); ++i) {
    std::uint32_t term = p.coeff(i);
    auto exps = p.table().exponents(i);
    for (int v = 0; v < p.nvars(); ++v) {
      for (int rep = 0; rep < exps[v]; ++rep) term = f.mul(term, pt[v]);
    }
    acc = f.add(acc, term);
  }
  return acc;
}

std::vector<std::vector<std::uint32_t>> full_grid(const Field& f, int m) {
  std::vector<std::vector<std::uint32_t>> pts;
  std::vector<std::uint32_t> cur(m, 0);
  while (true) {
    pts.push_back(cur);
    int i = 0;
    while (i < m && ++cur[i] == f.q()) cur[i++] = 0;
    if (i == m) break;
  }
  return pts;
}

MultiPoly monomial(const Field& f, int m, int d, std::vector<std::uint8_t> exps,
                   std::uint32_t c) {
  MultiPoly p(f, m, d);
  p.set_coeff_of(exps, c);
  return p;
}

}  // namespace

TEST_CASE("monomial table is graded-lex with prefix property") {
  auto t23 = MonomialTable::get(2, 3);
  CHECK(t23->count() == 10);  // C(5,2)
  // Degree 0 first, then the degree-1 block with x1 before x2.
  CHECK(t23->total_degree(0) == 0);
  CHECK(t23->exponents(1)[0] == 1);
  CHECK(t23->exponents(1)[1] == 0);
  CHECK(t23->exponents(2)[0] == 0);
  CHECK(t23->exponents(2)[1] == 1);
  auto t22 = MonomialTable::get(2, 2);
  for (int i = 0; i < t22->count(); ++i) {
    auto a = t22->exponents(i);
    auto b = t23->exponents(i);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST_CASE("evaluation examples") {
  Field f(7);
  MultiPoly zero(f, 2, 3);
  std::vector<std::uint32_t> pt{3, 5};
  CHECK(zero.evaluate(pt) == 0);

  MultiPoly xy = monomial(f, 2, 3, {1, 1}, 1);
  CHECK(xy.evaluate(pt) == 1);  // 15 mod 7
}

TEST_CASE("evaluation matches the naive oracle on the full grid") {
  Field f(11);
  RngStream rng(5, 0);
  MultiPoly p = random_poly(f, 2, 3, rng);
  for (const auto& pt : full_grid(f, 2)) CHECK(p.evaluate(pt) == naive_eval(p, pt));
}

TEST_CASE("restriction substitutes symbolically") {
  Field f(5);
  // x1*x2 restricted to the line (t, t) is t^2.
  MultiPoly xy = monomial(f, 2, 2, {1, 1}, 1);
  AffineFlat diag = AffineFlat::canonicalize(f, std::vector<std::uint32_t>{0, 0},
                                             {{1, 1}});
  MultiPoly r = restrict_to(xy, diag);
  CHECK(r == monomial(f, 1, 2, {2}, 1));

  MultiPoly c = monomial(f, 2, 2, {0, 0}, 4);
  CHECK(restrict_to(c, diag) == monomial(f, 1, 2, {0}, 4));
}

TEST_CASE("restriction agrees with direct evaluation everywhere") {
  Field f(5);
  RngStream rng(9, 0);
  MultiPoly p = random_poly(f, 4, 2, rng);
  AffineFlat flat = sample_flat(f, 4, 3, rng);
  MultiPoly r = restrict_to(p, flat);
  CHECK(r.actual_degree() <= p.actual_degree());
  for (const auto& t : full_grid(f, 3)) {
    CHECK(r.evaluate(t) == p.evaluate(flat.embed(t)));
  }
}

TEST_CASE("restriction commutes with evaluation on random instances") {
  for (std::uint32_t q : {5u, 7u}) {
    Field f(q);
    RngStream rng(q, 3);
    for (int rep = 0; rep < 10; ++rep) {
      const int m = 2 + static_cast<int>(rng.uniform(4));  // up to 5 vars
      const int d = static_cast<int>(rng.uniform(4));      // up to 3
      const int k = 1 + static_cast<int>(rng.uniform(m));
      MultiPoly p = random_poly(f, m, d, rng);
      AffineFlat flat = sample_flat(f, m, k, rng);
      MultiPoly r = restrict_to(p, flat);
      CHECK(r.actual_degree() <= p.actual_degree());
      for (int probes = 0; probes < 20; ++probes) {
        auto t = rng.point(f, k);
        CHECK(r.evaluate(t) == p.evaluate(flat.embed(t)));
      }
    }
  }
}

TEST_CASE("cube interpolation recovers exactly from the full grid") {
  Field f(5);
  RngStream rng(11, 0);
  MultiPoly p = random_poly(f, 3, 2, rng);
  auto pts = full_grid(f, 3);
  std::vector<std::uint32_t> vals;
  for (const auto& pt : pts) vals.push_back(p.evaluate(pt));
  auto result = interpolate_cube(f, 2, pts, vals);
  REQUIRE(result.status == FitStatus::kOk);
  CHECK(*result.poly == p);

  std::vector<std::uint32_t> zeros(pts.size(), 0);
  auto zr = interpolate_cube(f, 2, pts, zeros);
  REQUIRE(zr.status == FitStatus::kOk);
  CHECK(zr.poly->is_zero());
}

TEST_CASE("interpolation round-trips every degree-1 polynomial at q=3") {
  Field f(3);
  auto pts = full_grid(f, 3);
  // All 81 degree-<=1 polynomials in three variables.
  for (std::uint32_t c0 = 0; c0 < 3; ++c0)
    for (std::uint32_t c1 = 0; c1 < 3; ++c1)
      for (std::uint32_t c2 = 0; c2 < 3; ++c2)
        for (std::uint32_t c3 = 0; c3 < 3; ++c3) {
          MultiPoly p(f, 3, 1);
          p.set_coeff_of(std::vector<std::uint8_t>{0, 0, 0}, c0);
          p.set_coeff_of(std::vector<std::uint8_t>{1, 0, 0}, c1);
          p.set_coeff_of(std::vector<std::uint8_t>{0, 1, 0}, c2);
          p.set_coeff_of(std::vector<std::uint8_t>{0, 0, 1}, c3);
          std::vector<std::uint32_t> vals;
          for (const auto& pt : pts) vals.push_back(p.evaluate(pt));
          auto result = interpolate_cube(f, 1, pts, vals);
          REQUIRE(result.status == FitStatus::kOk);
          CHECK(*result.poly == p);
        }
}

TEST_CASE("degree-3 values do not fit a degree-2 bound") {
  Field f(7);
  MultiPoly cubic = monomial(f, 3, 3, {3, 0, 0}, 1);
  auto pts = full_grid(f, 3);
  std::vector<std::uint32_t> vals;
  for (const auto& pt : pts) vals.push_back(cubic.evaluate(pt));
  CHECK(interpolate_cube(f, 2, pts, vals).status == FitStatus::kInconsistent);
  // The same values are explained exactly at the true degree.
  auto ok = interpolate_cube(f, 3, pts, vals);
  REQUIRE(ok.status == FitStatus::kOk);
  CHECK(*ok.poly == cubic);
}

TEST_CASE("too few samples are flagged as underdetermined") {
  Field f(5);
  std::vector<std::vector<std::uint32_t>> pts{{0, 0, 0}, {1, 2, 3}};
  std::vector<std::uint32_t> vals{1, 2};
  CHECK(interpolate_cube(f, 2, pts, vals).status == FitStatus::kUnderdetermined);
}

TEST_CASE("interpolation preconditions") {
  Field f(3);
  CHECK_THROWS_AS(interpolate_cube(f, 3, {}, {}), std::invalid_argument);
}

TEST_CASE("fraction agreement basics") {
  Field f(7);
  RngStream rng(2, 0);
  MultiPoly p = random_poly(f, 2, 2, rng);
  auto self = fraction_agreement(p, p);
  CHECK(self.exact);
  CHECK(self.value() == 1.0);

  // One-variable pair differing in a linear coefficient agrees exactly at
  // the single root of the difference.
  MultiPoly a = monomial(f, 1, 1, {1}, 2);
  MultiPoly b = monomial(f, 1, 1, {1}, 3);
  auto onevar = fraction_agreement(a, b);
  CHECK(onevar.agree == 1);
  CHECK(onevar.total == 7);
}

TEST_CASE("schwartz-zippel bound over random distinct pairs") {
  Field f(11);
  RngStream rng(17, 0);
  for (int i = 0; i < 200; ++i) {
    MultiPoly p = random_poly(f, 2, 3, rng);
    MultiPoly r = random_poly(f, 2, 3, rng);
    if (p == r) continue;
    auto agreement = fraction_agreement(p, r);
    CHECK(agreement.exact);
    // agree/121 <= 3/11, exactly in integers
    CHECK(agreement.agree * 11 <= 3 * agreement.total);
  }
}

TEST_CASE("fraction agreement falls back to sampling on oversized domains") {
  Field f(11);
  RngStream rng(21, 0);
  MultiPoly p = random_poly(f, 8, 1, rng);  // 11^8 points, far past the cap
  MultiPoly r = p;
  r.set_coeff(0, f.add(r.coeff(0), 1));
  AgreementOptions options;
  options.trials = 20000;
  options.seed = 5;
  Agreement mc = fraction_agreement(p, r, options);
  CHECK_FALSE(mc.exact);
  CHECK(mc.total == 20000);
  // The polynomials differ by a constant, so they never agree.
  CHECK(mc.agree == 0);
  Agreement again = fraction_agreement(p, r, options);
  CHECK(again.agree == mc.agree);

  Agreement self = fraction_agreement(p, p, options);
  CHECK(self.value() == 1.0);
}

TEST_CASE("random polynomials are reproducible and uniform") {
  Field f(7);
  RngStream a(31, 4), b(31, 4);
  CHECK(random_poly(f, 3, 2, a) == random_poly(f, 3, 2, b));

  RngStream c(31, 5);
  MultiPoly constant = random_poly(f, 2, 0, c);
  CHECK(constant.actual_degree() == 0);

  // evaluate(p, 0) is the constant coefficient; uniform over GF(7).
  RngStream d(31, 6);
  std::vector<std::uint64_t> counts(7, 0);
  std::vector<std::uint32_t> origin{0, 0};
  for (int i = 0; i < 10000; ++i) {
    ++counts[random_poly(f, 2, 2, d).evaluate(origin)];
  }
  CHECK(testutil::chi2_uniform(counts, 10000) < testutil::chi2_crit_001(6));
}

TEST_CASE("semantic equality ignores the container bound") {
  Field f(5);
  MultiPoly small = monomial(f, 2, 1, {1, 0}, 2);
  MultiPoly large = monomial(f, 2, 3, {1, 0}, 2);
  CHECK(small == large);
  large.set_coeff_of(std::vector<std::uint8_t>{1, 1}, 1);
  CHECK(small != large);
}

TEST_CASE("text records round-trip and match the fixture") {
  Field f(11);
  RngStream rng(8, 0);
  for (int i = 0; i < 20; ++i) {
    MultiPoly p = random_poly(f, 3, 2, rng);
    CHECK(from_text(to_text(p)) == p);
  }

  MultiPoly p(f, 2, 2);
  p.set_coeff_of(std::vector<std::uint8_t>{0, 0}, 5);
  p.set_coeff_of(std::vector<std::uint8_t>{1, 1}, 3);
  CHECK(to_text(p) == "q 11\nm 2\nd 2\nterm 0 0 5\nterm 1 1 3\n");
}

TEST_CASE("arithmetic helpers") {
  Field f(5);
  RngStream rng(12, 0);
  MultiPoly a = random_poly(f, 2, 2, rng);
  MultiPoly b = random_poly(f, 2, 2, rng);
  MultiPoly s = add(a, b);
  MultiPoly m = mul(a, b);
  for (const auto& pt : full_grid(f, 2)) {
    CHECK(s.evaluate(pt) == f.add(a.evaluate(pt), b.evaluate(pt)));
    CHECK(m.evaluate(pt) == f.mul(a.evaluate(pt), b.evaluate(pt)));
    CHECK(sub(s, b).evaluate(pt) == a.evaluate(pt));
  }
}
