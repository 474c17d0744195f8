#include "ldt/tester.hpp"

#include <cmath>
#include <stdexcept>

#include "ldt/errors.hpp"
#include "ldt/runner.hpp"

namespace ldt {

bool entries_agree_on(const CubesTable& table, const AffineFlat& v1,
                      const AffineFlat& v2, const AffineFlat& u) {
  MultiPoly e1 = table.query(v1);
  MultiPoly e2 = table.query(v2);
  if (u.dim() == 0) {
    auto p1 = v1.local_point(u.base());
    auto p2 = v2.local_point(u.base());
    if (!p1 || !p2) throw std::invalid_argument("shared point not on both flats");
    return e1.evaluate(*p1) == e2.evaluate(*p2);
  }
  return restrict_to(e1, localize_map(v1, u)) == restrict_to(e2, localize_map(v2, u));
}

Estimate estimate_pass(const CubesTable& table, const TestSpec& spec, int threads) {
  if (spec.k != table.k()) {
    throw std::invalid_argument("test subspace dimension does not match the table");
  }
  if (!(0 <= spec.ell && spec.ell < spec.k && spec.k <= table.n())) {
    throw std::invalid_argument("test requires 0 <= ell < k <= n");
  }
  if (spec.trials < 1) throw std::invalid_argument("need at least one trial");
  const Field f = table.field();
  const int n = table.n();
  return run_trials(
      spec.trials, derive_seed(spec.seed, "estimate-pass"),
      [&table, f, n, &spec](std::uint64_t, RngStream& rng) {
        FlatPair pair = sample_edge(f, n, spec.k, spec.ell, rng);
        return entries_agree_on(table, pair.first, pair.second, pair.through);
      },
      threads);
}

VariantReport compare_variants(const CubesTable& table, int r, int r_prime,
                               std::uint64_t trials, std::uint64_t seed,
                               double fudge, int threads) {
  const int k = table.k();
  if (!(0 <= r && r < r_prime && r_prime < k)) {
    throw std::invalid_argument("compare_variants requires 0 <= r < r' < k");
  }
  if (2 * k > table.n()) {
    throw std::invalid_argument("compare_variants requires k <= n/2");
  }
  VariantReport report;
  report.k = k;
  report.r = r;
  report.r_prime = r_prime;
  report.fudge = fudge;
  report.alpha_r = estimate_pass(table, {k, r, trials, derive_seed(seed, "variant-r")}, threads);
  report.alpha_r_prime =
      estimate_pass(table, {k, r_prime, trials, derive_seed(seed, "variant-rp")}, threads);
  const int exponent = k - 2 * r_prime + r + 1;
  report.slack_term = std::pow(static_cast<double>(table.field().q()), -exponent);
  report.lower_ok =
      (1.0 - fudge) * report.alpha_r.lower() <= report.alpha_r_prime.upper();
  report.upper_ok = report.alpha_r_prime.lower() <=
                    report.alpha_r.upper() + (1.0 + fudge) * report.slack_term;
  return report;
}

DSample sample_D(const CubesTable& table, RngStream& rng) {
  if (table.k() != 3) {
    throw std::invalid_argument("the sampling distribution is defined for cubes tables");
  }
  if (table.n() < 3) throw std::invalid_argument("need n >= 3");
  const Field f = table.field();
  const int n = table.n();

  std::vector<std::uint32_t> x = rng.point(f, n);
  FlatConstraints through_x;
  through_x.contain_points.push_back(x);
  AffineFlat c1 = sample_flat(f, n, 3, rng, through_x);
  const std::uint32_t sigma = table.value_at(c1, x);

  // Uniform y in C1 other than x.
  auto x_local = c1.local_point(x);
  std::vector<std::uint32_t> y_local;
  do {
    y_local = rng.point(f, 3);
  } while (y_local == *x_local);
  std::vector<std::uint32_t> y = c1.embed(y_local);

  FlatConstraints plane_c;
  plane_c.contain_points.push_back(x);
  plane_c.contain_points.push_back(y);
  plane_c.within = c1;
  AffineFlat plane = sample_flat(f, n, 2, rng, plane_c);

  FlatConstraints through_plane;
  through_plane.contain.push_back(plane);
  AffineFlat c2 = sample_flat(f, n, 3, rng, through_plane);
  const std::uint32_t tau = table.value_at(c2, y);

  DSample out{std::move(x), std::move(y), sigma, tau, c1, c2, false};
  out.pass = entries_agree_on(table, out.c1, out.c2, plane);
  return out;
}

Estimate conditional_pass(const CubesTable& table, std::span<const std::uint32_t> x,
                          std::uint32_t sigma, std::uint64_t trials, std::uint64_t seed,
                          std::uint64_t reject_cap, int threads) {
  if (static_cast<int>(x.size()) != table.n()) {
    throw std::invalid_argument("point has wrong ambient dimension");
  }
  if (table.n() == table.k()) {
    throw std::invalid_argument("conditional pass needs n > k so distinct flats exist");
  }
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  const Field f = table.field();
  const int n = table.n();
  const int k = table.k();
  const std::vector<std::uint32_t> x0(x.begin(), x.end());

  return run_trials(
      trials, derive_seed(seed, "conditional-pass"),
      [&table, f, n, k, x0, sigma, reject_cap](std::uint64_t, RngStream& rng) {
        FlatConstraints through_x;
        through_x.contain_points.push_back(x0);
        // C1 uniform over C_{x,sigma} by rejection.
        std::uint64_t draws = 0;
        AffineFlat c1 = sample_flat(f, n, k, rng, through_x);
        while (table.value_at(c1, x0) != sigma) {
          if (++draws >= reject_cap) {
            throw RareEventError("conditioning value is essentially unused at x", draws);
          }
          c1 = sample_flat(f, n, k, rng, through_x);
        }
        // A random hyperplane of C1 through x, then a distinct flat over it.
        FlatConstraints plane_c;
        plane_c.contain_points.push_back(x0);
        plane_c.within = c1;
        AffineFlat plane = sample_flat(f, n, k - 1, rng, plane_c);
        FlatConstraints through_plane;
        through_plane.contain.push_back(plane);
        AffineFlat c2 = sample_flat(f, n, k, rng, through_plane);
        std::uint64_t redraws = 0;
        while (c2 == c1) {
          if (++redraws >= reject_cap) {
            throw RareEventError("could not draw a distinct neighbor", redraws);
          }
          c2 = sample_flat(f, n, k, rng, through_plane);
        }
        return table.value_at(c2, x0) == sigma &&
               entries_agree_on(table, c1, c2, plane);
      },
      threads);
}

}  // namespace ldt
