#include "ldt/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>

#include "ldt/errors.hpp"
#include "ldt/runner.hpp"

namespace ldt {

namespace {

std::vector<std::uint8_t> point_bytes(std::span<const std::uint32_t> x, std::uint32_t sigma) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(4 * (x.size() + 1));
  for (std::uint32_t v : x) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(sigma >> (8 * i)));
  return bytes;
}

// Seed that depends on (base seed, tag, the pair (x, sigma)).
std::uint64_t pair_seed(std::uint64_t seed, std::string_view tag,
                        std::span<const std::uint32_t> x, std::uint32_t sigma) {
  return derive_seed(seed, tag, siphash24(0x9e3779b97f4a7c15ull, 0xd1b54a32d192ed03ull,
                                          point_bytes(x, sigma)));
}

// Uniform member of C_{x,sigma} by rejection; counts draws against the cap.
AffineFlat draw_conditioned(const CubesTable& table, std::span<const std::uint32_t> x,
                            std::uint32_t sigma, RngStream& rng, std::uint64_t cap) {
  const Field f = table.field();
  FlatConstraints through;
  through.contain_points.emplace_back(x.begin(), x.end());
  std::uint64_t draws = 0;
  while (true) {
    AffineFlat c = sample_flat(f, table.n(), table.k(), rng, through);
    if (table.value_at(c, x) == sigma) return c;
    if (++draws >= cap) {
      throw RareEventError("value is essentially unused at the point", draws);
    }
  }
}

}  // namespace

ResolvedDecoderParams resolve_params(const CubesTable& table, const DecoderParams& params) {
  ResolvedDecoderParams out{};
  out.epsilon_hat = params.epsilon_hat;
  if (out.epsilon_hat < 0.0) {
    TestSpec spec{table.k(), table.k() - 1, params.epsilon_trials,
                  derive_seed(params.seed, "decode-epsilon")};
    out.epsilon_hat = estimate_pass(table, spec, params.threads).p_hat();
  }
  const int d = std::max(table.d(), 1);
  out.gamma = params.gamma >= 0.0 ? params.gamma
                                  : 1.0 / (1000.0 * d * d * d);
  out.measure_threshold =
      params.measure_threshold >= 0.0 ? params.measure_threshold : out.epsilon_hat / 5.0;
  out.theta = params.theta >= 0.0 ? params.theta : 8.0 * d * out.gamma;
  return out;
}

ExcellenceReport assess_excellence(const CubesTable& table, std::span<const std::uint32_t> x,
                                   std::uint32_t sigma, const DecoderParams& params) {
  if (static_cast<int>(x.size()) != table.n()) {
    throw std::invalid_argument("point has wrong ambient dimension");
  }
  if (table.n() < table.k()) throw std::invalid_argument("ambient space too small");
  const ResolvedDecoderParams resolved = resolve_params(table, params);
  const Field f = table.field();
  const int n = table.n();
  const int k = table.k();
  const std::vector<std::uint32_t> x0(x.begin(), x.end());

  ExcellenceReport report;
  report.x = x0;
  report.sigma = sigma;

  FlatConstraints through_x;
  through_x.contain_points.push_back(x0);

  report.mu_x = run_trials(
      params.estimate_trials, pair_seed(params.seed, "exc-mu", x, sigma),
      [&](std::uint64_t, RngStream& rng) {
        AffineFlat c = sample_flat(f, n, k, rng, through_x);
        return table.value_at(c, x0) == sigma;
      },
      params.threads);

  const std::uint64_t cap = params.reject_cap;
  report.line_disagreement = run_trials(
      params.estimate_trials, pair_seed(params.seed, "exc-line", x, sigma),
      [&](std::uint64_t, RngStream& rng) {
        AffineFlat c1 = draw_conditioned(table, x0, sigma, rng, cap);
        FlatConstraints line_c;
        line_c.contain_points.push_back(x0);
        line_c.within = c1;
        AffineFlat line = sample_flat(f, n, 1, rng, line_c);
        // C2 uniform over members of C_{x,sigma} containing the line.
        FlatConstraints over_line;
        over_line.contain.push_back(line);
        std::uint64_t draws = 0;
        AffineFlat c2 = sample_flat(f, n, k, rng, over_line);
        while (table.value_at(c2, x0) != sigma) {
          if (++draws >= cap) {
            throw RareEventError("no sigma-consistent cube over the line", draws);
          }
          c2 = sample_flat(f, n, k, rng, over_line);
        }
        return !entries_agree_on(table, c1, c2, line);
      },
      params.threads);

  // Two k-flats meet in dimension >= 2k - n, so the diagnostic's
  // line-transversal conditioning is only feasible for n >= 2k - 1.
  if (n >= 2 * k - 1) {
  report.p_x_sigma = run_trials(
      params.estimate_trials, pair_seed(params.seed, "exc-pxs", x, sigma),
      [&](std::uint64_t, RngStream& rng) {
        AffineFlat c1 = draw_conditioned(table, x0, sigma, rng, cap);
        FlatConstraints line_c;
        line_c.contain_points.push_back(x0);
        line_c.within = c1;
        AffineFlat line = sample_flat(f, n, 1, rng, line_c);
        // C2 over the line meeting C1 exactly in it.
        FlatConstraints over_line;
        over_line.contain.push_back(line);
        std::uint64_t draws = 0;
        AffineFlat c2 = sample_flat(f, n, k, rng, over_line);
        while (true) {
          auto meet = intersect(c1, c2);
          if (meet && meet->dim() == 1) break;
          if (++draws >= cap) {
            throw RareEventError("no transversal neighbor over the line", draws);
          }
          c2 = sample_flat(f, n, k, rng, over_line);
        }
        return table.value_at(c2, x0) == sigma &&
               !entries_agree_on(table, c1, c2, line);
      },
      params.threads);
  }

  report.excellent =
      report.mu_x.upper() >= resolved.measure_threshold &&
      report.line_disagreement.lower() <= resolved.gamma;
  return report;
}

PluralityFn::PluralityFn(const CubesTable& table, std::vector<std::uint32_t> x,
                         std::uint32_t sigma, int budget, std::uint64_t reject_cap,
                         std::uint64_t seed)
    : table_(&table), x_(std::move(x)), sigma_(sigma), budget_(budget),
      reject_cap_(reject_cap), seed_(seed) {
  if (static_cast<int>(x_.size()) != table.n()) {
    throw std::invalid_argument("point has wrong ambient dimension");
  }
  if (budget_ < 1) throw std::invalid_argument("plurality budget must be positive");
}

std::uint32_t PluralityFn::value(std::span<const std::uint32_t> y) {
  if (std::equal(y.begin(), y.end(), x_.begin(), x_.end())) return sigma_;
  std::vector<std::uint32_t> key(y.begin(), y.end());
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;

  const Field f = table_->field();
  RngStream rng = keyed_stream(seed_, "plurality", point_bytes(key, sigma_));
  FlatConstraints through;
  through.contain_points.push_back(x_);
  through.contain_points.push_back(key);

  std::vector<std::uint32_t> counts(f.q(), 0);
  int accepted = 0;
  std::uint64_t draws = 0;
  while (accepted < budget_ && draws < reject_cap_) {
    ++draws;
    AffineFlat c = sample_flat(f, table_->n(), table_->k(), rng, through);
    if (table_->value_at(c, x_) != sigma_) continue;
    ++counts[table_->value_at(c, key)];
    ++accepted;
  }
  std::uint32_t mode = 0;
  if (accepted == 0) {
    // No qualifying cube found; assign arbitrarily and flag the point.
    ++flagged_;
  } else {
    for (std::uint32_t v = 1; v < f.q(); ++v) {
      if (counts[v] > counts[mode]) mode = v;  // ties keep the smaller value
    }
  }
  memo_.emplace(std::move(key), mode);
  return mode;
}

Estimate rs_neighborhood_test(const PointFn& f, const Field& field, int n, int d,
                              std::uint64_t trials, std::uint64_t seed, int threads) {
  if (d + 2 > static_cast<int>(field.q())) {
    throw std::invalid_argument("neighborhood test requires d + 2 <= q");
  }
  if (n < 1 || trials < 1) throw std::invalid_argument("bad test parameters");
  // Leading finite-difference weights over the nodes i = 0..d+1:
  // w_i = prod_{j != i} (i - j)^{-1}; the weighted value sum is the top
  // coefficient of the interpolating polynomial, zero iff degree <= d.
  const int points = d + 2;
  std::vector<std::uint32_t> weights(points);
  for (int i = 0; i < points; ++i) {
    std::uint32_t denom = 1;
    for (int j = 0; j < points; ++j) {
      if (j == i) continue;
      const std::uint32_t diff = i >= j ? field.reduce(i - j) : field.neg(field.reduce(j - i));
      denom = field.mul(denom, diff);
    }
    weights[i] = field.inv(denom);
  }

  return run_trials(
      trials, derive_seed(seed, "rs-neighborhood"),
      [&, points](std::uint64_t, RngStream& rng) {
        std::vector<std::uint32_t> y = rng.point(field, n);
        std::vector<std::uint32_t> h = rng.point(field, n);
        while (h == y) h = rng.point(field, n);
        std::vector<std::uint32_t> step(n), pt(n);
        for (int j = 0; j < n; ++j) step[j] = field.sub(h[j], y[j]);
        std::uint32_t acc = 0;
        for (int i = 0; i < points; ++i) {
          for (int j = 0; j < n; ++j) {
            pt[j] = field.add(y[j], field.mul(field.reduce(i), step[j]));
          }
          acc = field.add(acc, field.mul(weights[i], f(pt)));
        }
        return acc != 0;  // success counts failures of the local fit
      },
      threads);
}

FitResult fit_global(const PointFn& f, const Field& field, int n, int d,
                     const DecoderParams& params, double theta, std::uint64_t seed) {
  if (d + 1 > static_cast<int>(field.q())) {
    throw std::invalid_argument("global fit requires d + 1 <= q");
  }
  const int sample_size = MonomialTable::get(n, d)->count();
  FitResult result;
  std::map<std::vector<std::uint32_t>, double> scored;

  for (int round = 0; round < params.ransac_rounds; ++round) {
    result.rounds_used = round + 1;
    RngStream draw(derive_seed(seed, "fit-draw", round), 0);
    std::optional<MultiPoly> candidate;
    for (int attempt = 0; attempt < 16 && !candidate; ++attempt) {
      std::vector<std::vector<std::uint32_t>> pts;
      std::vector<std::uint32_t> vals;
      pts.reserve(sample_size);
      for (int i = 0; i < sample_size; ++i) {
        pts.push_back(draw.point(field, n));
        vals.push_back(f(pts.back()));
      }
      auto interp = interpolate(field, n, d, pts, vals);
      if (interp.status == FitStatus::kOk) candidate = std::move(interp.poly);
    }
    if (!candidate) continue;

    std::vector<std::uint32_t> key(candidate->coeffs().begin(), candidate->coeffs().end());
    auto seen = scored.find(key);
    double score;
    if (seen != scored.end()) {
      score = seen->second;
    } else {
      RngStream check(derive_seed(seed, "fit-score", round), 0);
      std::uint64_t hits = 0;
      for (int i = 0; i < params.ransac_check; ++i) {
        std::vector<std::uint32_t> pt = check.point(field, n);
        hits += f(pt) == candidate->evaluate(pt);
      }
      score = static_cast<double>(hits) / params.ransac_check;
      scored.emplace(std::move(key), score);
    }
    if (score > result.best_score) {
      result.best_score = score;
      result.poly = std::move(candidate);
    }
    if (result.best_score == 1.0) break;
  }
  if (result.best_score < 1.0 - theta) result.poly.reset();
  return result;
}

DecodeReport decode(const CubesTable& table, const DecoderParams& params) {
  const ResolvedDecoderParams resolved = resolve_params(table, params);
  DecoderParams local = params;
  local.epsilon_hat = resolved.epsilon_hat;
  local.gamma = resolved.gamma;
  local.measure_threshold = resolved.measure_threshold;
  local.theta = resolved.theta;

  const Field f = table.field();
  const int n = table.n();
  const int k = table.k();

  DecodeReport report;
  report.resolved = resolved;
  report.seeds.resize(params.num_seeds);
  struct Fitted {
    MultiPoly g;
    std::vector<std::uint32_t> x;
    std::uint32_t sigma;
  };
  std::vector<std::optional<Fitted>> fitted(params.num_seeds);

  // Candidate seeds are independent; inner estimates run single threaded
  // inside the parallel region and the reduction below is in seed order, so
  // the report does not depend on the thread count.
  std::exception_ptr error;
  std::mutex error_mu;
#ifdef _OPENMP
#pragma omp parallel for num_threads(params.threads > 0 ? params.threads : omp_get_max_threads()) \
    schedule(dynamic)
#endif
  for (int s = 0; s < params.num_seeds; ++s) {
    try {
      DecoderParams seed_params = local;
      seed_params.threads = 1;
      RngStream pick(derive_seed(params.seed, "seed-pick", s), 0);
      AffineFlat c = sample_flat(f, n, k, pick);
      std::vector<std::uint32_t> t = pick.point(f, k);
      std::vector<std::uint32_t> x = c.embed(t);
      const std::uint32_t sigma = table.query(c).evaluate(t);

      SeedDiagnostics diag;
      try {
        diag.excellence = assess_excellence(table, x, sigma, seed_params);
      } catch (const RareEventError&) {
        diag.rare_event = true;
        diag.excellence.x = x;
        diag.excellence.sigma = sigma;
      }
      if (diag.excellence.excellent) {
        PluralityFn plurality(table, x, sigma, params.plurality_budget, params.reject_cap,
                              pair_seed(params.seed, "plurality-fn", x, sigma));
        PointFn fn = [&plurality](std::span<const std::uint32_t> y) {
          return plurality.value(y);
        };
        FitResult fit = fit_global(fn, f, n, table.d(), seed_params, resolved.theta,
                                   pair_seed(params.seed, "fit", x, sigma));
        diag.best_score = fit.best_score;
        diag.plurality_flagged = plurality.flagged_points();
        if (fit.poly) {
          diag.fitted = true;
          fitted[s] = Fitted{std::move(*fit.poly), std::move(x), sigma};
        }
      }
      report.seeds[s] = std::move(diag);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  // Deduplicate identical polynomials, keeping first-seed provenance.
  std::vector<Fitted> unique;
  for (int s = 0; s < params.num_seeds; ++s) {
    if (!fitted[s]) continue;
    bool duplicate = false;
    for (const auto& u : unique) duplicate |= u.g == fitted[s]->g;
    if (!duplicate) unique.push_back(std::move(*fitted[s]));
  }

  for (std::size_t i = 0; i < unique.size(); ++i) {
    DecodedCandidate candidate{std::move(unique[i].g), {}, std::move(unique[i].x),
                               unique[i].sigma, {}};
    candidate.agreement = table_agreement(table, candidate.g, params.agreement_trials,
                                          derive_seed(params.seed, "cand-agree", i),
                                          params.threads);
    const MultiPoly& g = candidate.g;
    const std::vector<std::uint32_t>& x0 = candidate.x;
    const std::uint32_t sigma = candidate.sigma;
    candidate.f_measure = run_trials(
        params.estimate_trials, derive_seed(params.seed, "cand-fmeasure", i),
        [&](std::uint64_t, RngStream& rng) {
          AffineFlat c = draw_conditioned(table, x0, sigma, rng, params.reject_cap);
          return table.query(c) == restrict_to(g, c);
        },
        params.threads);
    report.candidates.push_back(std::move(candidate));
  }
  std::stable_sort(report.candidates.begin(), report.candidates.end(),
                   [](const DecodedCandidate& a, const DecodedCandidate& b) {
                     return a.agreement.p_hat() > b.agreement.p_hat();
                   });
  return report;
}

EqualityWitness candidate_equality_check(const MultiPoly& g1, const MultiPoly& g2,
                                         std::span<const std::uint32_t> x,
                                         std::span<const std::uint32_t> y, RngStream& rng) {
  g1.field().require_same(g2.field());
  if (g1.nvars() != g2.nvars()) throw std::invalid_argument("variable count mismatch");
  EqualityWitness result;
  if (g1 == g2) {
    result.equal = true;
    return result;
  }
  const Field& f = g1.field();
  const int n = g1.nvars();
  if (static_cast<int>(x.size()) != n || static_cast<int>(y.size()) != n ||
      std::equal(x.begin(), x.end(), y.begin(), y.end())) {
    throw std::invalid_argument("probe anchors must be two distinct points");
  }

  std::vector<std::uint32_t> dir(n);
  for (int i = 0; i < n; ++i) dir[i] = f.sub(y[i], x[i]);
  AffineFlat line = AffineFlat::canonicalize(f, x, {dir});

  for (int probes = 1; probes <= 100000; ++probes) {
    result.probes = probes;
    if (n < 3) {
      // Too few dimensions for the cube-style probe; plain random probing.
      std::vector<std::uint32_t> z = rng.point(f, n);
      if (g1.evaluate(z) != g2.evaluate(z)) {
        result.witness = std::move(z);
        return result;
      }
      continue;
    }
    // z1 off the anchor line, z2 off the plane spanned with z1.
    std::vector<std::uint32_t> z1 = rng.point(f, n);
    while (line.contains_point(z1)) z1 = rng.point(f, n);
    std::vector<std::uint32_t> d1(n);
    for (int i = 0; i < n; ++i) d1[i] = f.sub(z1[i], x[i]);
    AffineFlat plane = AffineFlat::canonicalize(f, x, {dir, d1});
    std::vector<std::uint32_t> z2 = rng.point(f, n);
    while (plane.contains_point(z2)) z2 = rng.point(f, n);

    if (g1.evaluate(z1) != g2.evaluate(z1)) {
      result.witness = std::move(z1);
      return result;
    }
    if (g1.evaluate(z2) != g2.evaluate(z2)) {
      result.witness = std::move(z2);
      return result;
    }
  }
  throw std::logic_error("witness search did not terminate");
}

}  // namespace ldt
