#include "ldt/cli.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ldt/decoder.hpp"
#include "ldt/errors.hpp"
#include "ldt/spectra.hpp"
#include "ldt/tester.hpp"

namespace ldt::cli {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_line(const ResultRow& row, std::uint64_t wall_ms, bool with_wall) {
  std::ostringstream out;
  out << row.experiment << ',' << row.label << ',' << row.table_kind << ',' << row.q << ','
      << row.n << ',' << row.d << ',' << row.k << ',' << row.ell << ',' << row.rho << ','
      << row.c << ',' << row.trials << ',' << row.seed << ',' << fmt_double(row.p_hat) << ','
      << fmt_double(row.half_width) << ',' << row.successes << ','
      << (with_wall ? std::to_string(wall_ms) : std::string()) << ',' << kVersion;
  return out.str();
}

nlohmann::json estimate_to_json(const Estimate& est) {
  return {{"p_hat", est.p_hat()},
          {"half_width", est.half_width()},
          {"successes", est.successes},
          {"trials", est.trials}};
}

ResultRow base_row(const ExperimentConfig& config, const std::string& label,
                   const std::string& table_kind) {
  ResultRow row;
  row.experiment = config.kind;
  row.label = label;
  row.table_kind = table_kind;
  row.q = config.q;
  row.n = config.n;
  row.d = config.d;
  row.k = config.k;
  row.ell = config.ell;
  row.seed = config.seed;
  if (config.table.contains("rho")) row.rho = fmt_double(config.table["rho"].get<double>());
  if (config.table.contains("c")) row.c = fmt_double(config.table["c"].get<double>());
  return row;
}

void fill_estimate(ResultRow& row, const Estimate& est) {
  row.trials = est.trials;
  row.p_hat = est.p_hat();
  row.half_width = est.half_width();
  row.successes = est.successes;
}

// Builds the table from an explicit descriptor, or completes a build recipe
// {kind, rho?, c?, g_seed?} into one reproducible from the config seed.
std::unique_ptr<CubesTable> make_table(const ExperimentConfig& config) {
  Field f(config.q);
  nlohmann::json recipe = config.table;
  if (recipe.is_null() || recipe.empty()) recipe = {{"kind", "honest"}};
  const std::string kind = recipe.value("kind", "honest");
  if (recipe.contains("g") || recipe.contains("hyperplanes") || recipe.contains("entries")) {
    return table_from_descriptor(recipe);  // full descriptor as-is
  }
  CubesTable::Params params{f, config.n, config.d, config.k, config.seed};
  if (kind == "honest" || kind == "corrupted") {
    const std::uint64_t g_seed =
        recipe.value("g_seed", derive_seed(config.seed, "table-g"));
    RngStream rng(g_seed, 0);
    MultiPoly g = random_poly(f, config.n, config.d, rng);
    if (kind == "honest") return std::make_unique<HonestTable>(params, std::move(g));
    return std::make_unique<CorruptedTable>(params, std::move(g), recipe.value("rho", 0.0));
  }
  if (kind == "planted") {
    const double c = recipe.value("c", 0.25);
    const std::uint64_t setup = recipe.value("setup_seed", derive_seed(config.seed, "table-w"));
    return std::make_unique<PlantedTable>(params,
                                          PlantedSpec::sample(f, config.n, config.d, c, setup));
  }
  throw std::invalid_argument("unknown table recipe kind: " + kind);
}

DecoderParams decoder_params(const ExperimentConfig& config) {
  DecoderParams p;
  p.seed = config.seed;
  p.threads = config.threads;
  const nlohmann::json& e = config.extras;
  p.epsilon_hat = e.value("epsilon_hat", p.epsilon_hat);
  p.gamma = e.value("gamma", p.gamma);
  p.measure_threshold = e.value("measure_threshold", p.measure_threshold);
  p.theta = e.value("theta", p.theta);
  p.estimate_trials = e.value("estimate_trials", p.estimate_trials);
  p.epsilon_trials = e.value("epsilon_trials", p.epsilon_trials);
  p.agreement_trials = e.value("agreement_trials", p.agreement_trials);
  p.plurality_budget = e.value("plurality_budget", p.plurality_budget);
  p.ransac_rounds = e.value("ransac_rounds", p.ransac_rounds);
  p.ransac_check = e.value("ransac_check", p.ransac_check);
  p.num_seeds = e.value("num_seeds", p.num_seeds);
  p.reject_cap = e.value("reject_cap", p.reject_cap);
  return p;
}

nlohmann::json candidate_to_json(const DecodedCandidate& cand) {
  return {{"poly", to_text(cand.g)},
          {"agreement", estimate_to_json(cand.agreement)},
          {"provenance", {{"x", cand.x}, {"sigma", cand.sigma}}},
          {"f_measure", estimate_to_json(cand.f_measure)}};
}

nlohmann::json excellence_to_json(const SeedDiagnostics& diag) {
  return {{"x", diag.excellence.x},
          {"sigma", diag.excellence.sigma},
          {"mu_x", estimate_to_json(diag.excellence.mu_x)},
          {"line_disagreement", estimate_to_json(diag.excellence.line_disagreement)},
          {"p_x_sigma", estimate_to_json(diag.excellence.p_x_sigma)},
          {"excellent", diag.excellence.excellent},
          {"rare_event", diag.rare_event},
          {"fitted", diag.fitted},
          {"best_score", diag.best_score},
          {"plurality_flagged", diag.plurality_flagged}};
}

void decode_into(const ExperimentConfig& config, const CubesTable& table,
                 ExperimentOutput& out) {
  DecodeReport report = decode(table, decoder_params(config));
  nlohmann::json candidates = nlohmann::json::array();
  for (std::size_t i = 0; i < report.candidates.size(); ++i) {
    candidates.push_back(candidate_to_json(report.candidates[i]));
    ResultRow row = base_row(config, "candidate_" + std::to_string(i), table.kind());
    fill_estimate(row, report.candidates[i].agreement);
    out.rows.push_back(row);
  }
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& diag : report.seeds) seeds.push_back(excellence_to_json(diag));
  out.report["decode"] = {{"candidates", candidates},
                          {"seeds", seeds},
                          {"epsilon_hat", report.resolved.epsilon_hat},
                          {"gamma", report.resolved.gamma},
                          {"measure_threshold", report.resolved.measure_threshold},
                          {"theta", report.resolved.theta}};
  if (report.candidates.empty()) out.exit_code = 4;
}

void run_pass_estimate(const ExperimentConfig& config, ExperimentOutput& out) {
  auto table = make_table(config);
  Estimate est = estimate_pass(*table, {config.k, config.ell, config.trials, config.seed},
                               config.threads);
  const std::string label = "alpha_" + std::to_string(config.k) + std::to_string(config.ell) +
                            std::to_string(config.k);
  ResultRow row = base_row(config, label, table->kind());
  fill_estimate(row, est);
  out.rows.push_back(row);
  out.report["table"] = table->descriptor();
  out.report["estimate"] = estimate_to_json(est);
}

void run_variant_compare(const ExperimentConfig& config, ExperimentOutput& out) {
  auto table = make_table(config);
  const int r = config.extras.value("r", 0);
  const int r_prime = config.extras.value("r_prime", 1);
  const double fudge = config.extras.value("fudge", 0.5);
  VariantReport report =
      compare_variants(*table, r, r_prime, config.trials, config.seed, fudge, config.threads);

  ResultRow row_r = base_row(config,
                             "alpha_" + std::to_string(report.k) + std::to_string(r) +
                                 std::to_string(report.k),
                             table->kind());
  fill_estimate(row_r, report.alpha_r);
  row_r.ell = r;
  out.rows.push_back(row_r);
  ResultRow row_rp = base_row(config,
                              "alpha_" + std::to_string(report.k) + std::to_string(r_prime) +
                                  std::to_string(report.k),
                              table->kind());
  fill_estimate(row_rp, report.alpha_r_prime);
  row_rp.ell = r_prime;
  out.rows.push_back(row_rp);

  out.report["table"] = table->descriptor();
  out.report["variants"] = {{"r", r},
                            {"r_prime", r_prime},
                            {"alpha_r", estimate_to_json(report.alpha_r)},
                            {"alpha_r_prime", estimate_to_json(report.alpha_r_prime)},
                            {"slack_term", report.slack_term},
                            {"fudge", fudge},
                            {"lower_ok", report.lower_ok},
                            {"upper_ok", report.upper_ok}};
}

void run_spectra(const ExperimentConfig& config, ExperimentOutput& out) {
  const std::string family = config.extras.value("family", "grassmann");
  if (family == "grassmann") {
    const bool affine = config.extras.value("affine", false);
    GrassmannSpec spec{config.q, config.n, config.k, affine};
    nlohmann::json closed = nlohmann::json::array();
    for (int r = 0; r <= config.k; ++r) {
      Rational lam = grassmann_eigenvalue(config.q, config.n, config.k, r);
      closed.push_back({{"r", r},
                        {"numerator", lam.numerator()},
                        {"denominator", lam.denominator()},
                        {"value", boost::rational_cast<double>(lam)}});
      ResultRow row = base_row(config, "lambda_" + std::to_string(r), "-");
      row.p_hat = boost::rational_cast<double>(lam);
      out.rows.push_back(row);
    }
    SpectrumReport brute = brute_spectrum(spec, config.extras.value("vertex_cap", 2000));
    nlohmann::json numeric = nlohmann::json::array();
    for (const auto& e : brute.eigenvalues) {
      numeric.push_back({{"value", e.value}, {"multiplicity", e.multiplicity}});
    }
    out.report["spectrum"] = {{"family", "grassmann"},
                              {"affine", affine},
                              {"closed_form", closed},
                              {"numeric", numeric},
                              {"vertices", brute.vertex_count},
                              {"degree", brute.degree}};
    return;
  }
  if (family == "inclusion") {
    const std::string graph = config.extras.value("graph", "g6");
    InclusionGraphId id;
    if (graph == "g1") id = InclusionGraphId::kG1;
    else if (graph == "g2") id = InclusionGraphId::kG2;
    else if (graph == "g3") id = InclusionGraphId::kG3;
    else if (graph == "g4") id = InclusionGraphId::kG4;
    else if (graph == "g5") id = InclusionGraphId::kG5;
    else if (graph == "g6") id = InclusionGraphId::kG6;
    else throw std::invalid_argument("unknown inclusion graph id: " + graph);
    const int m = config.extras.value("m", config.n);
    SingularValueReport report = inclusion_singular_value(id, config.q, m);
    ResultRow row = base_row(config, "second_singular_" + graph, "-");
    row.p_hat = report.exact;
    out.rows.push_back(row);
    out.report["spectrum"] = {{"family", "inclusion"},
                              {"graph", graph},
                              {"m", m},
                              {"exact", report.exact},
                              {"paper_approx", report.paper_approx},
                              {"small_m_warning", report.small_m_warning},
                              {"left_count", report.left_count},
                              {"right_count", report.right_count}};
    return;
  }
  throw std::invalid_argument("unknown spectra family: " + family);
}

void run_planted_gap(const ExperimentConfig& config, ExperimentOutput& out) {
  ExperimentConfig planted_config = config;
  if (!planted_config.table.contains("kind")) planted_config.table["kind"] = "planted";
  if (planted_config.table["kind"] != "planted") {
    throw std::invalid_argument("planted-gap runs on a planted table");
  }
  auto table = make_table(planted_config);
  Estimate pass = estimate_pass(*table, {config.k, config.ell, config.trials, config.seed},
                                config.threads);
  ResultRow row = base_row(planted_config,
                           "alpha_" + std::to_string(config.k) + std::to_string(config.ell) +
                               std::to_string(config.k),
                           table->kind());
  fill_estimate(row, pass);
  out.rows.push_back(row);
  out.report["table"] = table->descriptor();
  out.report["pass_estimate"] = estimate_to_json(pass);

  decode_into(planted_config, *table, out);
  out.exit_code = 0;  // an empty candidate list is the expected outcome here
  double best = 0.0;
  for (const auto& cand : out.report["decode"]["candidates"]) {
    best = std::max(best, cand["agreement"]["p_hat"].get<double>());
  }
  out.report["gap"] = {{"best_agreement", best},
                       {"pass_over_agreement_ok", pass.p_hat() >= 5.0 * best}};
}

void run_decode(const ExperimentConfig& config, ExperimentOutput& out) {
  auto table = make_table(config);
  out.report["table"] = table->descriptor();
  decode_into(config, *table, out);
}

void run_rs_test(const ExperimentConfig& config, ExperimentOutput& out) {
  Field f(config.q);
  const int fdeg = config.extras.value("fdeg", config.d + 1);
  RngStream rng(derive_seed(config.seed, "rs-f"), 0);
  MultiPoly poly = random_poly(f, config.n, fdeg, rng);
  PointFn fn = [&poly](std::span<const std::uint32_t> pt) { return poly.evaluate(pt); };
  Estimate est = rs_neighborhood_test(fn, f, config.n, config.d, config.trials, config.seed,
                                      config.threads);
  ResultRow row = base_row(config, "rs_failure_rate", "-");
  fill_estimate(row, est);
  out.rows.push_back(row);
  out.report["rs_test"] = {{"fdeg", fdeg},
                           {"poly", to_text(poly)},
                           {"failure_rate", estimate_to_json(est)}};
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& config) {
  return {{"kind", config.kind},     {"q", config.q},        {"n", config.n},
          {"d", config.d},           {"k", config.k},        {"ell", config.ell},
          {"trials", config.trials}, {"seed", config.seed},  {"threads", config.threads},
          {"out", config.out_dir},   {"table", config.table}, {"extras", config.extras}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  config.kind = j.value("kind", config.kind);
  config.q = j.value("q", config.q);
  config.n = j.value("n", config.n);
  config.d = j.value("d", config.d);
  config.k = j.value("k", config.k);
  config.ell = j.value("ell", config.ell);
  config.trials = j.value("trials", config.trials);
  config.seed = j.value("seed", config.seed);
  config.threads = j.value("threads", config.threads);
  config.out_dir = j.value("out", config.out_dir);
  if (j.contains("table")) config.table = j["table"];
  if (j.contains("extras")) config.extras = j["extras"];
  return config;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  ExperimentOutput out;
  // Threads and output directory are execution details; results must not
  // depend on them, so the echoed config omits them.
  nlohmann::json echo = config_to_json(config);
  echo.erase("threads");
  echo.erase("out");
  out.report["config"] = echo;
  out.report["version"] = kVersion;
  if (config.kind == "pass-estimate") run_pass_estimate(config, out);
  else if (config.kind == "variant-compare") run_variant_compare(config, out);
  else if (config.kind == "spectra") run_spectra(config, out);
  else if (config.kind == "planted-gap") run_planted_gap(config, out);
  else if (config.kind == "decode") run_decode(config, out);
  else if (config.kind == "rs-test") run_rs_test(config, out);
  else throw std::invalid_argument("unknown experiment kind: " + config.kind);
  return out;
}

namespace {

void write_outputs(const ExperimentConfig& config, const ExperimentOutput& out,
                   std::uint64_t wall_ms) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  std::ofstream csv(fs::path(config.out_dir) / "results.csv");
  csv << kCsvHeader << "\n";
  for (const auto& row : out.rows) csv << csv_line(row, wall_ms, true) << "\n";
  std::ofstream report(fs::path(config.out_dir) / "report.json");
  report << out.report.dump(2) << "\n";
}

bool outputs_equal(const ExperimentOutput& a, const ExperimentOutput& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (csv_line(a.rows[i], 0, false) != csv_line(b.rows[i], 0, false)) return false;
  }
  return a.report == b.report && a.exit_code == b.exit_code;
}

}  // namespace

int run(const ExperimentConfig& config) {
  try {
    const auto start = std::chrono::steady_clock::now();
    ExperimentOutput out = run_experiment(config);
    const auto stop = std::chrono::steady_clock::now();
    const std::uint64_t wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();
    write_outputs(config, out, wall_ms);
    if (config.verify) {
      ExperimentOutput again = run_experiment(config);
      if (!outputs_equal(out, again)) {
        std::cerr << "verify: re-run produced different results\n";
        return 1;
      }
      std::cout << "verify: ok\n";
    }
    return out.exit_code;
  } catch (const ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const RareEventError& e) {
    std::cerr << "rare event after " << e.draws() << " draws: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_main(int argc, char** argv) {
  CLI::App app{"Finite-field laboratory for agreement tests on tables of local polynomials"};
  app.require_subcommand(1);

  struct Flags {
    std::string config_file;
    std::uint32_t q = 0;
    int n = -1, d = -1, k = -1, ell = -1, threads = -1;
    std::uint64_t trials = 0;
    bool trials_set = false;
    std::int64_t seed = -1;
    bool seed_set = false;
    std::string out_dir, table_file, table_kind, family, graph;
    double rho = -1.0, c = -1.0, fudge = -1.0;
    std::int64_t g_seed = -1;
    int r = -1, r_prime = -1, m = -1, fdeg = -1, num_seeds = -1;
    bool verify = false;
  } flags;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", flags.config_file, "JSON config file; flags override fields");
    cmd->add_option("--q", flags.q, "field size (prime)");
    cmd->add_option("--n", flags.n, "ambient dimension");
    cmd->add_option("--d", flags.d, "degree bound");
    cmd->add_option("--k", flags.k, "table subspace dimension");
    cmd->add_option("--ell", flags.ell, "intersection dimension of the test");
    cmd->add_option("--trials", flags.trials, "Monte Carlo trials")
        ->each([&](const std::string&) { flags.trials_set = true; });
    cmd->add_option("--seed", flags.seed, "base seed (all results replayable from it)")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--threads", flags.threads, "worker threads (0 = library default)");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--table", flags.table_file, "table descriptor JSON file");
    cmd->add_option("--kind", flags.table_kind, "table recipe: honest|corrupted|planted");
    cmd->add_option("--rho", flags.rho, "corruption rate");
    cmd->add_option("--c", flags.c, "planted hyperplane density constant");
    cmd->add_option("--g-seed", flags.g_seed, "seed for the encoded polynomial");
    cmd->add_flag("--verify", flags.verify, "re-run and diff the outputs");
    return cmd;
  };

  CLI::App* estimate = add_common(app.add_subcommand("estimate", "pass probability of the (k, ell) test"));
  CLI::App* variants = add_common(app.add_subcommand("compare-variants", "alpha_{k r k} vs alpha_{k r' k}"));
  variants->add_option("--r", flags.r, "first intersection dimension");
  variants->add_option("--r-prime", flags.r_prime, "second intersection dimension");
  variants->add_option("--fudge", flags.fudge, "replacement for the vanishing terms");
  CLI::App* spectra = add_common(app.add_subcommand("spectra", "closed-form vs brute-force spectra"));
  spectra->add_option("--family", flags.family, "grassmann | inclusion");
  spectra->add_option("--graph", flags.graph, "inclusion graph id g1..g6");
  spectra->add_option("--m", flags.m, "ambient dimension of the inclusion graph");
  CLI::App* planted = add_common(app.add_subcommand("planted-gap", "pass rate vs best decodable agreement"));
  planted->add_option("--num-seeds", flags.num_seeds, "decoder candidate seeds");
  CLI::App* decode_cmd = add_common(app.add_subcommand("decode", "recover global polynomials from the table"));
  decode_cmd->add_option("--num-seeds", flags.num_seeds, "decoder candidate seeds");
  CLI::App* rs = add_common(app.add_subcommand("rs-test", "neighborhood low-degree test"));
  rs->add_option("--fdeg", flags.fdeg, "actual degree of the probed polynomial");

  CLI11_PARSE(app, argc, argv);

  ExperimentConfig config;
  if (!flags.config_file.empty()) {
    std::ifstream in(flags.config_file);
    if (!in) {
      std::cerr << "cannot read config file: " << flags.config_file << "\n";
      return 2;
    }
    nlohmann::json j;
    try {
      in >> j;
      config = config_from_json(j);
    } catch (const std::exception& e) {
      std::cerr << "bad config file: " << e.what() << "\n";
      return 2;
    }
  }

  if (estimate->parsed()) config.kind = "pass-estimate";
  if (variants->parsed()) config.kind = "variant-compare";
  if (spectra->parsed()) config.kind = "spectra";
  if (planted->parsed()) config.kind = "planted-gap";
  if (decode_cmd->parsed()) config.kind = "decode";
  if (rs->parsed()) config.kind = "rs-test";

  if (flags.q != 0) config.q = flags.q;
  if (flags.n >= 0) config.n = flags.n;
  if (flags.d >= 0) config.d = flags.d;
  if (flags.k >= 0) config.k = flags.k;
  if (flags.ell >= 0) config.ell = flags.ell;
  if (flags.trials_set) config.trials = flags.trials;
  if (flags.seed_set) config.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.threads >= 0) config.threads = flags.threads;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  config.verify = config.verify || flags.verify;

  if (!flags.table_file.empty()) {
    std::ifstream in(flags.table_file);
    if (!in) {
      std::cerr << "cannot read table descriptor: " << flags.table_file << "\n";
      return 2;
    }
    try {
      in >> config.table;
    } catch (const std::exception& e) {
      std::cerr << "bad table descriptor: " << e.what() << "\n";
      return 2;
    }
  }
  if (!flags.table_kind.empty()) config.table["kind"] = flags.table_kind;
  if (flags.rho >= 0.0) config.table["rho"] = flags.rho;
  if (flags.c >= 0.0) config.table["c"] = flags.c;
  if (flags.g_seed >= 0) config.table["g_seed"] = static_cast<std::uint64_t>(flags.g_seed);
  if (flags.r >= 0) config.extras["r"] = flags.r;
  if (flags.r_prime >= 0) config.extras["r_prime"] = flags.r_prime;
  if (flags.fudge >= 0.0) config.extras["fudge"] = flags.fudge;
  if (!flags.family.empty()) config.extras["family"] = flags.family;
  if (!flags.graph.empty()) config.extras["graph"] = flags.graph;
  if (flags.m >= 0) config.extras["m"] = flags.m;
  if (flags.fdeg >= 0) config.extras["fdeg"] = flags.fdeg;
  if (flags.num_seeds >= 0) config.extras["num_seeds"] = flags.num_seeds;

  return run(config);
}

}  // namespace ldt::cli
