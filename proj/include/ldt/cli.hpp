#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ldt::cli {

inline constexpr const char* kVersion = "ldtlab-0.1.0";

// One experiment, fully described: kind, shared numeric parameters, the
// table to build or load, and kind-specific extras. Round-trips through
// JSON losslessly; flags override file fields which override defaults.
struct ExperimentConfig {
  std::string kind = "pass-estimate";
  std::uint32_t q = 11;
  int n = 4;
  int d = 2;
  int k = 3;
  int ell = 2;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir = ".";
  bool verify = false;
  nlohmann::json table = nlohmann::json::object();   // descriptor or build recipe
  nlohmann::json extras = nlohmann::json::object();  // kind-specific knobs
};

nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

// One CSV record per estimate; every emitted row is reproducible from
// (config, seed). Wall-clock time is excluded from the determinism contract.
struct ResultRow {
  std::string experiment;
  std::string label;
  std::string table_kind;
  std::uint32_t q = 0;
  int n = 0;
  int d = 0;
  int k = 0;
  int ell = 0;
  std::string rho;  // empty when not applicable
  std::string c;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double p_hat = 0.0;
  double half_width = 0.0;
  std::uint64_t successes = 0;
};

inline constexpr const char* kCsvHeader =
    "experiment,label,table,q,n,d,k,ell,rho,c,trials,seed,p_hat,half_width,"
    "successes,wall_ms,version";

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  nlohmann::json report;
  int exit_code = 0;
};

// Executes the experiment without touching the filesystem.
ExperimentOutput run_experiment(const ExperimentConfig& config);

// Executes, writes results.csv and report.json under out_dir, honoring
// --verify (re-run and diff). Exit codes: 0 success, 1 verify mismatch,
// 2 validation error, 3 resource cap, 4 decode produced no candidates.
int run(const ExperimentConfig& config);

// Full command line: subcommands estimate, compare-variants, spectra,
// planted-gap, decode, rs-test.
int run_main(int argc, char** argv);

}  // namespace ldt::cli
