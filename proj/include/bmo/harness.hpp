#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bmo/bandit_p.hpp"
#include "bmo/envs.hpp"
#include "bmo/oracle.hpp"
#include "bmo/trace.hpp"

namespace bmo {

/// Complete description of an experiment. Defaults follow the partition
/// algorithm's reference setting.
struct RunConfig {
  std::string algo = "p";  // p | z | random-uniform | grid-ucb
  std::string env;
  std::size_t dim = 0;  // constant env only
  std::int64_t horizon = 10000;
  double eps = 0.01;
  double eta = 0.001;
  double alpha = 1.0;
  std::vector<double> deltas{0.01};
  double noise_bound = 0.1;
  std::uint64_t seed = 1;
  int replications = 1;
  int jobs = 1;
  std::string out_dir = "bmo-out";

  AlgoConfig algo_config() const { return {horizon, eps, eta, alpha}; }
  /// Throws ConfigError naming the offending flag.
  void validate() const;
  /// Flat key/value provenance, flag names without dashes.
  std::vector<std::pair<std::string, std::string>> provenance() const;
};

/// Reads flat JSON keys (flag names without the leading dashes) on top of
/// `base`. Throws ConfigError with line/column for syntax errors and with
/// the key name for unknown keys or type errors.
RunConfig config_from_json(const std::string& text, RunConfig base = {});

/// Parses `run` arguments: defaults, then --config FILE, then flags.
/// Validates the result.
RunConfig parse_config(const std::vector<std::string>& args);

/// Depth of the fixed grid whose cells have measure closest to eta.
int surrogate_grid_depth(double eta, std::size_t dim);

/// Uniform arms over [0,1)^d; rows carry the grid cell holding each arm as
/// the cube used for <f>.
RunTrace baseline_random(const RunConfig& config, const Environment& env, std::uint64_t seed);

/// UCB with the same index over a fixed dyadic grid at surrogate depth.
RunTrace baseline_grid_ucb(const RunConfig& config, const Environment& env, std::uint64_t seed);

/// Dispatches on config.algo.
RunTrace run_single(const RunConfig& config, const Environment& env, std::uint64_t seed);

Environment make_environment(const RunConfig& config);

struct ReplicationResult {
  RunTrace trace;
  std::vector<RegretLedger> ledgers;  // one per delta
  std::vector<CheckResult> checks;
};

struct ExperimentResult {
  std::vector<ReplicationResult> runs;
  std::vector<AdmissibilityReport> deltas;
  std::vector<std::string> warnings;
};

/// Runs `replications` independent runs (seeds seed + i) on up to `jobs`
/// threads. With write_files, emits into out_dir:
///   trace_run<i>.csv, ledger_run<i>_delta<d>.csv, aggregate_delta<d>.csv,
///   report.csv and config.json.
ExperimentResult run_experiment(const RunConfig& config, bool write_files = true);

/// Checkers that apply to one trace (point scattering, play count, bounds).
std::vector<CheckResult> trace_checks(const RunTrace& trace, const RunConfig& config,
                                      std::size_t dim, double noise_bound);

void write_ledger_csv(std::ostream& out, const RegretLedger& ledger);

/// Mean and sample standard deviation across equal-length ledgers, row by row.
void write_aggregate_csv(std::ostream& out, const std::vector<const RegretLedger*>& ledgers);

void write_report(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace bmo
