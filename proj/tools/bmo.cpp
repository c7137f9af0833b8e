#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bmo/errors.hpp"
#include "bmo/harness.hpp"
#include "bmo/oracle.hpp"

namespace {

constexpr const char* kUsage =
    "usage: bmo <command> [options]\n"
    "  run     simulate one experiment and write traces, ledgers and a report\n"
    "  check   run the oracle checkers on a trace CSV\n"
    "  fdelta  print the f^delta table for an environment\n"
    "Use `bmo <command> --help` for the options of each command.\n";

int cmd_run(const std::vector<std::string>& args) {
  for (const auto& a : args) {
    if (a == "-h" || a == "--help") {
      std::vector<std::string> help = {"--help"};
      try {
        bmo::parse_config(help);
      } catch (const bmo::ConfigError& e) {
        std::cout << e.what() << '\n';
      }
      return 0;
    }
  }
  const bmo::RunConfig config = bmo::parse_config(args);
  const auto result = bmo::run_experiment(config, true);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  int failures = 0;
  for (const auto& run : result.runs) {
    for (const auto& c : run.checks) failures += c.passed ? 0 : 1;
  }
  std::cout << "wrote " << result.runs.size() << " run(s) to " << config.out_dir << '\n';
  for (std::size_t k = 0; k < result.deltas.size(); ++k) {
    double mean = 0.0;
    for (const auto& run : result.runs) mean += run.ledgers[k].final_regret();
    mean /= static_cast<double>(result.runs.size());
    std::printf("delta=%g f_delta=%.10g mean_final_delta_regret=%.10g\n", result.deltas[k].delta,
                result.deltas[k].f_delta, mean);
  }
  if (failures) std::cerr << failures << " checker(s) failed; see report.csv\n";
  return failures ? 1 : 0;
}

int cmd_check(int argc, char** argv) {
  CLI::App app{"bmo check: run the oracle checkers on a trace CSV"};
  std::string path;
  std::size_t jn_samples = 0;
  double jn_lambda = 1.0;
  std::uint64_t seed = 1;
  app.add_option("trace", path, "trace CSV written by `bmo run`")->required();
  app.add_option("--jn-samples", jn_samples,
                 "also run the John-Nirenberg check on every final cube with this many samples");
  app.add_option("--jn-lambda", jn_lambda, "threshold for the John-Nirenberg check");
  app.add_option("--seed", seed, "seed for Monte-Carlo checks");
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(path);
  if (!in) throw bmo::ConfigError("cannot open trace '" + path + "'");
  const bmo::RunTrace trace = bmo::read_trace_csv(in);

  bmo::RunConfig config;
  const auto get = [&](const char* key) -> const std::string* {
    auto it = trace.provenance.find(key);
    return it == trace.provenance.end() ? nullptr : &it->second;
  };
  if (auto* v = get("T")) config.horizon = std::stoll(*v);
  if (auto* v = get("eps")) config.eps = std::stod(*v);
  if (auto* v = get("eta")) config.eta = std::stod(*v);
  if (auto* v = get("alpha")) config.alpha = std::stod(*v);
  if (auto* v = get("noise-bound")) config.noise_bound = std::stod(*v);
  if (auto* v = get("env")) config.env = *v;
  if (auto* v = get("dim")) config.dim = std::stoul(*v);

  auto checks = bmo::trace_checks(trace, config, trace.dim, config.noise_bound);
  if (jn_samples > 0) {
    if (config.env.empty()) throw bmo::ConfigError("trace has no env provenance for --jn-samples");
    const auto env = bmo::make_environment(config);
    bmo::Rng rng(seed);
    const auto norm = bmo::bmo_norm_estimate(env, 256, 4096, rng).value;
    for (const auto& q : trace.final_cubes) {
      auto c = bmo::jn_check(env, q, jn_lambda, jn_samples, norm, rng);
      c.checker += "[" + q.to_string() + "]";
      checks.push_back(std::move(c));
    }
  }
  bmo::write_report(std::cout, checks);
  for (const auto& c : checks) {
    if (!c.passed) return 1;
  }
  return 0;
}

int cmd_fdelta(int argc, char** argv) {
  CLI::App app{"bmo fdelta: print the f^delta table for an environment"};
  std::string env_name;
  std::size_t dim = 0;
  std::vector<double> deltas{0.001, 0.01, 0.05, 0.1, 0.25, 0.5};
  app.add_option("--env", env_name, "environment name")->required();
  app.add_option("--dim", dim, "dimension (constant env only)");
  app.add_option("--delta", deltas, "delta values")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const auto env = bmo::builtin(env_name, 0.0, dim);
  std::cout << "delta,f_delta,raw_f_delta,level_at,admissible\n";
  for (double d : deltas) {
    const auto r = bmo::f_delta_report(env, d);
    std::cout << bmo::format_double(r.delta) << ',' << bmo::format_double(r.f_delta) << ','
              << bmo::format_double(r.raw_f_delta) << ',' << bmo::format_double(r.level_at) << ','
              << (r.admissible ? "yes" : "no") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return 2;
  }
  const std::string command = argv[1];
  try {
    if (command == "run") return cmd_run(std::vector<std::string>(argv + 2, argv + argc));
    if (command == "check") return cmd_check(argc - 1, argv + 1);
    if (command == "fdelta") return cmd_fdelta(argc - 1, argv + 1);
    if (command == "-h" || command == "--help") {
      std::cout << kUsage;
      return 0;
    }
    std::cerr << "unknown command '" << command << "'\n" << kUsage;
    return 2;
  } catch (const bmo::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
