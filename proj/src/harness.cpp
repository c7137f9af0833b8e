#include "bmo/harness.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "bmo/bandit_z.hpp"
#include "bmo/errors.hpp"
#include "json.hpp"

namespace bmo {

namespace {

const std::vector<std::string> kAlgos = {"p", "z", "random-uniform", "grid-ucb"};

std::string join_deltas(const std::vector<double>& deltas) {
  std::string s;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (i) s += ',';
    s += format_double(deltas[i]);
  }
  return s;
}

std::string delta_tag(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", delta);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (std::find(kAlgos.begin(), kAlgos.end(), algo) == kAlgos.end()) {
    throw ConfigError("--algo: unknown algorithm '" + algo +
                      "' (expected p, z, random-uniform or grid-ucb)");
  }
  if (env.empty()) throw ConfigError("missing required option --env");
  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), env) == names.end()) {
    throw ConfigError("--env: unknown environment '" + env + "'");
  }
  if (horizon < 0) throw ConfigError("--T: horizon must be >= 0");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("--eps: must lie in (0,1)");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("--eta: must lie in (0,1)");
  if (!(noise_bound >= 0.0)) throw ConfigError("--noise-bound: must be >= 0");
  if (deltas.empty()) throw ConfigError("--delta: at least one value required");
  for (double d : deltas) {
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("--delta: " + format_double(d) + " outside (0,1)");
  }
  if (replications < 1) throw ConfigError("--replications: must be >= 1");
  if (jobs < 1) throw ConfigError("--jobs: must be >= 1");
  if (algo == "z") {
    const std::size_t d = builtin(env, noise_bound, dim).dim();
    const auto params = algo_config().index_params(noise_bound, d);
    try {
      warmup_count(params, alpha);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--alpha: ") + e.what());
    }
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::provenance() const {
  return {{"algo", algo},
          {"env", env},
          {"dim", std::to_string(dim)},
          {"T", std::to_string(horizon)},
          {"eps", format_double(eps)},
          {"eta", format_double(eta)},
          {"alpha", format_double(alpha)},
          {"delta", join_deltas(deltas)},
          {"noise-bound", format_double(noise_bound)},
          {"seed", std::to_string(seed)},
          {"replications", std::to_string(replications)}};
}

RunConfig config_from_json(const std::string& text, RunConfig base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "algo") base.algo = value.get<std::string>();
      else if (key == "env") base.env = value.get<std::string>();
      else if (key == "dim") base.dim = value.get<std::size_t>();
      else if (key == "T") base.horizon = value.get<std::int64_t>();
      else if (key == "eps") base.eps = value.get<double>();
      else if (key == "eta") base.eta = value.get<double>();
      else if (key == "alpha") base.alpha = value.get<double>();
      else if (key == "noise-bound") base.noise_bound = value.get<double>();
      else if (key == "seed") base.seed = value.get<std::uint64_t>();
      else if (key == "replications") base.replications = value.get<int>();
      else if (key == "jobs") base.jobs = value.get<int>();
      else if (key == "out-dir") base.out_dir = value.get<std::string>();
      else if (key == "delta") {
        base.deltas = value.is_array() ? value.get<std::vector<double>>()
                                       : std::vector<double>{value.get<double>()};
      } else {
        throw ConfigError("config key '" + key + "': unknown key");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
  return base;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"bmo run"};
  std::string config_path, algo, env, out_dir;
  std::size_t dim = 0;
  std::int64_t horizon = 0;
  double eps = 0, eta = 0, alpha = 0, noise = 0;
  std::vector<double> deltas;
  std::uint64_t seed = 0;
  int replications = 0, jobs = 0;
  auto* o_config = app.add_option("--config", config_path, "JSON config file (flat keys)");
  auto* o_algo = app.add_option("--algo", algo, "p | z | random-uniform | grid-ucb");
  auto* o_env = app.add_option("--env", env, "log1d | log2x | himmelblau | styblinski | constant");
  auto* o_dim = app.add_option("--dim", dim, "dimension (constant env only)");
  auto* o_t = app.add_option("--T,--horizon", horizon, "steps (p, baselines) or episodes (z)");
  auto* o_eps = app.add_option("--eps", eps, "confidence parameter");
  auto* o_eta = app.add_option("--eta", eta, "resolution parameter");
  auto* o_alpha = app.add_option("--alpha", alpha, "zooming rate (z only)");
  auto* o_delta = app.add_option("--delta", deltas, "delta values")->delimiter(',');
  auto* o_noise = app.add_option("--noise-bound", noise, "noise bound D_E");
  auto* o_seed = app.add_option("--seed", seed, "base seed; replication i uses seed + i");
  auto* o_reps = app.add_option("--replications", replications, "independent runs");
  auto* o_jobs = app.add_option("--jobs", jobs, "concurrent replications");
  auto* o_out = app.add_option("--out-dir", out_dir, "output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw ConfigError(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  RunConfig c;
  if (o_config->count()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("--config: cannot open '" + config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    c = config_from_json(ss.str(), c);
  }
  if (o_algo->count()) c.algo = algo;
  if (o_env->count()) c.env = env;
  if (o_dim->count()) c.dim = dim;
  if (o_t->count()) c.horizon = horizon;
  if (o_eps->count()) c.eps = eps;
  if (o_eta->count()) c.eta = eta;
  if (o_alpha->count()) c.alpha = alpha;
  if (o_delta->count()) c.deltas = deltas;
  if (o_noise->count()) c.noise_bound = noise;
  if (o_seed->count()) c.seed = seed;
  if (o_reps->count()) c.replications = replications;
  if (o_jobs->count()) c.jobs = jobs;
  if (o_out->count()) c.out_dir = out_dir;
  c.validate();
  return c;
}

Environment make_environment(const RunConfig& config) {
  return builtin(config.env, config.noise_bound, config.dim);
}

int surrogate_grid_depth(double eta, std::size_t dim) {
  const double k = std::log2(1.0 / eta) / static_cast<double>(dim);
  return std::clamp(static_cast<int>(std::lround(k)), 0, kMaxDepth);
}

RunTrace baseline_random(const RunConfig& config, const Environment& env, std::uint64_t seed) {
  RunTrace trace;
  trace.algo = "random-uniform";
  trace.dim = env.dim();
  const int depth = surrogate_grid_depth(config.eta, env.dim());
  const DyadicCube root = DyadicCube::root(env.dim());
  const double cell = std::ldexp(1.0, -depth * static_cast<int>(env.dim()));
  const auto cells = static_cast<std::size_t>(std::llround(1.0 / cell));
  Rng rng(seed);
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    TraceRow row;
    row.t = t;
    row.arm = env.draw_arm(root, rng);
    row.y = env.observe(row.arm, rng);
    std::vector<std::uint64_t> m(env.dim());
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = static_cast<std::uint64_t>(std::ldexp(row.arm[i], depth));
    }
    row.cube = DyadicCube(depth, std::move(m));
    row.n_cubes = cells;
    row.min_cube_measure = cell;
    trace.rows.push_back(std::move(row));
  }
  trace.final_cubes = {root};
  return trace;
}

RunTrace baseline_grid_ucb(const RunConfig& config, const Environment& env, std::uint64_t seed) {
  RunTrace trace;
  trace.algo = "grid-ucb";
  trace.dim = env.dim();
  const auto params = config.algo_config().index_params(env.noise_bound(), env.dim());
  const int depth = surrogate_grid_depth(config.eta, env.dim());
  CubeTree tree(env.dim());
  for (int k = 0; k < depth; ++k) {
    for (auto i : tree.leaves()) tree.split_node(i);
  }
  const auto leaves = tree.leaves();
  Rng rng(seed);
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    std::size_t best = leaves.front();
    double best_u = ucb_index(tree.node(best), params);
    for (auto i : leaves) {
      const double u = ucb_index(tree.node(i), params);
      if (u > best_u || (u == best_u && tree.node(i).cube < tree.node(best).cube)) {
        best = i;
        best_u = u;
      }
    }
    TraceRow row;
    row.t = t;
    row.cube = tree.node(best).cube;
    row.arm = env.draw_arm(row.cube, rng);
    row.y = env.observe(row.arm, rng);
    tree.record_sample(row.arm, row.y);
    row.n_cubes = leaves.size();
    row.min_cube_measure = row.cube.measure();
    trace.rows.push_back(std::move(row));
  }
  for (auto i : leaves) trace.final_cubes.push_back(tree.node(i).cube);
  return trace;
}

RunTrace run_single(const RunConfig& config, const Environment& env, std::uint64_t seed) {
  if (config.algo == "p") return run_partition(config.algo_config(), env, seed);
  if (config.algo == "z") return run_zooming(config.algo_config(), env, seed);
  if (config.algo == "random-uniform") return baseline_random(config, env, seed);
  if (config.algo == "grid-ucb") return baseline_grid_ucb(config, env, seed);
  throw ConfigError("--algo: unknown algorithm '" + config.algo + "'");
}

std::vector<CheckResult> trace_checks(const RunTrace& trace, const RunConfig& config,
                                      std::size_t dim, double noise_bound) {
  std::vector<CheckResult> out;
  if (trace.algo == "p") {
    out.push_back(point_scattering_check(trace));
    out.push_back(cube_bounds_check(trace, config.eta, 1.0 / config.eta));
  } else if (trace.algo == "z") {
    const auto params = config.algo_config().index_params(noise_bound, dim);
    out.push_back(playcount_check(trace, params, config.alpha));
    out.push_back(cube_bounds_check(
        trace, config.eta / static_cast<double>(doubling_constant(dim)), 0.0));
  }
  return out;
}

void write_ledger_csv(std::ostream& out, const RegretLedger& ledger) {
  out << "t,cum_delta_regret,cum_unclamped_gap,cum_traditional_regret,n_cubes,min_cube_measure,pull\n";
  for (const auto& r : ledger.rows) {
    out << r.t << ',' << format_double(r.cum_regret) << ',' << format_double(r.cum_gap) << ','
        << format_double(r.cum_traditional) << ',' << r.n_cubes << ','
        << format_double(r.min_cube_measure) << ',' << r.pull << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<const RegretLedger*>& ledgers) {
  out << "t,cum_delta_regret,cum_unclamped_gap,cum_traditional_regret,n_cubes,min_cube_measure,"
         "cum_delta_regret_sd,cum_unclamped_gap_sd,cum_traditional_regret_sd,n_cubes_sd,"
         "min_cube_measure_sd,pull\n";
  if (ledgers.empty()) return;
  const std::size_t rows = ledgers.front()->rows.size();
  for (const auto* l : ledgers) {
    if (l->rows.size() != rows) throw std::invalid_argument("ledgers differ in length");
  }
  const double n = static_cast<double>(ledgers.size());
  for (std::size_t i = 0; i < rows; ++i) {
    std::array<double, 5> mean{}, sd{};
    for (const auto* l : ledgers) {
      const auto& r = l->rows[i];
      const std::array<double, 5> v = {r.cum_regret, r.cum_gap, r.cum_traditional,
                                       static_cast<double>(r.n_cubes), r.min_cube_measure};
      for (std::size_t k = 0; k < 5; ++k) mean[k] += v[k];
    }
    for (auto& m : mean) m /= n;
    if (ledgers.size() > 1) {
      for (const auto* l : ledgers) {
        const auto& r = l->rows[i];
        const std::array<double, 5> v = {r.cum_regret, r.cum_gap, r.cum_traditional,
                                         static_cast<double>(r.n_cubes), r.min_cube_measure};
        for (std::size_t k = 0; k < 5; ++k) sd[k] += (v[k] - mean[k]) * (v[k] - mean[k]);
      }
      for (auto& s : sd) s = std::sqrt(s / (n - 1.0));
    }
    const auto& first = ledgers.front()->rows[i];
    out << first.t;
    for (double m : mean) out << ',' << format_double(m);
    for (double s : sd) out << ',' << format_double(s);
    out << ',' << first.pull << '\n';
  }
}

void write_report(std::ostream& out, const std::vector<CheckResult>& checks) {
  out << "checker,status,estimate,bound,margin\n";
  for (const auto& c : checks) {
    out << c.checker << ',' << (c.passed ? "pass" : "fail") << ',' << format_double(c.estimate)
        << ',' << format_double(c.bound) << ',' << format_double(c.margin) << '\n';
  }
}

ExperimentResult run_experiment(const RunConfig& config, bool write_files) {
  config.validate();
  const Environment env = make_environment(config);
  ExperimentResult result;
  for (double d : config.deltas) result.deltas.push_back(f_delta(env, d));

  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  if (write_files) fs::create_directories(dir);

  result.runs.resize(static_cast<std::size_t>(config.replications));
  std::atomic<int> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  const auto worker = [&] {
    for (int i = next++; i < config.replications; i = next++) {
      try {
        const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i);
        auto& rep = result.runs[static_cast<std::size_t>(i)];
        rep.trace = run_single(config, env, seed);
        for (const auto& [k, v] : config.provenance()) rep.trace.provenance[k] = v;
        rep.trace.provenance["seed"] = std::to_string(seed);
        rep.trace.provenance["replication"] = std::to_string(i);
        rep.trace.provenance["noise-bound"] = format_double(env.noise_bound());
        for (const auto& report : result.deltas) {
          rep.ledgers.push_back(build_ledger(rep.trace, env, report));
        }
        rep.checks = trace_checks(rep.trace, config, env.dim(), env.noise_bound());
        if (write_files) {
          std::ofstream out(dir / ("trace_run" + std::to_string(i) + ".csv"));
          write_trace_csv(out, rep.trace);
          for (const auto& ledger : rep.ledgers) {
            std::ofstream lo(dir / ("ledger_run" + std::to_string(i) + "_delta" +
                                    delta_tag(ledger.delta) + ".csv"));
            write_ledger_csv(lo, ledger);
          }
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int threads = std::min(config.jobs, config.replications);
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  std::vector<CheckResult> all_checks;
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const auto& rep = result.runs[i];
    for (auto c : rep.checks) {
      c.checker += "[run" + std::to_string(i) + "]";
      all_checks.push_back(std::move(c));
    }
    if ((config.algo == "p" || config.algo == "z") && !rep.trace.rows.empty()) {
      const double cubes = static_cast<double>(rep.trace.rows.back().n_cubes);
      for (const auto& d : result.deltas) {
        if (!(d.delta > cubes * config.eta)) {
          result.warnings.push_back("run " + std::to_string(i) + ": delta = " +
                                    format_double(d.delta) + " is not above |Q_T| eta = " +
                                    format_double(cubes * config.eta));
        }
      }
    }
  }
  if (write_files) {
    for (std::size_t k = 0; k < result.deltas.size(); ++k) {
      std::vector<const RegretLedger*> ledgers;
      for (const auto& rep : result.runs) ledgers.push_back(&rep.ledgers[k]);
      std::ofstream out(dir / ("aggregate_delta" + delta_tag(result.deltas[k].delta) + ".csv"));
      write_aggregate_csv(out, ledgers);
    }
    std::ofstream report(dir / "report.csv");
    write_report(report, all_checks);
    nlohmann::ordered_json j;
    for (const auto& [k, v] : config.provenance()) j[k] = v;
    std::ofstream cfg(dir / "config.json");
    cfg << j.dump(2) << '\n';
  }
  return result;
}

}  // namespace bmo
