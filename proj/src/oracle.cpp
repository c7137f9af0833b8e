#include "bmo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "bmo/errors.hpp"

namespace bmo {

AdmissibilityReport f_delta_report(const Environment& env, double delta, double z_tol,
                                   double level_tol) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
  const auto G = [&](double z) { return env.level_set_measure(z); };

  // Grow both ends geometrically: G(lo) > delta >= G(hi).
  double lo = -1.0, hi = 1.0, step = 1.0;
  int guard = 0;
  while (G(lo) <= delta) {
    lo -= step;
    step *= 2.0;
    if (++guard > 200) throw QuadratureBudgetExceeded("no lower bracket for f^delta");
  }
  step = 1.0;
  guard = 0;
  while (G(hi) > delta) {
    hi += step;
    step *= 2.0;
    if (++guard > 200) throw QuadratureBudgetExceeded("no upper bracket for f^delta");
  }
  for (int it = 0; it < 400 && hi - lo > z_tol * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (G(mid) > delta) lo = mid; else hi = mid;
  }

  AdmissibilityReport r;
  r.delta = delta;
  r.f_delta = hi;
  r.raw_f_delta = hi + env.mean_shift();
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.level_at = G(hi);
  const double tol = std::max(level_tol, 2.0 * env.level_set_resolution());
  r.admissible = std::abs(r.level_at - delta) <= tol;
  return r;
}

AdmissibilityReport f_delta(const Environment& env, double delta, double z_tol, double level_tol) {
  auto r = f_delta_report(env, delta, z_tol, level_tol);
  if (!r.admissible) {
    throw NonAdmissibleDelta("delta = " + format_double(delta) + " is not admissible for " +
                             env.name() + ": G jumps from above delta to " +
                             format_double(r.level_at) + " at z = " + format_double(r.f_delta));
  }
  return r;
}

StepRegret step_regret(const Environment& env, const AdmissibilityReport& report,
                       const DyadicCube& cube) {
  if (!report.admissible) throw NonAdmissibleDelta("step_regret needs an admissible delta");
  const double gap = report.f_delta - env.cube_mean(cube).value;
  return {std::max(0.0, gap), gap};
}

StepRegret episode_regret(const Environment& env, const AdmissibilityReport& report,
                          const DyadicCube& parent) {
  const auto s = step_regret(env, report, parent);
  const double m = static_cast<double>(doubling_constant(parent.dim()));
  return {m * s.regret, m * s.gap};
}

RegretLedger build_ledger(const RunTrace& trace, const Environment& env,
                          const AdmissibilityReport& report) {
  if (!report.admissible) throw NonAdmissibleDelta("ledger needs an admissible delta");
  RegretLedger ledger;
  ledger.delta = report.delta;
  ledger.f_delta = report.f_delta;
  ledger.rows.reserve(trace.rows.size());
  std::unordered_map<DyadicCube, double, DyadicCubeHash> means;
  const auto sup = env.finite_max();
  double cum = 0.0, cum_gap = 0.0, cum_trad = 0.0;
  std::int64_t pull = 0;
  for (const auto& r : trace.rows) {
    auto it = means.find(r.cube);
    if (it == means.end()) it = means.emplace(r.cube, env.cube_mean(r.cube).value).first;
    LedgerRow row;
    row.t = r.t;
    row.pull = ++pull;
    row.cube_mean = it->second;
    row.gap = report.f_delta - row.cube_mean;
    row.regret = std::max(0.0, row.gap);
    cum += row.regret;
    cum_gap += row.gap;
    row.cum_regret = cum;
    row.cum_gap = cum_gap;
    if (sup) {
      row.traditional = *sup - row.cube_mean;
      cum_trad += row.traditional;
      row.cum_traditional = cum_trad;
    }
    row.n_cubes = r.n_cubes;
    row.min_cube_measure = r.min_cube_measure;
    ledger.rows.push_back(row);
  }
  return ledger;
}

// ---------------------------------------------------------------------------
// Checkers

CheckResult jn_check(const Environment& env, const DyadicCube& q, double lambda,
                     std::size_t n_samples, double norm_bound, Rng& rng) {
  if (n_samples == 0) throw std::invalid_argument("jn_check needs at least one sample");
  const double mean = env.cube_mean(q).value;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double v = env.f(q.sample_uniform(rng));
    if (!(std::abs(v - mean) <= lambda)) ++hits;
  }
  const double mu = q.measure();
  const double n = static_cast<double>(n_samples);
  const double c1 = std::numbers::e;
  const double c2 = std::numbers::e * static_cast<double>(doubling_constant(q.dim()));
  CheckResult r;
  r.checker = "john_nirenberg";
  r.estimate = mu * static_cast<double>(hits) / n;
  r.bound = norm_bound > 0.0 ? c1 * mu * std::exp(-lambda / (c2 * norm_bound)) : 0.0;
  const double p = std::clamp(r.bound / mu, 0.0, 1.0);
  r.margin = 3.0 * mu * std::sqrt(p * (1.0 - p) / n);
  r.passed = r.estimate <= r.bound + r.margin;
  r.detail = "lambda=" + format_double(lambda) + " norm=" + format_double(norm_bound);
  return r;
}

double mean_oscillation(const Environment& env, const Box& box, std::size_t n_samples, Rng& rng) {
  std::vector<double> v;
  v.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double x = env.f(box.sample_uniform(rng));
    if (std::isfinite(x)) v.push_back(x);
  }
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double osc = 0.0;
  for (double x : v) osc += std::abs(x - mean);
  return osc / static_cast<double>(v.size());
}

BmoNormEstimate bmo_norm_estimate(const Environment& env, std::size_t n_rects,
                                  std::size_t n_samples, Rng& rng) {
  BmoNormEstimate out;
  out.running_max.reserve(n_rects);
  const double log_min_edge = std::log(1e-6);
  for (std::size_t k = 0; k < n_rects; ++k) {
    Box box;
    for (std::size_t i = 0; i < env.dim(); ++i) {
      const double edge = std::exp(log_min_edge * uniform01(rng));
      const double start = (1.0 - edge) * uniform01(rng);
      box.lo.push_back(start);
      box.hi.push_back(std::min(1.0, start + edge));
    }
    out.value = std::max(out.value, mean_oscillation(env, box, n_samples, rng));
    out.running_max.push_back(out.value);
  }
  return out;
}

CheckResult point_scattering_check(const RunTrace& trace) {
  if (trace.algo != "p") throw MalformedTrace("point scattering needs a partition (p) trace");
  if (trace.final_cubes.empty() && !trace.rows.empty()) {
    throw MalformedTrace("trace has no final partition");
  }
  if (!trace.final_cubes.empty() && !check_partition(trace.final_cubes).ok()) {
    throw MalformedTrace("final cubes do not partition [0,1)^d");
  }
  std::unordered_set<DyadicCube, DyadicCubeHash> finals(trace.final_cubes.begin(),
                                                       trace.final_cubes.end());
  // A partition that only gets finer never selects a strict ancestor of an
  // earlier selection, and every selection is a union of final cubes.
  std::unordered_set<DyadicCube, DyadicCubeHash> retired;
  int max_depth = 0;
  for (const auto& r : trace.rows) {
    if (r.kind != RowKind::play) throw MalformedTrace("point scattering trace has warm-up rows");
    if (retired.count(r.cube)) {
      throw MalformedTrace("step " + std::to_string(r.t) + " selects " + r.cube.to_string() +
                           ", coarser than an earlier selection");
    }
    if (!r.cube.contains(r.arm)) {
      throw MalformedTrace("step " + std::to_string(r.t) + " arm lies outside its cube");
    }
    for (int k = r.cube.depth() - 1; k >= 0; --k) {
      const auto a = r.cube.ancestor_at(k);
      if (finals.count(a)) {
        throw MalformedTrace("final cube " + a.to_string() + " is coarser than selection " +
                             r.cube.to_string());
      }
      retired.insert(a);
    }
    max_depth = std::max(max_depth, r.cube.depth());
  }

  std::unordered_map<DyadicCube, std::int64_t, DyadicCubeHash> counts;
  double lhs = 0.0;
  for (const auto& r : trace.rows) {
    auto it = counts.find(r.cube);
    const std::int64_t n = it == counts.end() ? 0 : it->second;
    lhs += 1.0 / static_cast<double>(std::max<std::int64_t>(1, n));
    // Credit the arm to every dyadic cube containing it up to max_depth.
    std::vector<std::uint64_t> m(r.arm.dim());
    for (int k = 0; k <= max_depth; ++k) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = static_cast<std::uint64_t>(std::ldexp(r.arm[i], k));
      }
      counts[DyadicCube(k, m)] += 1;
    }
  }
  CheckResult res;
  res.checker = "point_scattering";
  res.estimate = lhs;
  const double q = static_cast<double>(std::max<std::size_t>(1, trace.final_cubes.size()));
  const double t = static_cast<double>(trace.rows.size());
  const double e = std::numbers::e;
  res.bound = e * q * std::log(1.0 + (e - 1.0) * t / q);
  res.passed = res.estimate <= res.bound;
  res.detail = "T=" + std::to_string(trace.rows.size()) +
               " |Q_T|=" + std::to_string(trace.final_cubes.size());
  return res;
}

CheckResult nested_mean_drift_check(const Environment& env, std::span<const DyadicCube> chain,
                                    double k_ratio, double norm_bound) {
  if (chain.empty()) throw std::invalid_argument("nested chain is empty");
  if (!(k_ratio >= 1.0)) throw std::invalid_argument("K must be >= 1");
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (!chain[i + 1].contains(chain[i])) {
      throw std::invalid_argument("chain is not nested at position " + std::to_string(i));
    }
    if (chain[i + 1].measure() > k_ratio * chain[i].measure()) {
      throw std::invalid_argument("measure ratio exceeds K at position " + std::to_string(i));
    }
  }
  const auto first = env.cube_mean(chain.front());
  const auto last = env.cube_mean(chain.back());
  const double k = static_cast<double>(chain.size() - 1);
  CheckResult r;
  r.checker = "nested_mean_drift";
  r.estimate = std::abs(first.value - last.value);
  r.bound = k_ratio * k * norm_bound;
  r.margin = 3.0 * (first.std_error + last.std_error);
  r.passed = r.estimate <= r.bound + r.margin;
  r.detail = "k=" + std::to_string(chain.size() - 1);
  return r;
}

double playcount_bound(const IndexParams& params, double alpha, double measure) {
  const double c = params.full_radius();
  const double ratio = c / (alpha * std::log(measure / params.eta));
  return std::ceil(ratio * ratio) + 1.0;
}

CheckResult playcount_check(const RunTrace& trace, const IndexParams& params, double alpha) {
  if (trace.algo != "z") throw MalformedTrace("play-count check needs a zooming (z) trace");
  std::unordered_map<DyadicCube, std::int64_t, DyadicCubeHash> episodes;
  std::int64_t last_t = 0;
  for (const auto& r : trace.rows) {
    if (r.kind != RowKind::play) continue;
    if (r.t < last_t) throw MalformedTrace("episode indices decrease");
    if (r.t != last_t) {
      episodes[r.cube] += 1;
      last_t = r.t;
    }
  }
  CheckResult res;
  res.checker = "play_count";
  res.passed = true;
  double worst = -std::numeric_limits<double>::infinity();
  const double floor = static_cast<double>(params.doubling()) * params.eta;
  std::vector<std::pair<DyadicCube, std::int64_t>> sorted(episodes.begin(), episodes.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [cube, count] : sorted) {
    if (!(cube.measure() > floor)) continue;
    const double bound = playcount_bound(params, alpha, cube.measure());
    const double slack = static_cast<double>(count) - bound;
    if (slack > worst) {
      worst = slack;
      res.estimate = static_cast<double>(count);
      res.bound = bound;
      res.detail = "tightest parent " + cube.to_string();
    }
    if (static_cast<double>(count) > bound) res.passed = false;
  }
  return res;
}

CheckResult cube_bounds_check(const RunTrace& trace, double min_measure, double max_cubes) {
  CheckResult r;
  r.checker = "cube_bounds";
  r.estimate = 1.0;
  r.bound = min_measure;
  std::size_t most = 0;
  for (const auto& row : trace.rows) {
    r.estimate = std::min(r.estimate, row.min_cube_measure);
    most = std::max(most, row.n_cubes);
  }
  r.passed = r.estimate >= min_measure &&
             (max_cubes <= 0.0 || static_cast<double>(most) <= max_cubes);
  r.detail = "max_cubes=" + std::to_string(most);
  return r;
}

}  // namespace bmo
