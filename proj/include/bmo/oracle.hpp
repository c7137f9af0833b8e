#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bmo/cube_stats.hpp"
#include "bmo/envs.hpp"
#include "bmo/trace.hpp"

namespace bmo {

/// Outcome of the f^delta search.
struct AdmissibilityReport {
  double delta = 0.0;
  /// inf { z : mu({f > z}) = delta } for the mean-zero f seen by the algorithms.
  double f_delta = 0.0;
  /// Same threshold on the unshifted raw_f (f_delta + mean_shift).
  double raw_f_delta = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// G at the returned threshold.
  double level_at = 0.0;
  bool admissible = false;
};

/// Bisection on G(z) = mu({f > z}) for the smallest z with G(z) <= delta.
/// delta is admissible when |G(z) - delta| <= max(level_tol, 2 * table
/// resolution). Never throws for a non-admissible delta; throws
/// QuadratureBudgetExceeded when no bracket is found and
/// std::invalid_argument unless delta in (0,1).
AdmissibilityReport f_delta_report(const Environment& env, double delta, double z_tol = 1e-10,
                                   double level_tol = 1e-4);
/// As f_delta_report, but throws NonAdmissibleDelta when delta is not
/// admissible.
AdmissibilityReport f_delta(const Environment& env, double delta, double z_tol = 1e-10,
                            double level_tol = 1e-4);

struct StepRegret {
  double regret = 0.0;  // max(0, gap)
  double gap = 0.0;     // f^delta - <f>_q
};

StepRegret step_regret(const Environment& env, const AdmissibilityReport& report,
                       const DyadicCube& cube);
/// M_d times the clamped and unclamped gaps of the selected parent.
StepRegret episode_regret(const Environment& env, const AdmissibilityReport& report,
                          const DyadicCube& parent);

/// One ledger row per arm pull.
struct LedgerRow {
  std::int64_t t = 0;     // step, or episode (0 during warm-up)
  std::int64_t pull = 0;  // 1-based arm-pull index
  double cube_mean = 0.0;
  double regret = 0.0;
  double gap = 0.0;
  double traditional = std::numeric_limits<double>::quiet_NaN();
  double cum_regret = 0.0;
  double cum_gap = 0.0;
  double cum_traditional = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_cubes = 0;
  double min_cube_measure = 1.0;
};

/// Per-pull delta-regret against <f> of the row's cube. Zooming rows carry
/// the selected parent, so an episode's M_d rows sum to episode_regret.
struct RegretLedger {
  double delta = 0.0;
  double f_delta = 0.0;
  std::vector<LedgerRow> rows;

  double final_regret() const { return rows.empty() ? 0.0 : rows.back().cum_regret; }
};

RegretLedger build_ledger(const RunTrace& trace, const Environment& env,
                          const AdmissibilityReport& report);

/// Checker output; statistical checks carry a margin so sampling noise is
/// distinguishable from a logical violation.
struct CheckResult {
  std::string checker;
  bool passed = false;
  double estimate = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  std::string detail;
};

/// Monte-Carlo estimate of mu({x in q : |f - <f>_q| > lambda}) against
/// e mu(q) exp(-lambda / (e 2^d norm_bound)) with a 3-sigma binomial margin.
CheckResult jn_check(const Environment& env, const DyadicCube& q, double lambda,
                     std::size_t n_samples, double norm_bound, Rng& rng);

struct BmoNormEstimate {
  double value = 0.0;
  std::vector<double> running_max;  // one entry per rectangle
};

/// Max over random axis-aligned rectangles (log-uniform edge lengths) of the
/// sampled mean oscillation; a lower estimate of the BMO norm.
BmoNormEstimate bmo_norm_estimate(const Environment& env, std::size_t n_rects,
                                  std::size_t n_samples, Rng& rng);

/// Monte-Carlo mean oscillation (1/mu) int_box |f - <f>_box| over one box.
double mean_oscillation(const Environment& env, const Box& box, std::size_t n_samples, Rng& rng);

/// sum_t 1/max(1, n_t(Q_t)) <= e |Q_T| ln(1 + (e - 1) T / |Q_T|) on a
/// partition-algorithm trace. Counts are recomputed from the trace's arms.
/// Throws MalformedTrace when the selected cubes are not consistent with
/// nested refinement or the final cubes are not a partition.
CheckResult point_scattering_check(const RunTrace& trace);

/// |<f>_{q_0} - <f>_{q_k}| <= K k norm_bound on a nested chain
/// q_0 within ... within q_k with mu(q_{i+1}) <= K mu(q_i). Throws
/// std::invalid_argument for a chain that is not nested or too coarse.
CheckResult nested_mean_drift_check(const Environment& env, std::span<const DyadicCube> chain,
                                    double k_ratio, double norm_bound);

/// Upper bound on the episodes in which a parent of measure mu is selected:
/// ceil((C / (alpha ln(mu/eta)))^2) + 1 with C the full radius.
double playcount_bound(const IndexParams& params, double alpha, double measure);

/// Every parent of measure > M_d eta in a zooming trace respects
/// playcount_bound. Throws MalformedTrace for a non-zooming trace.
CheckResult playcount_check(const RunTrace& trace, const IndexParams& params, double alpha);

/// Smallest recorded cube measure >= floor and (when max_cubes > 0) the
/// recorded cube count never exceeds max_cubes.
CheckResult cube_bounds_check(const RunTrace& trace, double min_measure, double max_cubes);

}  // namespace bmo
