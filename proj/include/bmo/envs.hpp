#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bmo/dyadic.hpp"

namespace bmo {

/// Axis-aligned box prod_i [lo_i, hi_i) inside [0,1)^d.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box of(const DyadicCube& q);
  std::size_t dim() const { return lo.size(); }
  double measure() const;
  Point sample_uniform(Rng& rng) const;
};

/// Integral mean with a standard-error estimate (zero when exact).
struct CubeMean {
  double value = 0.0;
  double std_error = 0.0;
};

/// A reward environment. The algorithms observe f = raw_f - mean_shift plus
/// bounded noise; mean_shift is chosen so that f integrates to zero over
/// [0,1)^d. All analytic helpers are stated for raw_f.
struct EnvironmentSpec {
  std::string name;
  std::size_t dim = 1;
  /// May return +inf on a null set (singular points).
  std::function<double(const Point&)> raw_f;
  double mean_shift = 0.0;
  double noise_bound = 0.0;
  std::string noise_kind = "uniform";
  std::function<double(const Box&)> raw_box_mean;         // optional exact mean
  std::function<double(double)> raw_level_measure;        // optional exact mu({raw_f > z})
  std::optional<double> raw_finite_max;                   // sup raw_f when finite
};

/// Immutable, thread-shareable environment built from an EnvironmentSpec.
/// When no exact level-set measure is supplied, a sorted table of raw_f over
/// a midpoint grid (d <= 2) or a Halton set is built once at construction.
class Environment {
 public:
  explicit Environment(EnvironmentSpec spec, std::size_t level_budget = 1'000'000);

  const EnvironmentSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  std::size_t dim() const { return spec_.dim; }
  double noise_bound() const { return spec_.noise_bound; }
  double mean_shift() const { return spec_.mean_shift; }

  /// f(a) = raw_f(a) - mean_shift.
  double f(const Point& a) const;
  bool singular_at(const Point& a) const;

  /// Uniform arm in q, redrawn within q when it hits a singular point.
  Point draw_arm(const DyadicCube& q, Rng& rng) const;

  /// y = f(a) + E with E ~ Uniform[-D_E, D_E]. Consumes exactly one draw.
  double observe(const Point& a, Rng& rng) const;
  double noise(Rng& rng) const;

  /// <f>_q: exact when an analytic mean exists, otherwise randomized Halton
  /// quadrature over `budget` points. Throws std::invalid_argument for
  /// budget 0.
  CubeMean cube_mean(const DyadicCube& q, std::size_t budget = 1 << 16) const;
  CubeMean box_mean(const Box& box, std::size_t budget = 1 << 16) const;
  bool has_analytic_mean() const { return static_cast<bool>(spec_.raw_box_mean); }

  /// G(z) = mu({a : f(a) > z}); nonincreasing in z.
  double level_set_measure(double z) const;
  /// Granularity of the tabulated G (0 when G is exact).
  double level_set_resolution() const;

  std::optional<double> finite_max() const;

  /// Same environment with f replaced by f + c (breaks mean-zero on purpose).
  Environment shifted(double c) const;
  Environment with_noise(double noise_bound) const;

 private:
  EnvironmentSpec spec_;
  std::shared_ptr<const std::vector<double>> level_table_;  // sorted raw_f values
};

/// Built-in environments: log1d, log2x, himmelblau, styblinski, constant.
/// `dim` only applies to constant. Throws std::invalid_argument for an
/// unknown name.
Environment builtin(const std::string& name, double noise_bound = 0.1, std::size_t dim = 0);
std::vector<std::string> builtin_names();

/// Radical-inverse Halton point with the first `dim` primes as bases.
std::vector<double> halton(std::size_t index, std::size_t dim);

}  // namespace bmo
