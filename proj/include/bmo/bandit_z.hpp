#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bmo/bandit_p.hpp"

namespace bmo {

/// Largest admissible zooming rate (Psi + D_E) sqrt(2 ln(2T^2/eps)) / ln(M_d/eta).
double max_zooming_rate(const IndexParams& params);

/// Number of uniform warm-up arms: the unique n >= 1 with
/// C/sqrt(n) >= alpha ln(M_d/eta) > C/sqrt(n+1). Throws std::invalid_argument
/// when alpha lies outside (0, max_zooming_rate].
std::int64_t warmup_count(const IndexParams& params, double alpha);

/// Role flags of one cube in the zooming collection. A terminal root is
/// also a parent.
struct CubeRoles {
  bool terminal = false;
  bool pre_parent = false;
  bool parent = false;
  bool other() const { return !terminal && !pre_parent && !parent; }
};

struct Classification {
  std::vector<CubeRoles> roles;     // indexed by tree node
  std::vector<std::size_t> parents;  // node indices, in node order
};

/// Cube collection with the zooming rule
/// H_t(Q) >= alpha ln(M_d mu(Q) / eta) on terminal cubes.
class CubeCollection {
 public:
  CubeCollection(IndexParams params, double alpha);

  const CubeTree& tree() const { return tree_; }
  const IndexParams& params() const { return params_; }
  double alpha() const { return alpha_; }
  std::int64_t episode() const { return episode_; }

  /// Right-hand side of the zooming rule for a cube of measure mu.
  double zoom_threshold(double measure) const;
  bool satisfies_zoom_rule(std::size_t node) const;

  /// Roles per the terminal / pre-parent / parent definitions. Throws
  /// std::logic_error when the parents do not partition [0,1)^d.
  Classification classify() const;

  /// Splits terminal cubes violating the zooming rule until none does.
  std::size_t zoom_refine();

  /// Parent node with the largest UCB index; DyadicCube order breaks ties.
  std::size_t select_parent(const Classification& roles) const;

  /// n uniform arms over [0,1)^d recorded into the tree as rows of kind
  /// warmup.
  std::vector<TraceRow> warm_up(std::int64_t n, const Environment& env, Rng& rng);

  /// One episode: select a parent, play one uniform arm in each of its M_d
  /// direct sub-cubes, record, refine. Returns the M_d rows.
  std::vector<TraceRow> play_episode(const Environment& env, Rng& rng);

  void record(const Point& a, double y) { tree_.record_sample(a, y); }

 private:
  void stamp(TraceRow& row) const;

  IndexParams params_;
  double alpha_;
  CubeTree tree_;
  std::int64_t episode_ = 0;
};

using ZoomingObserver =
    std::function<void(const CubeCollection&, const std::vector<TraceRow>& episode_rows)>;

/// Zooming algorithm: warm-up, then config.horizon episodes. The observer runs
/// after every episode (not after warm-up).
RunTrace run_zooming(const AlgoConfig& config, const Environment& env, std::uint64_t seed,
                     const ZoomingObserver& observer = {});

}  // namespace bmo
