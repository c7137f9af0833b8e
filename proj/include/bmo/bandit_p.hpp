#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bmo/cube_stats.hpp"
#include "bmo/envs.hpp"
#include "bmo/trace.hpp"

namespace bmo {

/// Run parameters shared by both algorithms. `horizon` counts steps for the
/// partition algorithm and episodes for the zooming algorithm.
struct AlgoConfig {
  std::int64_t horizon = 10000;
  double eps = 0.01;
  double eta = 0.001;
  double alpha = 1.0;  // zooming only

  /// Index parameters for an environment with noise bound D_E and dimension d.
  IndexParams index_params(double noise_bound, std::size_t dim) const;
};

/// Strict dyadic partition Q_t with UCB selection and the refinement rule
/// H_t(q) >= J(q).
class PartitionState {
 public:
  explicit PartitionState(IndexParams params);

  const CubeTree& tree() const { return tree_; }
  const IndexParams& params() const { return params_; }
  std::int64_t step_count() const { return step_; }

  /// Leaf node indices, i.e. the current partition.
  std::vector<std::size_t> leaves() const { return tree_.leaves(); }
  std::vector<DyadicCube> partition() const;

  /// Node index of the leaf with the largest index; ties go to the smaller
  /// cube in DyadicCube order (shallower, then lexicographic).
  std::size_t select_node() const;
  DyadicCube select_cube() const { return tree_.node(select_node()).cube; }

  /// Splits violating leaves (and their new children) until every leaf
  /// satisfies H_t(q) >= J(q). Returns the number of splits.
  std::size_t refine();

  /// Select, play uniformly in the selected cube, record, refine.
  TraceRow step(const Environment& env, Rng& rng);

  /// Test hook: records an externally chosen sample without playing.
  void record(const Point& a, double y) { tree_.record_sample(a, y); }

 private:
  IndexParams params_;
  CubeTree tree_;
  std::int64_t step_ = 0;
};

using PartitionObserver = std::function<void(const PartitionState&, const TraceRow&)>;

/// Runs the partition algorithm for config.horizon steps; horizon 0 yields an
/// empty trace.
RunTrace run_partition(const AlgoConfig& config, const Environment& env, std::uint64_t seed,
                       const PartitionObserver& observer = {});

}  // namespace bmo
