#include "bmo/bandit_p.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace bmo {

IndexParams AlgoConfig::index_params(double noise_bound, std::size_t dim) const {
  if (horizon < 0) throw std::invalid_argument("horizon T must be >= 0");
  return IndexParams::make(static_cast<double>(std::max<std::int64_t>(1, horizon)), eps, eta,
                           noise_bound, dim);
}

PartitionState::PartitionState(IndexParams params) : params_(params), tree_(params.dim) {
  params_.validate();
  refine();
}

std::vector<DyadicCube> PartitionState::partition() const {
  std::vector<DyadicCube> out;
  for (auto i : tree_.leaves()) out.push_back(tree_.node(i).cube);
  return out;
}

std::size_t PartitionState::select_node() const {
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (std::size_t i : tree_.leaves()) {
    const auto& n = tree_.node(i);
    const double u = ucb_index(n, params_);
    if (first || u > best_index || (u == best_index && n.cube < tree_.node(best).cube)) {
      best = i;
      best_index = u;
      first = false;
    }
  }
  return best;
}

std::size_t PartitionState::refine() {
  std::vector<std::size_t> work = tree_.leaves();
  std::size_t splits = 0;
  while (!work.empty()) {
    const std::size_t i = work.back();
    work.pop_back();
    const auto& n = tree_.node(i);
    if (hoeffding_radius(n, params_) >= jn_bonus(n.cube, params_)) continue;
    tree_.split_node(i);
    ++splits;
    const std::size_t first = static_cast<std::size_t>(tree_.node(i).first_child);
    for (std::size_t j = 0; j < params_.doubling(); ++j) work.push_back(first + j);
  }
  return splits;
}

TraceRow PartitionState::step(const Environment& env, Rng& rng) {
  if (env.dim() != params_.dim) throw std::invalid_argument("environment dimension mismatch");
  ++step_;
  TraceRow row;
  row.kind = RowKind::play;
  row.t = step_;
  row.cube = select_cube();
  row.arm = env.draw_arm(row.cube, rng);
  row.y = env.observe(row.arm, rng);
  tree_.record_sample(row.arm, row.y);
  refine();
  const auto leaves = tree_.leaves();
  row.n_cubes = leaves.size();
  row.min_cube_measure = 1.0;
  for (auto i : leaves) row.min_cube_measure = std::min(row.min_cube_measure, tree_.node(i).cube.measure());
  return row;
}

RunTrace run_partition(const AlgoConfig& config, const Environment& env, std::uint64_t seed,
                       const PartitionObserver& observer) {
  RunTrace trace;
  trace.algo = "p";
  trace.dim = env.dim();
  PartitionState state(config.index_params(env.noise_bound(), env.dim()));
  Rng rng(seed);
  trace.rows.reserve(static_cast<std::size_t>(config.horizon));
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    trace.rows.push_back(state.step(env, rng));
    if (observer) observer(state, trace.rows.back());
  }
  trace.final_cubes = state.partition();
  return trace;
}

}  // namespace bmo
