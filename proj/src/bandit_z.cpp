#include "bmo/bandit_z.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bmo {

double max_zooming_rate(const IndexParams& params) {
  return params.full_radius() / std::log(static_cast<double>(params.doubling()) / params.eta);
}

std::int64_t warmup_count(const IndexParams& params, double alpha) {
  const double limit = max_zooming_rate(params);
  // One ulp of slack so the admissible endpoint itself is accepted.
  if (!(alpha > 0.0) || alpha > limit * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "zooming rate alpha = " + std::to_string(alpha) +
        " outside (0, (Psi + D_E) sqrt(2 ln(2T^2/eps)) / ln(M_d/eta)] = (0, " +
        std::to_string(limit) + "]");
  }
  const double c = params.full_radius();
  const double rhs = alpha * std::log(static_cast<double>(params.doubling()) / params.eta);
  const double ratio = c / rhs;
  auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(ratio * ratio)));
  // Settle rounding at the boundary directly on the defining inequalities.
  while (n > 1 && c / std::sqrt(static_cast<double>(n)) < rhs) --n;
  while (c / std::sqrt(static_cast<double>(n + 1)) >= rhs) ++n;
  return n;
}

CubeCollection::CubeCollection(IndexParams params, double alpha)
    : params_(params), alpha_(alpha), tree_(params.dim) {
  params_.validate();
  warmup_count(params_, alpha_);  // range check
}

double CubeCollection::zoom_threshold(double measure) const {
  return alpha_ * std::log(static_cast<double>(params_.doubling()) * measure / params_.eta);
}

bool CubeCollection::satisfies_zoom_rule(std::size_t node) const {
  const auto& n = tree_.node(node);
  return hoeffding_radius(n, params_) >= zoom_threshold(n.cube.measure());
}

Classification CubeCollection::classify() const {
  Classification out;
  const auto nodes = tree_.nodes();
  out.roles.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) {
      out.roles[i].terminal = true;
      if (nodes[i].parent >= 0) out.roles[static_cast<std::size_t>(nodes[i].parent)].pre_parent = true;
    }
  }
  // Children are created after their parent, so node order visits ancestors
  // first and one pass propagates "has a pre-parent ancestor".
  std::vector<char> covered(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto p = nodes[i].parent;
    const bool ancestor_pre = p >= 0 && (covered[static_cast<std::size_t>(p)] != 0);
    if (out.roles[i].pre_parent && !ancestor_pre) out.roles[i].parent = true;
    covered[i] = (ancestor_pre || out.roles[i].pre_parent) ? 1 : 0;
  }
  if (nodes.size() == 1) out.roles[0].parent = true;
  std::vector<DyadicCube> cubes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (out.roles[i].parent) {
      out.parents.push_back(i);
      cubes.push_back(nodes[i].cube);
    }
  }
  if (!check_partition(cubes).ok()) {
    throw std::logic_error("parent cubes do not partition the arm space");
  }
  return out;
}

std::size_t CubeCollection::zoom_refine() {
  std::vector<std::size_t> work = tree_.leaves();
  std::size_t splits = 0;
  while (!work.empty()) {
    const std::size_t i = work.back();
    work.pop_back();
    if (satisfies_zoom_rule(i)) continue;
    tree_.split_node(i);
    ++splits;
    const auto first = static_cast<std::size_t>(tree_.node(i).first_child);
    for (std::size_t j = 0; j < params_.doubling(); ++j) work.push_back(first + j);
  }
  return splits;
}

std::size_t CubeCollection::select_parent(const Classification& roles) const {
  if (roles.parents.empty()) throw std::logic_error("collection has no parent cube");
  std::size_t best = roles.parents.front();
  double best_index = ucb_index(tree_.node(best), params_);
  for (std::size_t k = 1; k < roles.parents.size(); ++k) {
    const std::size_t i = roles.parents[k];
    const double u = ucb_index(tree_.node(i), params_);
    if (u > best_index || (u == best_index && tree_.node(i).cube < tree_.node(best).cube)) {
      best = i;
      best_index = u;
    }
  }
  return best;
}

void CubeCollection::stamp(TraceRow& row) const {
  row.n_cubes = tree_.size();
  row.min_cube_measure = 1.0;
  for (const auto& n : tree_.nodes()) row.min_cube_measure = std::min(row.min_cube_measure, n.cube.measure());
}

std::vector<TraceRow> CubeCollection::warm_up(std::int64_t n, const Environment& env, Rng& rng) {
  const DyadicCube root = tree_.root().cube;
  std::vector<TraceRow> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    TraceRow row;
    row.kind = RowKind::warmup;
    row.t = 0;
    row.cube = root;
    row.arm = env.draw_arm(root, rng);
    row.y = env.observe(row.arm, rng);
    tree_.record_sample(row.arm, row.y);
    rows.push_back(std::move(row));
  }
  zoom_refine();
  for (auto& r : rows) stamp(r);
  return rows;
}

std::vector<TraceRow> CubeCollection::play_episode(const Environment& env, Rng& rng) {
  if (env.dim() != params_.dim) throw std::invalid_argument("environment dimension mismatch");
  ++episode_;
  const auto roles = classify();
  const DyadicCube parent = tree_.node(select_parent(roles)).cube;
  std::vector<TraceRow> rows;
  // Sub-cubes need not be in the collection; arms come from their extents.
  for (std::size_t j = 0; j < params_.doubling(); ++j) {
    TraceRow row;
    row.kind = RowKind::play;
    row.t = episode_;
    row.cube = parent;
    row.arm = env.draw_arm(parent.subcube(j), rng);
    row.y = env.observe(row.arm, rng);
    tree_.record_sample(row.arm, row.y);
    rows.push_back(std::move(row));
  }
  zoom_refine();
  for (auto& r : rows) stamp(r);
  return rows;
}

RunTrace run_zooming(const AlgoConfig& config, const Environment& env, std::uint64_t seed,
                     const ZoomingObserver& observer) {
  RunTrace trace;
  trace.algo = "z";
  trace.dim = env.dim();
  CubeCollection collection(config.index_params(env.noise_bound(), env.dim()), config.alpha);
  Rng rng(seed);
  trace.rows = collection.warm_up(warmup_count(collection.params(), config.alpha), env, rng);
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    auto rows = collection.play_episode(env, rng);
    if (observer) observer(collection, rows);
    for (auto& r : rows) trace.rows.push_back(std::move(r));
  }
  for (auto i : collection.tree().leaves()) trace.final_cubes.push_back(collection.tree().node(i).cube);
  return trace;
}

}  // namespace bmo
