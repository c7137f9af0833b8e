#include "bmo/cube_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bmo {

double compute_psi(double eta, double horizon, double eps) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0,1)");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
  if (!(horizon >= 1.0)) throw std::invalid_argument("horizon T must be >= 1");
  return 2.0 * std::log2(1.0 / eta) + std::log(2.0 * horizon * horizon / eps);
}

IndexParams IndexParams::make(double horizon, double eps, double eta, double noise_bound,
                              std::size_t dim) {
  IndexParams p;
  p.horizon = horizon;
  p.eps = eps;
  p.eta = eta;
  p.noise_bound = noise_bound;
  p.dim = dim;
  p.psi = compute_psi(eta, horizon, eps);
  p.validate();
  return p;
}

double IndexParams::full_radius() const {
  return hoeffding_radius(1, psi + noise_bound, horizon, eps);
}

void IndexParams::validate() const {
  if (dim == 0) throw std::invalid_argument("dimension must be >= 1");
  if (!(noise_bound >= 0.0)) throw std::invalid_argument("noise bound D_E must be >= 0");
  compute_psi(eta, horizon, eps);  // domain checks on eta, eps and T
  const double floor_eta = 2.0 * std::log2(1.0 / eta);
  const double floor_conf = std::log(2.0 * horizon * horizon / eps);
  if (psi < floor_eta || psi < floor_conf) {
    throw std::invalid_argument("psi = " + std::to_string(psi) +
                                " is below max(2 log2(1/eta), ln(2T^2/eps))");
  }
}

double hoeffding_radius(std::int64_t count, double scale, double horizon, double eps) {
  const double n = static_cast<double>(std::max<std::int64_t>(1, count));
  return scale * std::sqrt(2.0 * std::log(2.0 * horizon * horizon / eps)) / std::sqrt(n);
}

double jn_bonus(double measure, double eta) { return std::max(0.0, std::log(measure / eta)); }

std::int64_t effective_count(const CubeNode& node) {
  return std::max<std::int64_t>(1, node.count);
}

double cube_average(const CubeNode& node) {
  return node.count > 0 ? node.reward_sum / static_cast<double>(node.count) : 0.0;
}

double hoeffding_radius(const CubeNode& node, const IndexParams& params) {
  return hoeffding_radius(node.count, params.psi + params.noise_bound, params.horizon,
                          params.eps);
}

double jn_bonus(const DyadicCube& q, const IndexParams& params) {
  return jn_bonus(q.measure(), params.eta);
}

double ucb_index(const CubeNode& node, const IndexParams& params) {
  return cube_average(node) + hoeffding_radius(node, params) + jn_bonus(node.cube, params);
}

CubeTree::CubeTree(std::size_t dim) : dim_(dim) {
  nodes_.push_back(CubeNode{DyadicCube::root(dim)});
}

std::size_t CubeTree::record_sample(const Point& a, double y) {
  if (a.dim() != dim_) throw std::invalid_argument("arm dimension does not match the tree");
  if (!nodes_.front().cube.contains(a)) throw std::invalid_argument("arm outside [0,1)^d");
  const std::size_t ref = arms_.size();
  arms_.push_back(a);
  rewards_.push_back(y);
  std::size_t i = 0;
  while (true) {
    CubeNode& n = nodes_[i];
    n.count += 1;
    n.reward_sum += y;
    n.point_refs.push_back(ref);
    if (n.is_leaf()) return i;
    i = static_cast<std::size_t>(n.first_child) + n.cube.child_index_of(a);
  }
}

void CubeTree::split_node(std::size_t index) {
  if (!nodes_.at(index).is_leaf()) {
    throw std::logic_error("cube " + nodes_[index].cube.to_string() + " is already split");
  }
  const std::size_t m = doubling_constant(dim_);
  const std::size_t first = nodes_.size();
  // Copy before growing nodes_, which may reallocate.
  const DyadicCube cube = nodes_[index].cube;
  const std::vector<std::size_t> refs = nodes_[index].point_refs;
  for (std::size_t j = 0; j < m; ++j) {
    CubeNode c{cube.subcube(j)};
    c.parent = static_cast<std::int64_t>(index);
    nodes_.push_back(std::move(c));
  }
  for (std::size_t ref : refs) {
    CubeNode& c = nodes_[first + cube.child_index_of(arms_[ref])];
    c.count += 1;
    c.reward_sum += rewards_[ref];
    c.point_refs.push_back(ref);
  }
  nodes_[index].first_child = static_cast<std::int64_t>(first);
}

std::size_t CubeTree::child(std::size_t index, std::size_t j) const {
  const auto& n = nodes_.at(index);
  if (n.is_leaf()) throw std::logic_error("leaf has no children");
  return static_cast<std::size_t>(n.first_child) + j;
}

std::vector<std::size_t> CubeTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf()) out.push_back(i);
  }
  return out;
}

std::size_t CubeTree::locate(const Point& a) const {
  if (!nodes_.front().cube.contains(a)) throw std::invalid_argument("arm outside [0,1)^d");
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    i = static_cast<std::size_t>(nodes_[i].first_child) + nodes_[i].cube.child_index_of(a);
  }
  return i;
}

}  // namespace bmo
