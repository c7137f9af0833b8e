#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bmo/dyadic.hpp"

namespace bmo {

/// Effective bound Psi = 2 log2(1/eta) + ln(2 T^2 / eps).
/// Throws std::invalid_argument unless eta, eps in (0,1) and T >= 1.
double compute_psi(double eta, double horizon, double eps);

/// Parameters shared by the index, the partition rule and the zooming rule.
struct IndexParams {
  double horizon = 1;      // T, steps (partition) or episodes (zooming)
  double eps = 0.01;       // confidence parameter
  double eta = 0.001;      // resolution parameter
  double noise_bound = 0;  // D_E
  double psi = 0;          // effective bound
  std::size_t dim = 1;

  /// Fills psi from compute_psi and validates the result.
  static IndexParams make(double horizon, double eps, double eta, double noise_bound,
                          std::size_t dim);

  std::size_t doubling() const { return doubling_constant(dim); }
  /// (Psi + D_E) sqrt(2 ln(2T^2/eps)), the radius of an unobserved cube.
  double full_radius() const;
  /// Throws std::invalid_argument when a field is out of range or psi
  /// violates either lower bound.
  void validate() const;
};

/// Radius scale * sqrt(2 ln(2T^2/eps)) / sqrt(max(1, count)) with
/// scale = Psi + D_E.
double hoeffding_radius(std::int64_t count, double scale, double horizon, double eps);

/// Positive part of ln(mu / eta).
double jn_bonus(double measure, double eta);

/// One cube of the run's cube tree with statistics over the whole arm
/// history, including arms played before the cube was created.
struct CubeNode {
  DyadicCube cube;
  std::int64_t count = 0;
  double reward_sum = 0.0;
  /// Index of the first of M_d contiguous children, or -1 for a leaf.
  std::int64_t first_child = -1;
  std::int64_t parent = -1;
  /// Indices into CubeTree::arms() of the history arms inside `cube`.
  std::vector<std::size_t> point_refs;

  bool is_leaf() const { return first_child < 0; }
};

std::int64_t effective_count(const CubeNode& node);
double cube_average(const CubeNode& node);
double hoeffding_radius(const CubeNode& node, const IndexParams& params);
double jn_bonus(const DyadicCube& q, const IndexParams& params);
/// U = m + H + J.
double ucb_index(const CubeNode& node, const IndexParams& params);

/// Dyadic refinement tree holding the arm history. Node 0 is [0,1)^d and
/// every internal node has exactly M_d children, stored contiguously in
/// direct_subcubes() order.
class CubeTree {
 public:
  explicit CubeTree(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return nodes_.size(); }
  const CubeNode& node(std::size_t i) const { return nodes_.at(i); }
  std::span<const CubeNode> nodes() const { return nodes_; }
  const CubeNode& root() const { return nodes_.front(); }

  std::span<const Point> arms() const { return arms_; }
  std::span<const double> rewards() const { return rewards_; }

  /// Appends (a, y) to the history and updates every node on the single
  /// root-to-leaf path containing a. Returns the deepest node touched.
  std::size_t record_sample(const Point& a, double y);

  /// Creates the M_d children of a leaf, rebuilding their statistics by
  /// filtering the leaf's point_refs in history order. Throws
  /// std::logic_error when the node already has children.
  void split_node(std::size_t index);

  std::size_t child(std::size_t index, std::size_t j) const;
  /// Indices of all childless nodes, in node order.
  std::vector<std::size_t> leaves() const;
  /// Deepest node whose cube contains a.
  std::size_t locate(const Point& a) const;

 private:
  std::size_t dim_;
  std::vector<CubeNode> nodes_;
  std::vector<Point> arms_;
  std::vector<double> rewards_;
};

}  // namespace bmo
