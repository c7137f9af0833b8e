#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bmo {

/// Deterministic 64-bit engine shared by every sampler in the library.
/// mt19937_64 output is fixed by the standard, so seeded streams are
/// reproducible across platforms.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
/// Standard distributions are avoided because their algorithms are
/// implementation-defined.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Largest supported refinement depth per axis.
inline constexpr int kMaxDepth = 60;

/// A point of the arm space [0,1)^d.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : coords_(coords) {}

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

/// Half-open dyadic cube prod_i [m_i 2^-k, (m_i + 1) 2^-k) addressed by its
/// depth k and integer coordinates m. Addresses are exact, so containment,
/// nesting and subdivision never touch floating point.
class DyadicCube {
 public:
  /// The unit cube [0,1)^d. Throws std::invalid_argument for d == 0.
  static DyadicCube root(std::size_t dim);

  /// Throws std::invalid_argument when depth exceeds kMaxDepth or a
  /// coordinate is outside [0, 2^depth).
  DyadicCube(int depth, std::vector<std::uint64_t> coords);

  int depth() const { return depth_; }
  std::size_t dim() const { return coords_.size(); }
  std::span<const std::uint64_t> coords() const { return coords_; }

  /// Lebesgue measure 2^{-d k}; exact for every representable address.
  double measure() const;
  double edge() const;
  double lower(std::size_t axis) const;
  double upper(std::size_t axis) const;

  /// The M_d = 2^d direct sub-cubes. Child j takes the upper half along axis
  /// i iff bit i of j is set. Throws std::overflow_error at kMaxDepth.
  std::vector<DyadicCube> direct_subcubes() const;
  DyadicCube subcube(std::size_t j) const;
  std::optional<DyadicCube> direct_supercube() const;
  /// Ancestor (or self) at the given shallower depth.
  DyadicCube ancestor_at(int depth) const;

  /// Index j of the direct sub-cube holding `a`; requires contains(a).
  std::size_t child_index_of(const Point& a) const;

  bool contains(const Point& a) const;
  /// True when `other` is a (not necessarily proper) sub-cube of this cube.
  bool contains(const DyadicCube& other) const;
  bool disjoint(const DyadicCube& other) const;

  /// Uniform draw inside the cube.
  Point sample_uniform(Rng& rng) const;

  /// "k:m1,m2,...,md".
  std::string to_string() const;
  /// Inverse of to_string; throws std::invalid_argument on malformed text.
  static DyadicCube parse(std::string_view text);

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;

  /// Total order: shallower first, then lexicographic coordinates. Used as
  /// the deterministic tie-break between cubes of equal index.
  friend bool operator<(const DyadicCube& a, const DyadicCube& b) {
    if (a.depth_ != b.depth_) return a.depth_ < b.depth_;
    return a.coords_ < b.coords_;
  }

 private:
  int depth_ = 0;
  std::vector<std::uint64_t> coords_;
};

struct DyadicCubeHash {
  std::size_t operator()(const DyadicCube& q) const noexcept;
};

/// Doubling constant of ([0,1)^d, ||.||_inf).
inline std::size_t doubling_constant(std::size_t dim) {
  return std::size_t{1} << dim;
}

/// Exact check that `cubes` are pairwise disjoint and their measures sum to
/// one, i.e. that they partition [0,1)^d.
struct PartitionCheck {
  bool disjoint = true;
  bool measure_is_one = true;
  double measure_sum = 0.0;
  bool ok() const { return disjoint && measure_is_one; }
};
PartitionCheck check_partition(std::span<const DyadicCube> cubes);

}  // namespace bmo
