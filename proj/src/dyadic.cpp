#include "bmo/dyadic.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace bmo {

DyadicCube DyadicCube::root(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("dyadic cube dimension must be >= 1");
  return DyadicCube(0, std::vector<std::uint64_t>(dim, 0));
}

DyadicCube::DyadicCube(int depth, std::vector<std::uint64_t> coords)
    : depth_(depth), coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("dyadic cube dimension must be >= 1");
  if (depth_ < 0 || depth_ > kMaxDepth) {
    throw std::invalid_argument("dyadic cube depth " + std::to_string(depth_) +
                                " outside [0, " + std::to_string(kMaxDepth) + "]");
  }
  const std::uint64_t side = std::uint64_t{1} << depth_;
  for (auto m : coords_) {
    if (m >= side) {
      throw std::invalid_argument("dyadic coordinate " + std::to_string(m) +
                                  " outside [0, 2^" + std::to_string(depth_) + ")");
    }
  }
}

double DyadicCube::measure() const {
  return std::ldexp(1.0, -depth_ * static_cast<int>(dim()));
}

double DyadicCube::edge() const { return std::ldexp(1.0, -depth_); }

double DyadicCube::lower(std::size_t axis) const {
  return std::ldexp(static_cast<double>(coords_[axis]), -depth_);
}

double DyadicCube::upper(std::size_t axis) const {
  return std::ldexp(static_cast<double>(coords_[axis] + 1), -depth_);
}

DyadicCube DyadicCube::subcube(std::size_t j) const {
  if (depth_ >= kMaxDepth) {
    throw std::overflow_error("dyadic refinement beyond depth " + std::to_string(kMaxDepth));
  }
  std::vector<std::uint64_t> child(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    child[i] = 2 * coords_[i] + ((j >> i) & 1U);
  }
  return DyadicCube(depth_ + 1, std::move(child));
}

std::vector<DyadicCube> DyadicCube::direct_subcubes() const {
  const std::size_t n = doubling_constant(dim());
  std::vector<DyadicCube> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) out.push_back(subcube(j));
  return out;
}

std::optional<DyadicCube> DyadicCube::direct_supercube() const {
  if (depth_ == 0) return std::nullopt;
  return ancestor_at(depth_ - 1);
}

DyadicCube DyadicCube::ancestor_at(int depth) const {
  if (depth < 0 || depth > depth_) throw std::invalid_argument("ancestor depth out of range");
  std::vector<std::uint64_t> up(coords_.size());
  const int shift = depth_ - depth;
  for (std::size_t i = 0; i < coords_.size(); ++i) up[i] = coords_[i] >> shift;
  return DyadicCube(depth, std::move(up));
}

namespace {

// Integer cell index of x at the given depth, clamped into [0, 2^depth).
std::uint64_t cell_of(double x, int depth) {
  const double scaled = std::ldexp(x, depth);
  const double side = std::ldexp(1.0, depth);
  if (!(scaled >= 0.0)) return 0;
  if (scaled >= side) return (std::uint64_t{1} << depth) - 1;
  return static_cast<std::uint64_t>(scaled);
}

}  // namespace

bool DyadicCube::contains(const Point& a) const {
  if (a.dim() != dim()) throw std::invalid_argument("point/cube dimension mismatch");
  for (std::size_t i = 0; i < dim(); ++i) {
    const double x = a[i];
    if (!(x >= 0.0 && x < 1.0)) return false;
    // floor(x 2^k) is exact for doubles, so the comparison is exact too.
    if (static_cast<std::uint64_t>(std::ldexp(x, depth_)) != coords_[i]) return false;
  }
  return true;
}

std::size_t DyadicCube::child_index_of(const Point& a) const {
  std::size_t j = 0;
  for (std::size_t i = 0; i < dim(); ++i) {
    const std::uint64_t m = cell_of(a[i], depth_ + 1);
    j |= static_cast<std::size_t>(m & 1U) << i;
  }
  return j;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("cube dimension mismatch");
  if (other.depth_ < depth_) return false;
  const int shift = other.depth_ - depth_;
  for (std::size_t i = 0; i < dim(); ++i) {
    if ((other.coords_[i] >> shift) != coords_[i]) return false;
  }
  return true;
}

bool DyadicCube::disjoint(const DyadicCube& other) const {
  return !contains(other) && !other.contains(*this);
}

Point DyadicCube::sample_uniform(Rng& rng) const {
  std::vector<double> x(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    // (m + u) 2^-k is exact and stays below the upper face because u < 1.
    x[i] = std::ldexp(static_cast<double>(coords_[i]) + uniform01(rng), -depth_);
    if (x[i] >= upper(i)) x[i] = std::nextafter(upper(i), 0.0);
  }
  return Point(std::move(x));
}

std::string DyadicCube::to_string() const {
  std::string s = std::to_string(depth_) + ":";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(coords_[i]);
  }
  return s;
}

DyadicCube DyadicCube::parse(std::string_view text) {
  const auto bad = [&] {
    return std::invalid_argument("malformed dyadic cube address '" + std::string(text) + "'");
  };
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw bad();
  int depth = 0;
  {
    auto head = text.substr(0, colon);
    auto [p, ec] = std::from_chars(head.data(), head.data() + head.size(), depth);
    if (ec != std::errc{} || p != head.data() + head.size()) throw bad();
  }
  std::vector<std::uint64_t> coords;
  auto rest = text.substr(colon + 1);
  while (true) {
    const auto comma = rest.find(',');
    auto tok = rest.substr(0, comma);
    std::uint64_t m = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), m);
    if (tok.empty() || ec != std::errc{} || p != tok.data() + tok.size()) throw bad();
    coords.push_back(m);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return DyadicCube(depth, std::move(coords));
}

std::size_t DyadicCubeHash::operator()(const DyadicCube& q) const noexcept {
  std::size_t h = std::hash<int>{}(q.depth());
  for (auto m : q.coords()) {
    h ^= std::hash<std::uint64_t>{}(m) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

PartitionCheck check_partition(std::span<const DyadicCube> cubes) {
  PartitionCheck out;
  if (cubes.empty()) {
    out.measure_is_one = false;
    return out;
  }
  const std::size_t dim = cubes.front().dim();
  std::unordered_set<DyadicCube, DyadicCubeHash> seen;
  std::map<int, std::uint64_t> per_depth;
  for (const auto& q : cubes) {
    if (q.dim() != dim) throw std::invalid_argument("mixed dimensions in partition check");
    if (!seen.insert(q).second) out.disjoint = false;
    per_depth[q.depth()] += 1;
    out.measure_sum += q.measure();
  }
  for (const auto& q : cubes) {
    for (int k = q.depth() - 1; k >= 0 && out.disjoint; --k) {
      if (seen.count(q.ancestor_at(k))) out.disjoint = false;
    }
  }
  // Exact measure sum: carry whole groups of 2^d cubes up one level at a time.
  const std::uint64_t group = doubling_constant(dim);
  std::uint64_t carry = 0;
  for (auto it = per_depth.rbegin(); it != per_depth.rend(); ++it) {
    int k = it->first;
    std::uint64_t count = it->second + carry;
    auto next = std::next(it);
    const int stop = next == per_depth.rend() ? 0 : next->first;
    while (k > stop) {
      if (count % group != 0) {
        out.measure_is_one = false;
        return out;
      }
      count /= group;
      --k;
    }
    carry = count;
  }
  out.measure_is_one = carry == 1;
  return out;
}

}  // namespace bmo
