#include "bmo/envs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace bmo {

Box Box::of(const DyadicCube& q) {
  Box b;
  for (std::size_t i = 0; i < q.dim(); ++i) {
    b.lo.push_back(q.lower(i));
    b.hi.push_back(q.upper(i));
  }
  return b;
}

double Box::measure() const {
  double m = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) m *= hi[i] - lo[i];
  return m;
}

Point Box::sample_uniform(Rng& rng) const {
  std::vector<double> x(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    x[i] = lo[i] + (hi[i] - lo[i]) * uniform01(rng);
    if (x[i] >= hi[i]) x[i] = std::nextafter(hi[i], lo[i]);
  }
  return Point(std::move(x));
}

std::vector<double> halton(std::size_t index, std::size_t dim) {
  static constexpr std::array<unsigned, 16> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19,
                                                       23, 29, 31, 37, 41, 43, 47, 53};
  if (dim > kPrimes.size()) throw std::invalid_argument("halton: dimension too large");
  std::vector<double> out(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const double base = kPrimes[k];
    double f = 1.0, r = 0.0;
    for (std::size_t i = index; i > 0; i /= kPrimes[k]) {
      f /= base;
      r += f * static_cast<double>(i % kPrimes[k]);
    }
    out[k] = r;
  }
  return out;
}

namespace {

std::shared_ptr<const std::vector<double>> tabulate(const EnvironmentSpec& spec,
                                                     std::size_t budget) {
  auto table = std::make_shared<std::vector<double>>();
  if (spec.dim <= 2) {
    const auto per_axis = static_cast<std::size_t>(
        std::llround(std::pow(static_cast<double>(budget), 1.0 / static_cast<double>(spec.dim))));
    std::size_t total = spec.dim == 1 ? per_axis : per_axis * per_axis;
    table->reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<double> x(spec.dim);
      std::size_t rest = idx;
      for (std::size_t i = 0; i < spec.dim; ++i) {
        x[i] = (static_cast<double>(rest % per_axis) + 0.5) / static_cast<double>(per_axis);
        rest /= per_axis;
      }
      table->push_back(spec.raw_f(Point(std::move(x))));
    }
  } else {
    table->reserve(budget);
    for (std::size_t i = 1; i <= budget; ++i) table->push_back(spec.raw_f(Point(halton(i, spec.dim))));
  }
  std::sort(table->begin(), table->end());
  return table;
}

}  // namespace

Environment::Environment(EnvironmentSpec spec, std::size_t level_budget) : spec_(std::move(spec)) {
  if (spec_.dim == 0) throw std::invalid_argument("environment dimension must be >= 1");
  if (!spec_.raw_f) throw std::invalid_argument("environment needs a reward function");
  if (!(spec_.noise_bound >= 0.0)) throw std::invalid_argument("noise bound must be >= 0");
  if (!spec_.raw_level_measure) {
    if (level_budget == 0) throw std::invalid_argument("level-set table budget must be >= 1");
    level_table_ = tabulate(spec_, level_budget);
  }
}

double Environment::f(const Point& a) const { return spec_.raw_f(a) - spec_.mean_shift; }

bool Environment::singular_at(const Point& a) const { return !std::isfinite(spec_.raw_f(a)); }

Point Environment::draw_arm(const DyadicCube& q, Rng& rng) const {
  for (int attempt = 0; attempt < 64; ++attempt) {
    Point a = q.sample_uniform(rng);
    if (!singular_at(a)) return a;
  }
  throw std::runtime_error("environment " + spec_.name + ": 64 consecutive singular draws in " +
                           q.to_string());
}

double Environment::noise(Rng& rng) const {
  const double u = uniform01(rng);
  return spec_.noise_bound * (2.0 * u - 1.0);
}

double Environment::observe(const Point& a, Rng& rng) const { return f(a) + noise(rng); }

CubeMean Environment::cube_mean(const DyadicCube& q, std::size_t budget) const {
  return box_mean(Box::of(q), budget);
}

CubeMean Environment::box_mean(const Box& box, std::size_t budget) const {
  if (budget == 0) throw std::invalid_argument("quadrature budget must be >= 1");
  if (box.dim() != spec_.dim) throw std::invalid_argument("box/environment dimension mismatch");
  if (spec_.raw_box_mean) return {spec_.raw_box_mean(box) - spec_.mean_shift, 0.0};

  // Cranley-Patterson randomized Halton: independent shifts give an error bar.
  constexpr std::size_t kReplicates = 8;
  const std::size_t per = std::max<std::size_t>(1, budget / kReplicates);
  std::size_t seed = 0x5eed;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    seed = seed * 1000003U ^ std::hash<double>{}(box.lo[i]);
    seed = seed * 1000003U ^ std::hash<double>{}(box.hi[i]);
  }
  Rng rng(seed);
  std::array<double, kReplicates> means{};
  for (auto& m : means) {
    std::vector<double> shift(box.dim());
    for (auto& s : shift) s = uniform01(rng);
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 1; i <= per; ++i) {
      auto h = halton(i, box.dim());
      std::vector<double> x(box.dim());
      for (std::size_t k = 0; k < box.dim(); ++k) {
        double u = h[k] + shift[k];
        if (u >= 1.0) u -= 1.0;
        x[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * u;
      }
      const double v = spec_.raw_f(Point(std::move(x)));
      if (std::isfinite(v)) {
        sum += v;
        ++used;
      }
    }
    m = used ? sum / static_cast<double>(used) : 0.0;
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / kReplicates;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= (kReplicates - 1);
  return {mean - spec_.mean_shift, std::sqrt(var / kReplicates)};
}

double Environment::level_set_measure(double z) const {
  const double raw_z = z + spec_.mean_shift;
  if (spec_.raw_level_measure) return spec_.raw_level_measure(raw_z);
  const auto& t = *level_table_;
  const auto above = t.end() - std::upper_bound(t.begin(), t.end(), raw_z);
  return static_cast<double>(above) / static_cast<double>(t.size());
}

double Environment::level_set_resolution() const {
  return level_table_ ? 1.0 / static_cast<double>(level_table_->size()) : 0.0;
}

std::optional<double> Environment::finite_max() const {
  if (!spec_.raw_finite_max) return std::nullopt;
  return *spec_.raw_finite_max - spec_.mean_shift;
}

Environment Environment::shifted(double c) const {
  Environment out = *this;
  out.spec_.mean_shift -= c;
  out.spec_.name += "+shift";
  return out;
}

Environment Environment::with_noise(double noise_bound) const {
  if (!(noise_bound >= 0.0)) throw std::invalid_argument("noise bound must be >= 0");
  Environment out = *this;
  out.spec_.noise_bound = noise_bound;
  return out;
}

// ---------------------------------------------------------------------------
// Built-ins

namespace {

// Scaled negative logarithm s ln(1/x) on the first axis.
EnvironmentSpec log_spec(const std::string& name, double scale) {
  EnvironmentSpec s;
  s.name = name;
  s.dim = 1;
  s.raw_f = [scale](const Point& a) {
    return a[0] > 0.0 ? -scale * std::log(a[0]) : std::numeric_limits<double>::infinity();
  };
  // Antiderivative of ln(1/x) is x - x ln x, continuous at 0.
  s.raw_box_mean = [scale](const Box& b) {
    const auto anti = [](double x) { return x > 0.0 ? x - x * std::log(x) : 0.0; };
    const double a = b.lo[0], c = b.hi[0];
    if (c <= a) return a > 0.0 ? -scale * std::log(a) : std::numeric_limits<double>::infinity();
    return scale * (anti(c) - anti(a)) / (c - a);
  };
  s.raw_level_measure = [scale](double z) { return std::min(1.0, std::exp(-z / scale)); };
  s.mean_shift = scale;
  return s;
}

struct Monomial {
  double coef;
  int px, py;
};

// Mean of t^n over [a, b] in native coordinates.
double mean_power(double a, double b, int n) {
  if (b == a) return std::pow(a, n);
  // (b^{n+1} - a^{n+1}) / ((n+1)(b-a)) without cancellation.
  double s = 0.0;
  for (int j = 0; j <= n; ++j) s += std::pow(b, j) * std::pow(a, n - j);
  return s / (n + 1);
}

struct Polynomial2 {
  std::vector<Monomial> terms;

  double operator()(double x, double y) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.coef * std::pow(x, t.px) * std::pow(y, t.py);
    return v;
  }
  double box_mean(double x0, double x1, double y0, double y1) const {
    double v = 0.0;
    for (const auto& t : terms) v += t.coef * mean_power(x0, x1, t.px) * mean_power(y0, y1, t.py);
    return v;
  }
};

constexpr double kNativeLo = -5.0;
constexpr double kNativeSpan = 10.0;
constexpr std::size_t kExtremaGrid = 2048;

double to_native(double u) { return kNativeLo + kNativeSpan * u; }

// Golden-section line search along one axis on [lo, hi].
double golden_min(const std::function<double(double)>& g, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  for (int i = 0; i < 80; ++i) {
    if (g(c) < g(d)) b = d; else a = c;
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  const double mid = 0.5 * (a + b);
  double best = mid;
  for (double cand : {lo, hi}) {
    if (g(cand) < g(best)) best = cand;
  }
  return best;
}

// Grid search on a kExtremaGrid^2 lattice of the closed native square,
// then coordinate-wise golden-section polishing inside the best cell.
double minimize_on_square(const Polynomial2& g) {
  const double h = kNativeSpan / static_cast<double>(kExtremaGrid - 1);
  double bx = kNativeLo, by = kNativeLo, best = g(bx, by);
  for (std::size_t i = 0; i < kExtremaGrid; ++i) {
    const double x = kNativeLo + h * static_cast<double>(i);
    for (std::size_t j = 0; j < kExtremaGrid; ++j) {
      const double y = kNativeLo + h * static_cast<double>(j);
      const double v = g(x, y);
      if (v < best) {
        best = v;
        bx = x;
        by = y;
      }
    }
  }
  const double hi_edge = kNativeLo + kNativeSpan;
  for (int sweep = 0; sweep < 30; ++sweep) {
    bx = golden_min([&](double x) { return g(x, by); }, std::max(kNativeLo, bx - h),
                    std::min(hi_edge, bx + h));
    by = golden_min([&](double y) { return g(bx, y); }, std::max(kNativeLo, by - h),
                    std::min(hi_edge, by + h));
  }
  return std::min(best, g(bx, by));
}

// Reward 10 (g_max - g) / (g_max - g_min) on the normalized square.
EnvironmentSpec benchmark_spec(const std::string& name, const Polynomial2& g) {
  Polynomial2 neg = g;
  for (auto& t : neg.terms) t.coef = -t.coef;
  const double g_min = minimize_on_square(g);
  const double g_max = -minimize_on_square(neg);
  const double scale = 10.0 / (g_max - g_min);

  EnvironmentSpec s;
  s.name = name;
  s.dim = 2;
  s.raw_f = [g, g_max, scale](const Point& a) {
    return scale * (g_max - g(to_native(a[0]), to_native(a[1])));
  };
  s.raw_box_mean = [g, g_max, scale](const Box& b) {
    return scale * (g_max - g.box_mean(to_native(b.lo[0]), to_native(b.hi[0]),
                                       to_native(b.lo[1]), to_native(b.hi[1])));
  };
  s.mean_shift = s.raw_box_mean(Box{{0.0, 0.0}, {1.0, 1.0}});
  s.raw_finite_max = 10.0;
  return s;
}

Polynomial2 himmelblau_poly() {
  // (x^2 + y - 11)^2 + (x + y^2 - 7)^2 expanded.
  return {{{1, 4, 0}, {1, 0, 4}, {2, 2, 1}, {2, 1, 2}, {-21, 2, 0}, {-13, 0, 2},
           {-14, 1, 0}, {-22, 0, 1}, {170, 0, 0}}};
}

Polynomial2 styblinski_poly() {
  // 0.5 sum_i (x_i^4 - 16 x_i^2 + 5 x_i) for d = 2.
  return {{{0.5, 4, 0}, {-8, 2, 0}, {2.5, 1, 0}, {0.5, 0, 4}, {-8, 0, 2}, {2.5, 0, 1}}};
}

Environment make_builtin(const std::string& name, std::size_t dim) {
  if (name == "log1d") return Environment(log_spec(name, 1.0));
  if (name == "log2x") return Environment(log_spec(name, 2.0));
  if (name == "himmelblau") return Environment(benchmark_spec(name, himmelblau_poly()));
  if (name == "styblinski") return Environment(benchmark_spec(name, styblinski_poly()));
  if (name == "constant") {
    EnvironmentSpec s;
    s.name = name;
    s.dim = dim == 0 ? 1 : dim;
    s.raw_f = [](const Point&) { return 0.0; };
    s.raw_box_mean = [](const Box&) { return 0.0; };
    s.raw_level_measure = [](double z) { return z < 0.0 ? 1.0 : 0.0; };
    s.raw_finite_max = 0.0;
    return Environment(std::move(s));
  }
  throw std::invalid_argument("unknown environment '" + name +
                              "' (expected log1d, log2x, himmelblau, styblinski or constant)");
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"log1d", "log2x", "himmelblau", "styblinski", "constant"};
}

Environment builtin(const std::string& name, double noise_bound, std::size_t dim) {
  // Construction tabulates extrema and level sets; do it once per (name, dim).
  static std::mutex mu;
  static std::map<std::pair<std::string, std::size_t>, Environment> cache;
  const auto key = std::make_pair(name, name == "constant" ? dim : 0);
  std::unique_lock lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    lock.unlock();
    Environment env = make_builtin(name, dim);
    lock.lock();
    it = cache.emplace(key, std::move(env)).first;
  }
  return it->second.with_noise(noise_bound);
}

}  // namespace bmo
