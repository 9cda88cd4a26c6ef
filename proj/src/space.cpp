#include "coarsent/space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "coarsent/error.hpp"

namespace coarsent {

namespace detail {

struct SpaceNode {
  Space::Kind kind = Space::Kind::Euclidean;
  std::size_t dim = 0;
  double lower = 0.0;
  // cone
  BaseSetSpec spec;
  std::vector<std::vector<double>> base;
  std::vector<std::pair<double, std::size_t>> sorted_angles;  // q == 2 radial cones
  double tolerance = 1e-9;
  // chain
  ChainRule rule = ChainRule::Rectangles;
  std::vector<std::vector<double>> extents;
  // spider
  std::size_t max_level = 0;
  // product
  std::vector<Space> factors;
  std::string key;
};

}  // namespace detail

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double slack(double r) { return 1e-12 * std::max(1.0, std::abs(r)); }

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool is_radial(const detail::SpaceNode& n) {
  return n.kind == Space::Kind::Cone && n.spec.kind != BaseSetSpec::Kind::FullSphere;
}

double normalize_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

class BudgetCounter {
 public:
  explicit BudgetCounter(std::size_t budget) : budget_(budget) {}
  void tick() {
    if (++count_ > budget_) throw BudgetExceeded("lattice region exceeds point budget of " + std::to_string(budget_));
  }

 private:
  std::size_t budget_;
  std::size_t count_ = 0;
};

long long ceil_index(double v, double s) { return static_cast<long long>(std::ceil(v / s - 1e-9)); }
long long floor_index(double v, double s) { return static_cast<long long>(std::floor(v / s + 1e-9)); }

/// Enumerates grid points k*s inside an axis-aligned box, with an optional
/// Euclidean-ball pruning (ball_center non-null).
void box_grid(Point& scratch, const std::vector<double>& lo, const std::vector<double>& hi, double s,
              const std::vector<double>* ball_center, double radius,
              const std::function<bool(const Point&)>& accept, const std::function<void(const Point&)>& visit,
              BudgetCounter& budget) {
  const std::size_t q = lo.size();
  scratch.coords.assign(q, 0.0);
  if (q == 0) {
    if (accept(scratch)) {
      budget.tick();
      visit(scratch);
    }
    return;
  }
  std::vector<long long> first(q), last(q);
  for (std::size_t i = 0; i < q; ++i) {
    first[i] = ceil_index(lo[i], s);
    last[i] = floor_index(hi[i], s);
    if (first[i] > last[i]) return;
  }
  const double r2 = radius * radius + slack(radius * radius);
  // Depth-first over axes with partial squared-distance pruning.
  std::function<void(std::size_t, double)> rec = [&](std::size_t axis, double partial) {
    for (long long k = first[axis]; k <= last[axis]; ++k) {
      const double x = static_cast<double>(k) * s;
      double next = partial;
      if (ball_center) {
        const double d = x - (*ball_center)[axis];
        next += d * d;
        if (next > r2) {
          if (x > (*ball_center)[axis]) break;
          continue;
        }
      }
      scratch.coords[axis] = x;
      if (axis + 1 == q) {
        if (accept(scratch)) {
          budget.tick();
          visit(scratch);
        }
      } else {
        rec(axis + 1, next);
      }
    }
  };
  rec(0, 0.0);
}

}  // namespace

std::vector<double> cantor_arc_angles(int levels, double arc) {
  if (levels < 0 || levels > 24) throw InvalidInput("CantorArc levels must be in [0, 24]");
  std::vector<double> left{0.0};
  double width = 1.0;
  for (int l = 0; l < levels; ++l) {
    width /= 3.0;
    std::vector<double> next;
    next.reserve(left.size() * 2);
    for (double a : left) {
      next.push_back(a);
      next.push_back(a + 2.0 * width);
    }
    left = std::move(next);
  }
  for (double& a : left) a *= arc;
  return left;
}

std::vector<std::vector<double>> generate_base_points(std::size_t q, const BaseSetSpec& spec) {
  std::vector<std::vector<double>> out;
  auto on_circle = [&](const std::vector<double>& angles) {
    if (q != 2) throw InvalidInput("angle-based base sets require q == 2");
    for (double a : angles) out.push_back({std::cos(a), std::sin(a)});
  };
  switch (spec.kind) {
    case BaseSetSpec::Kind::FiniteAngles:
      if (spec.angles.empty()) throw InvalidInput("FiniteAngles needs at least one angle");
      on_circle(spec.angles);
      break;
    case BaseSetSpec::Kind::CantorArc:
      on_circle(cantor_arc_angles(spec.levels, spec.arc));
      break;
    case BaseSetSpec::Kind::FullSphere: {
      if (q == 1) {
        out = {{1.0}, {-1.0}};
      } else if (q == 2) {
        std::vector<double> angles;
        for (int i = 0; i < spec.resolution; ++i) angles.push_back(kTwoPi * i / spec.resolution);
        on_circle(angles);
      } else {
        // Axis directions only; membership of a full-sphere cone never consults them.
        for (std::size_t i = 0; i < q; ++i) {
          std::vector<double> e(q, 0.0), f(q, 0.0);
          e[i] = 1.0;
          f[i] = -1.0;
          out.push_back(e);
          out.push_back(f);
        }
      }
      break;
    }
  }
  return out;
}

double segment_growth(ChainRule rule, std::size_t n) {
  // k is the integer with 2^{k^2} <= n < 2^{(k+1)^2}; n = 0 is grouped with k = 0.
  std::size_t k = 0;
  while (true) {
    const std::size_t e = (k + 1) * (k + 1);
    if (e >= 63 || n < (std::size_t{1} << e)) break;
    ++k;
  }
  const bool even = (k % 2 == 0);
  switch (rule) {
    case ChainRule::SegmentsF: return even ? 1.0 : 2.0;
    case ChainRule::SegmentsG: return even ? 2.0 : 1.0;
    case ChainRule::Rectangles: break;
  }
  throw InvalidInput("segment_growth called for a rectangle chain");
}

double chain_anchor_gap(std::size_t n, std::size_t m) {
  if (n > m) std::swap(n, m);
  // (n+1) + ... + m
  const double a = static_cast<double>(n), b = static_cast<double>(m);
  return (b * (b + 1.0) - a * (a + 1.0)) / 2.0;
}

// ---------------------------------------------------------------------------
// construction

Space Space::euclidean(std::size_t q) {
  if (q == 0) throw InvalidInput("Euclidean dimension must be positive");
  auto n = std::make_shared<detail::SpaceNode>();
  n->kind = Kind::Euclidean;
  n->dim = q;
  n->key = "E(" + std::to_string(q) + ")";
  return Space(n);
}

Space Space::halfplane() {
  auto n = std::make_shared<detail::SpaceNode>();
  n->kind = Kind::Halfplane;
  n->dim = 2;
  n->key = "H";
  return Space(n);
}

Space Space::half_line(double lower) {
  auto n = std::make_shared<detail::SpaceNode>();
  n->kind = Kind::HalfLine;
  n->dim = 1;
  n->lower = lower;
  n->key = "L(" + fmt_double(lower) + ")";
  return Space(n);
}

Space Space::integers(std::size_t q) {
  if (q == 0) throw InvalidInput("Integer lattice dimension must be positive");
  auto n = std::make_shared<detail::SpaceNode>();
  n->kind = Kind::Integers;
  n->dim = q;
  n->key = "Z(" + std::to_string(q) + ")";
  return Space(n);
}

Space Space::cone(std::size_t q, BaseSetSpec base, double tolerance) {
  if (q < 1) throw InvalidInput("cone dimension must be positive");
  auto n = std::make_shared<detail::SpaceNode>();
  n->kind = Kind::Cone;
  n->dim = q;
  n->base = generate_base_points(q, base);
  n->spec = base;
  n->tolerance = tolerance;
  if (q == 2) {
    for (std::size_t i = 0; i < n->base.size(); ++i)
      n->sorted_angles.emplace_back(normalize_angle(std::atan2(n->base[i][1], n->base[i][0])), i);
    std::sort(n->sorted_angles.begin(), n->sorted_angles.end());
  }
  std::ostringstream os;
  os << "C(" << q << ',' << static_cast<int>(base.kind) << ',' << base.levels << ',' << fmt_double(base.arc) << ','
     << base.resolution;
  for (double a : base.angles) os << ',' << fmt_double(a);
  os << ';' << fmt_double(tolerance) << ')';
  n->key = os.str();
  return Space(n);
}

Space Space::chain(ChainRule rule, std::size_t blocks) {
  if (blocks < 2 || blocks > 1000) throw InvalidInput("chain block count must be in [2, 1000]");
  auto n = std::make_shared<detail::SpaceNode>();
  n->kind = Kind::Chain;
  n->rule = rule;
  if (rule == ChainRule::Rectangles) {
    n->dim = 2;
    for (std::size_t b = 0; b < blocks; ++b) {
      const double big = std::ldexp(1.0, static_cast<int>(b / 2));
      n->extents.push_back(b % 2 == 0 ? std::vector<double>{1.0, big} : std::vector<double>{big, 1.0});
    }
  } else {
    n->dim = 1;
    double len = 1.0;
    for (std::size_t b = 0; b < blocks; ++b) {
      n->extents.push_back({len});
      len *= segment_growth(rule, b);
    }
  }
  n->key = "Ch(" + std::to_string(static_cast<int>(rule)) + ',' + std::to_string(blocks) + ")";
  return Space(n);
}

Space Space::spider(std::size_t max_level) {
  if (max_level > 20) throw InvalidInput("spider max_level must be <= 20");
  auto n = std::make_shared<detail::SpaceNode>();
  n->kind = Kind::Spider;
  n->max_level = max_level;
  n->key = "S(" + std::to_string(max_level) + ")";
  return Space(n);
}

Space Space::product(Space left, Space right) {
  auto n = std::make_shared<detail::SpaceNode>();
  n->kind = Kind::Product;
  n->key = "P(" + left.key() + ',' + right.key() + ")";
  n->factors = {std::move(left), std::move(right)};
  return Space(n);
}

// ---------------------------------------------------------------------------
// accessors

Space::Kind Space::kind() const { return node_->kind; }
const std::string& Space::key() const { return node_->key; }
std::size_t Space::dimension() const { return node_->dim; }
double Space::lower_bound() const { return node_->lower; }
const std::vector<std::vector<double>>& Space::cone_base() const { return node_->base; }
const BaseSetSpec& Space::cone_spec() const { return node_->spec; }
double Space::cone_tolerance() const { return node_->tolerance; }
ChainRule Space::chain_rule() const { return node_->rule; }
std::size_t Space::chain_blocks() const { return node_->extents.size(); }
std::size_t Space::spider_max_level() const { return node_->max_level; }

const std::vector<double>& Space::block_extent(std::size_t block) const {
  if (node_->kind != Kind::Chain || block >= node_->extents.size()) throw InvalidInput("invalid chain block");
  return node_->extents[block];
}

const Space& Space::left() const {
  if (node_->kind != Kind::Product) throw InvalidInput("not a product space");
  return node_->factors[0];
}

const Space& Space::right() const {
  if (node_->kind != Kind::Product) throw InvalidInput("not a product space");
  return node_->factors[1];
}

std::optional<std::size_t> Space::chart_dim(std::size_t chart) const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Euclidean:
    case Kind::Halfplane:
    case Kind::HalfLine:
    case Kind::Integers:
    case Kind::Cone:
      if (chart == 0) return n.dim;
      return std::nullopt;
    case Kind::Chain:
      if (chart < n.extents.size()) return n.dim;
      return std::nullopt;
    case Kind::Spider:
      if (chart == 0) return 1;
      if (chart - 1 <= n.max_level) return std::size_t{1} << (chart - 1);
      return std::nullopt;
    case Kind::Product: {
      auto a = left().chart_dim(product_left_chart(chart));
      auto b = right().chart_dim(product_right_chart(chart));
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> Space::uniform_dim() const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Spider: return std::nullopt;
    case Kind::Product: {
      auto a = left().uniform_dim();
      auto b = right().uniform_dim();
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    default: return n.dim;
  }
}

std::size_t Space::chart_count() const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Chain: return n.extents.size();
    case Kind::Spider: return n.max_level + 2;
    case Kind::Product: return left().chart_count() * right().chart_count();
    default: return 1;
  }
}

std::pair<Point, Point> Space::split(const Point& p) const {
  const std::size_t lc = product_left_chart(p.chart), rc = product_right_chart(p.chart);
  auto ld = left().chart_dim(lc);
  auto rd = right().chart_dim(rc);
  if (!ld || !rd) throw InvalidInput("invalid product chart");
  if (p.coords.size() != *ld + *rd) throw InvalidInput("product point dimension mismatch");
  Point a(lc, std::vector<double>(p.coords.begin(), p.coords.begin() + static_cast<std::ptrdiff_t>(*ld)));
  Point b(rc, std::vector<double>(p.coords.begin() + static_cast<std::ptrdiff_t>(*ld), p.coords.end()));
  return {std::move(a), std::move(b)};
}

Point Space::join(const Point& a, const Point& b) const {
  Point p;
  p.chart = product_chart(a.chart, b.chart);
  p.coords.reserve(a.coords.size() + b.coords.size());
  p.coords.insert(p.coords.end(), a.coords.begin(), a.coords.end());
  p.coords.insert(p.coords.end(), b.coords.begin(), b.coords.end());
  return p;
}

// ---------------------------------------------------------------------------
// membership

bool Space::contains(const Point& p) const { return contains(p, node_->tolerance); }

bool Space::contains(const Point& p, double cone_tolerance) const {
  const auto& n = *node_;
  auto dim = chart_dim(p.chart);
  if (!dim || p.coords.size() != *dim) return false;
  for (double c : p.coords)
    if (!std::isfinite(c)) return false;
  switch (n.kind) {
    case Kind::Euclidean: return true;
    case Kind::Halfplane: return p.coords[1] >= 0.0;
    case Kind::HalfLine: return p.coords[0] >= n.lower - slack(n.lower);
    case Kind::Integers:
      return std::all_of(p.coords.begin(), p.coords.end(), [](double c) { return c == std::round(c); });
    case Kind::Cone: {
      if (n.spec.kind == BaseSetSpec::Kind::FullSphere) return true;
      const double r = norm(p.coords);
      const double tol = std::max(cone_tolerance, 1e-9 * r);
      if (r <= tol) return true;
      if (n.dim == 2) {
        const double theta = normalize_angle(std::atan2(p.coords[1], p.coords[0]));
        const auto& sa = n.sorted_angles;
        auto it = std::lower_bound(sa.begin(), sa.end(), std::make_pair(theta, std::size_t{0}));
        const std::size_t hi = (it == sa.end()) ? 0 : static_cast<std::size_t>(it - sa.begin());
        const std::size_t lo = (hi == 0) ? sa.size() - 1 : hi - 1;
        for (std::size_t idx : {lo, hi}) {
          const auto& a = n.base[sa[idx].second];
          const double dx = p.coords[0] - r * a[0], dy = p.coords[1] - r * a[1];
          if (std::sqrt(dx * dx + dy * dy) <= tol) return true;
        }
        return false;
      }
      for (const auto& a : n.base) {
        double s = 0.0;
        for (std::size_t i = 0; i < n.dim; ++i) {
          const double d = p.coords[i] - r * a[i];
          s += d * d;
        }
        if (std::sqrt(s) <= tol) return true;
      }
      return false;
    }
    case Kind::Chain: {
      const auto& ext = n.extents[p.chart];
      if (n.rule == ChainRule::Rectangles) {
        for (std::size_t i = 0; i < 2; ++i)
          if (std::abs(p.coords[i]) > ext[i] / 2.0 + slack(ext[i])) return false;
        return true;
      }
      return p.coords[0] >= -slack(1.0) && p.coords[0] <= ext[0] + slack(ext[0]);
    }
    case Kind::Spider:
      if (p.chart == 0) return p.coords[0] >= 0.0;
      return true;
    case Kind::Product: {
      auto [a, b] = split(p);
      return left().contains(a, cone_tolerance) && right().contains(b, cone_tolerance);
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// metric

double Space::distance(const Point& a, const Point& b) const {
  const auto& n = *node_;
  for (const Point* p : {&a, &b}) {
    auto dim = chart_dim(p->chart);
    if (!dim) throw InvalidInput("invalid chart id " + std::to_string(p->chart));
    if (p->coords.size() != *dim) throw InvalidInput("point dimension does not match chart dimension");
  }
  switch (n.kind) {
    case Kind::Euclidean:
    case Kind::Halfplane:
    case Kind::HalfLine:
    case Kind::Integers:
    case Kind::Cone: return euclid(a.coords, b.coords);
    case Kind::Chain:
      if (a.chart == b.chart) return max_diff(a.coords, b.coords);
      return max_abs(a.coords) + max_abs(b.coords) + chain_anchor_gap(a.chart, b.chart);
    case Kind::Spider: {
      if (a.chart == b.chart) return euclid(a.coords, b.coords);
      auto junction_offset = [](const Point& p) { return p.chart == 0 ? p.coords[0] : static_cast<double>(p.chart - 1); };
      auto radial = [](const Point& p) { return p.chart == 0 ? 0.0 : norm(p.coords); };
      return radial(a) + std::abs(junction_offset(a) - junction_offset(b)) + radial(b);
    }
    case Kind::Product: {
      auto [a1, a2] = split(a);
      auto [b1, b2] = split(b);
      return std::max(left().distance(a1, b1), right().distance(a2, b2));
    }
  }
  return 0.0;
}

double Space::chart_gap(std::size_t a, std::size_t b) const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Chain: return a == b ? 0.0 : chain_anchor_gap(a, b);
    case Kind::Product:
      return std::max(left().chart_gap(product_left_chart(a), product_left_chart(b)),
                      right().chart_gap(product_right_chart(a), product_right_chart(b)));
    default: return 0.0;
  }
}

Point Space::origin() const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::HalfLine: return Point(0, {n.lower});
    case Kind::Spider: return Point(0, {0.0});
    case Kind::Product: return join(left().origin(), right().origin());
    default: return Point(0, std::vector<double>(n.dim, 0.0));
  }
}

// ---------------------------------------------------------------------------
// lattice

void Space::for_each_lattice_point(const Point& center, double radius, double spacing, std::size_t budget,
                                   const std::function<void(const Point&)>& visit) const {
  if (!(radius >= 0.0) || !(spacing > 0.0)) throw InvalidInput("lattice_region needs radius >= 0 and spacing > 0");
  if (!chart_dim(center.chart) || center.coords.size() != *chart_dim(center.chart))
    throw InvalidInput("lattice center has an invalid chart or dimension");
  const auto& n = *node_;
  BudgetCounter counter(budget);
  Point scratch;
  const double rr = radius + slack(radius);

  switch (n.kind) {
    case Kind::Euclidean:
    case Kind::Halfplane:
    case Kind::HalfLine:
    case Kind::Integers:
    case Kind::Cone: {
      if (is_radial(n)) {
        const auto& c = center.coords;
        const double cn = norm(c);
        scratch.chart = 0;
        std::vector<std::pair<double, Point>> found;
        if (cn <= rr) {
          scratch.coords.assign(n.dim, 0.0);
          counter.tick();
          visit(scratch);
        }
        auto visit_ray = [&](std::size_t ray) {
          const auto& a = n.base[ray];
          double ac = 0.0;
          for (std::size_t i = 0; i < n.dim; ++i) ac += a[i] * c[i];
          const double disc = ac * ac - cn * cn + rr * rr;
          if (disc < 0.0) return;
          const double sq = std::sqrt(disc);
          const long long k0 = std::max<long long>(1, ceil_index(ac - sq, spacing));
          const long long k1 = floor_index(ac + sq, spacing);
          scratch.coords.resize(n.dim);
          for (long long k = k0; k <= k1; ++k) {
            const double t = static_cast<double>(k) * spacing;
            for (std::size_t i = 0; i < n.dim; ++i) scratch.coords[i] = t * a[i];
            counter.tick();
            visit(scratch);
          }
        };
        if (n.dim == 2 && cn > rr) {
          const double half = std::asin(std::min(1.0, rr / cn)) + 1e-12;
          const double theta = normalize_angle(std::atan2(c[1], c[0]));
          const auto& sa = n.sorted_angles;
          auto scan = [&](double lo, double hi) {
            auto it = std::lower_bound(sa.begin(), sa.end(), std::make_pair(lo, std::size_t{0}));
            for (; it != sa.end() && it->first <= hi; ++it) visit_ray(it->second);
          };
          double lo = theta - half, hi = theta + half;
          if (lo < 0) {
            scan(0.0, hi);
            scan(lo + kTwoPi, kTwoPi);
          } else if (hi >= kTwoPi) {
            scan(lo, kTwoPi);
            scan(0.0, hi - kTwoPi);
          } else {
            scan(lo, hi);
          }
        } else {
          for (std::size_t ray = 0; ray < n.base.size(); ++ray) visit_ray(ray);
        }
        return;
      }
      std::vector<double> lo(n.dim), hi(n.dim);
      for (std::size_t i = 0; i < n.dim; ++i) {
        lo[i] = center.coords[i] - rr;
        hi[i] = center.coords[i] + rr;
      }
      double step = spacing;
      if (n.kind == Kind::Halfplane) lo[1] = std::max(lo[1], 0.0);
      if (n.kind == Kind::HalfLine) lo[0] = std::max(lo[0], n.lower);
      if (n.kind == Kind::Integers) step = std::max(1.0, std::ceil(spacing - 1e-9));
      scratch.chart = 0;
      box_grid(
          scratch, lo, hi, step, &center.coords, radius, [&](const Point& p) { return contains(p); }, visit, counter);
      return;
    }
    case Kind::Chain: {
      const std::size_t m = center.chart;
      const double dc = max_abs(center.coords);
      for (std::size_t b = 0; b < n.extents.size(); ++b) {
        const auto& ext = n.extents[b];
        std::vector<double> lo(n.dim), hi(n.dim);
        if (b == m) {
          for (std::size_t i = 0; i < n.dim; ++i) {
            lo[i] = center.coords[i] - rr;
            hi[i] = center.coords[i] + rr;
          }
        } else {
          const double rem = rr - dc - chain_anchor_gap(b, m);
          if (rem < 0.0) {
            if (b > m) break;
            continue;
          }
          for (std::size_t i = 0; i < n.dim; ++i) {
            lo[i] = -rem;
            hi[i] = rem;
          }
        }
        for (std::size_t i = 0; i < n.dim; ++i) {
          if (n.rule == ChainRule::Rectangles) {
            lo[i] = std::max(lo[i], -ext[i] / 2.0);
            hi[i] = std::min(hi[i], ext[i] / 2.0);
          } else {
            lo[i] = std::max(lo[i], 0.0);
            hi[i] = std::min(hi[i], ext[i]);
          }
        }
        scratch.chart = b;
        box_grid(
            scratch, lo, hi, spacing, nullptr, radius,
            [&](const Point& p) { return contains(p) && distance(center, p) <= rr; }, visit, counter);
      }
      return;
    }
    case Kind::Spider: {
      const bool on_line = center.chart == 0;
      const double radial_c = on_line ? 0.0 : norm(center.coords);
      const double junction_c = on_line ? center.coords[0] : static_cast<double>(center.chart - 1);
      // half-line points
      {
        const double rem = rr - radial_c;
        if (rem >= 0.0) {
          scratch.chart = 0;
          scratch.coords.assign(1, 0.0);
          const long long k0 = std::max<long long>(0, ceil_index(junction_c - rem, spacing));
          const long long k1 = floor_index(junction_c + rem, spacing);
          for (long long k = k0; k <= k1; ++k) {
            scratch.coords[0] = static_cast<double>(k) * spacing;
            counter.tick();
            visit(scratch);
          }
        }
      }
      for (std::size_t j = 0; j <= n.max_level; ++j) {
        const std::size_t chart = j + 1;
        const std::size_t dim = std::size_t{1} << j;
        scratch.chart = chart;
        if (chart == center.chart) {
          std::vector<double> lo(dim), hi(dim);
          for (std::size_t i = 0; i < dim; ++i) {
            lo[i] = center.coords[i] - rr;
            hi[i] = center.coords[i] + rr;
          }
          box_grid(
              scratch, lo, hi, spacing, &center.coords, radius, [](const Point& p) { return p.coords.size() > 0; },
              visit, counter);
          continue;
        }
        const double rem = rr - radial_c - std::abs(junction_c - static_cast<double>(j));
        if (rem < 0.0) continue;
        std::vector<double> zero(dim, 0.0), lo(dim, -rem), hi(dim, rem);
        // The attached origin coincides with the half-line point j; skip it there.
        box_grid(
            scratch, lo, hi, spacing, &zero, rem,
            [](const Point& p) { return std::any_of(p.coords.begin(), p.coords.end(), [](double c) { return c != 0.0; }); },
            visit, counter);
      }
      return;
    }
    case Kind::Product: {
      auto [cl, cr] = split(center);
      const auto lp = left().lattice_region(cl, radius, spacing, budget);
      const auto rp = right().lattice_region(cr, radius, spacing, budget);
      for (const auto& a : lp)
        for (const auto& b : rp) {
          counter.tick();
          visit(join(a, b));
        }
      return;
    }
  }
}

std::vector<Point> Space::lattice_region(const Point& center, double radius, double spacing,
                                         std::size_t budget) const {
  if (!(radius > 0.0)) throw InvalidInput("lattice_region needs radius > 0");
  if (!(spacing > 0.0)) throw InvalidInput("lattice_region needs spacing > 0");
  std::vector<Point> out;
  for_each_lattice_point(center, radius, spacing, budget, [&](const Point& p) { out.push_back(p); });
  std::sort(out.begin(), out.end(), [](const Point& a, const Point& b) { return a < b; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// sampling

Point Space::sample(std::mt19937_64& rng, const Point& center, double radius) const {
  const auto& n = *node_;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto ball_offset = [&](std::size_t dim, double r) {
    std::vector<double> v(dim);
    double s = 0.0;
    do {
      s = 0.0;
      for (double& x : v) {
        x = gauss(rng);
        s += x * x;
      }
    } while (s == 0.0);
    const double scale = r * std::pow(unit(rng), 1.0 / static_cast<double>(dim)) / std::sqrt(s);
    for (double& x : v) x *= scale;
    return v;
  };

  for (int attempt = 0; attempt < 10000; ++attempt) {
    Point p;
    switch (n.kind) {
      case Kind::Euclidean:
      case Kind::Halfplane:
      case Kind::HalfLine:
      case Kind::Integers: {
        auto v = ball_offset(n.dim, radius);
        p = Point(0, center.coords);
        for (std::size_t i = 0; i < n.dim; ++i) p.coords[i] += v[i];
        if (n.kind == Kind::Integers)
          for (double& c : p.coords) c = std::round(c);
        break;
      }
      case Kind::Cone: {
        if (!is_radial(n)) {
          auto v = ball_offset(n.dim, radius);
          p = Point(0, center.coords);
          for (std::size_t i = 0; i < n.dim; ++i) p.coords[i] += v[i];
          break;
        }
        const auto& a = n.base[std::uniform_int_distribution<std::size_t>(0, n.base.size() - 1)(rng)];
        const double cn = norm(center.coords);
        const double t = (cn + radius) * unit(rng);
        p = Point(0, std::vector<double>(n.dim));
        for (std::size_t i = 0; i < n.dim; ++i) p.coords[i] = t * a[i];
        break;
      }
      case Kind::Chain: {
        std::vector<std::size_t> reach;
        const double dc = max_abs(center.coords);
        for (std::size_t b = 0; b < n.extents.size(); ++b)
          if (b == center.chart || dc + chain_anchor_gap(b, center.chart) <= radius) reach.push_back(b);
        const std::size_t b = reach[std::uniform_int_distribution<std::size_t>(0, reach.size() - 1)(rng)];
        const auto& ext = n.extents[b];
        p = Point(b, std::vector<double>(n.dim));
        for (std::size_t i = 0; i < n.dim; ++i) {
          const double lo = n.rule == ChainRule::Rectangles ? -ext[i] / 2.0 : 0.0;
          const double hi = n.rule == ChainRule::Rectangles ? ext[i] / 2.0 : ext[i];
          double a = lo, z = hi;
          if (b == center.chart) {
            a = std::max(lo, center.coords[i] - radius);
            z = std::min(hi, center.coords[i] + radius);
          } else {
            const double rem = radius - dc - chain_anchor_gap(b, center.chart);
            a = std::max(lo, -rem);
            z = std::min(hi, rem);
          }
          p.coords[i] = a + (z - a) * unit(rng);
        }
        break;
      }
      case Kind::Spider: {
        const bool on_line = center.chart == 0;
        const double junction_c = on_line ? center.coords[0] : static_cast<double>(center.chart - 1);
        std::vector<std::size_t> reach{0};
        const double radial_c = on_line ? 0.0 : norm(center.coords);
        for (std::size_t j = 0; j <= n.max_level; ++j)
          if (j + 1 == center.chart || radial_c + std::abs(junction_c - static_cast<double>(j)) <= radius)
            reach.push_back(j + 1);
        const std::size_t chart = reach[std::uniform_int_distribution<std::size_t>(0, reach.size() - 1)(rng)];
        if (chart == 0) {
          p = Point(0, {std::max(0.0, junction_c + (2.0 * unit(rng) - 1.0) * radius)});
        } else if (chart == center.chart) {
          auto v = ball_offset(center.coords.size(), radius);
          p = Point(chart, center.coords);
          for (std::size_t i = 0; i < v.size(); ++i) p.coords[i] += v[i];
        } else {
          const double rem = radius - radial_c - std::abs(junction_c - static_cast<double>(chart - 1));
          p = Point(chart, ball_offset(std::size_t{1} << (chart - 1), rem));
        }
        break;
      }
      case Kind::Product: {
        auto [cl, cr] = split(center);
        return join(left().sample(rng, cl, radius), right().sample(rng, cr, radius));
      }
    }
    if (contains(p) && distance(center, p) <= radius + slack(radius)) return p;
  }
  throw InvalidInput("could not sample a member point near the given center");
}

}  // namespace coarsent
