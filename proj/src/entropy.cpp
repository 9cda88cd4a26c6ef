#include "coarsent/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "coarsent/error.hpp"
#include "coarsent/greedy.hpp"

namespace coarsent {

namespace {

constexpr double kLog2 = std::numbers::ln2;

/// Orbits of a Seeded family stored flat: only the free part (seed..x_n) is
/// kept, since every member shares the same prefix.
struct FlatFamily {
  std::size_t dim = 0;
  std::size_t stride = 0;  ///< points per orbit
  std::vector<std::size_t> charts;
  std::vector<double> coords;

  std::size_t size() const { return stride == 0 ? 0 : charts.size() / stride; }
  void load(std::size_t orbit, std::size_t i, Point& out) const {
    const std::size_t at = orbit * stride + i;
    out.chart = charts[at];
    out.coords.assign(coords.begin() + static_cast<std::ptrdiff_t>(at * dim),
                      coords.begin() + static_cast<std::ptrdiff_t>((at + 1) * dim));
  }
};

struct SeedPlan {
  std::vector<Point> prefix;  ///< x_0..x_p
  std::vector<Point> seeds;
  int tail = 0;
};

SeedPlan plan_seeds(const Map& f, const Point& x0, int n, double delta, double spacing, const SeededOptions& o,
                    std::size_t budget) {
  if ((o.tail >= 0) == (o.prefix >= 0)) throw InvalidInput("seeded strategy needs exactly one of tail / prefix");
  SeedPlan plan;
  const int p = o.prefix >= 0 ? o.prefix : n - 1 - o.tail;
  plan.tail = n - 1 - p;
  if (p < 0 || plan.tail < 0) throw Infeasible("seeded strategy: n too small for the requested prefix/tail");
  const Space& s = f.domain();
  double dn = 0.0;
  for (double v : o.drift) dn += v * v;
  if (std::sqrt(dn) > 1.0 + 1e-12) throw InvalidInput("seeded drift must have norm <= 1");
  plan.prefix.push_back(x0);
  for (int j = 1; j <= p; ++j) {
    Point next = f.apply(plan.prefix.back());
    if (!o.drift.empty()) {
      if (o.drift.size() != next.coords.size()) throw InvalidInput("seeded drift dimension mismatch");
      for (std::size_t i = 0; i < next.coords.size(); ++i) next.coords[i] += delta * o.drift[i];
    }
    if (!s.contains(next)) throw Infeasible("seeded drift leaves the domain");
    plan.prefix.push_back(std::move(next));
  }
  const Point base = f.apply(plan.prefix.back());
  const double step = o.seed_spacing > 0.0 ? o.seed_spacing : spacing;
  if (o.seed_axes.empty()) {
    plan.seeds = s.lattice_region(base, delta, step, budget);
  } else {
    if (o.seed_axes.size() != base.coords.size()) throw InvalidInput("seed axis mask dimension mismatch");
    std::vector<std::size_t> axes;
    for (std::size_t i = 0; i < o.seed_axes.size(); ++i)
      if (o.seed_axes[i]) axes.push_back(i);
    if (axes.empty()) throw InvalidInput("seed axis mask selects no axis");
    const auto offsets = Space::euclidean(axes.size()).lattice_region(Point(0, std::vector<double>(axes.size(), 0.0)),
                                                                       delta, step, budget);
    for (const Point& off : offsets) {
      Point q = base;
      for (std::size_t k = 0; k < axes.size(); ++k) q.coords[axes[k]] += off.coords[k];
      if (s.contains(q)) plan.seeds.push_back(std::move(q));
    }
  }
  return plan;
}

FlatFamily build_seeded(const Map& f, const SeedPlan& plan, std::size_t budget) {
  FlatFamily fam;
  const auto dim = f.domain().uniform_dim();
  if (!dim) throw Infeasible("seeded strategy needs a space with a uniform chart dimension");
  fam.dim = *dim;
  fam.stride = static_cast<std::size_t>(plan.tail) + 1;
  std::vector<Point> path;
  for (const Point& seed : plan.seeds) {
    path.assign(1, seed);
    bool ok = true;
    for (int i = 0; i < plan.tail && ok; ++i) {
      try {
        path.push_back(f.apply(path.back()));
      } catch (const InvalidInput&) {
        ok = false;
      }
    }
    if (!ok) continue;
    if (fam.size() >= budget) throw BudgetExceeded("seeded family exceeds budget of " + std::to_string(budget));
    for (const Point& q : path) {
      fam.charts.push_back(q.chart);
      fam.coords.insert(fam.coords.end(), q.coords.begin(), q.coords.end());
    }
  }
  return fam;
}

std::size_t seeded_count(const Space& s, const FlatFamily& fam, double R) {
  Point a, b;
  const std::size_t last = fam.stride - 1;
  auto key = [&](std::size_t i) {
    Point p;
    fam.load(i, last, p);
    return point_key(p);
  };
  auto dist = [&](std::size_t i, std::size_t j) {
    double m = 0.0;
    for (std::size_t t = fam.stride; t-- > 0;) {
      fam.load(i, t, a);
      fam.load(j, t, b);
      m = std::max(m, s.distance(a, b));
      if (m >= R) break;
    }
    return m;
  };
  return greedy_separated_indexed(s, fam.size(), key, dist, R).size();
}

struct SpiderItem {
  std::size_t level;
  std::size_t axis;
  bool negative;
};

std::vector<SpiderItem> spider_items(const Space& s, int n, double delta, double R) {
  std::vector<SpiderItem> items;
  const double reach = n * delta - R + 1e-9;
  if (reach < 0.0) return items;
  const std::size_t top = std::min(s.spider_max_level(), static_cast<std::size_t>(std::floor(reach)));
  for (std::size_t j = 0; j <= top; ++j)
    for (std::size_t a = 0; a < (std::size_t{1} << j); ++a) {
      items.push_back({j, a, false});
      items.push_back({j, a, true});
    }
  return items;
}

double spider_item_distance(const SpiderItem& x, const SpiderItem& y, double R) {
  if (x.level != y.level) return 2.0 * R + std::abs(static_cast<double>(x.level) - static_cast<double>(y.level));
  if (x.axis != y.axis) return R * std::numbers::sqrt2;
  return x.negative == y.negative ? 0.0 : 2.0 * R;
}

void require_identity_spider(const Map& f, const Point& x0) {
  if (f.kind() != Map::Kind::Identity || f.domain().kind() != Space::Kind::Spider)
    throw Infeasible("spider-axes strategy needs the identity on a spider space");
  if (!(x0 == f.domain().origin())) throw Infeasible("spider-axes strategy starts at the half-line origin");
}

std::size_t euclid_dim(const Map& f) {
  const Space& s = f.domain();
  if (s.kind() != Space::Kind::Euclidean) throw Infeasible("upper strategies need a Euclidean space");
  return s.dimension();
}

void series_into(const Map& f, const Point& x0, double delta, const std::vector<double>& R_list, int n_lo, int n_hi,
                 Strategy strategy, double spacing, const StrategyOptions& opts, std::vector<CountRecord>& out) {
  if (n_lo < 1 || n_hi < n_lo) throw InvalidInput("count window needs 1 <= n_lo <= n_hi");
  if (!(delta > 0.0)) throw InvalidInput("delta must be positive");
  if (R_list.empty()) throw InvalidInput("R list is empty");
  for (double R : R_list)
    if (!(R > 0.0)) throw InvalidInput("R must be positive");
  const Space& s = f.domain();
  auto record = [&](int n, double R) {
    CountRecord r;
    r.n = n;
    r.delta = delta;
    r.R = R;
    r.strategy = strategy;
    return r;
  };
  switch (strategy) {
    case Strategy::FullEnum:
      for (int n = n_lo; n <= n_hi; ++n) {
        const auto fam = enumerate(f, x0, n, delta, spacing, opts.budget);
        for (double R : R_list) {
          auto r = record(n, R);
          const double c = static_cast<double>(separated_orbits(s, fam, R).size());
          r.separated_lower = c;
          r.spanning_upper = c;
          out.push_back(r);
        }
      }
      return;
    case Strategy::FinalTerm:
      for_each_final_level(f, x0, n_hi, delta, spacing, opts.budget, [&](int n, const std::vector<Point>& pts) {
        if (n < n_lo) return;
        for (double R : R_list) {
          auto r = record(n, R);
          r.separated_lower = static_cast<double>(greedy_separated(s, pts, R).size());
          out.push_back(r);
        }
      });
      return;
    case Strategy::Seeded:
      for (int n = n_lo; n <= n_hi; ++n) {
        const auto plan = plan_seeds(f, x0, n, delta, spacing, opts.seeded, opts.budget);
        const auto fam = build_seeded(f, plan, opts.budget);
        for (double R : R_list) {
          auto r = record(n, R);
          r.separated_lower = static_cast<double>(seeded_count(s, fam, R));
          out.push_back(r);
        }
      }
      return;
    case Strategy::SpiderAxes:
      require_identity_spider(f, x0);
      for (int n = n_lo; n <= n_hi; ++n)
        for (double R : R_list) {
          const auto items = spider_items(s, n, delta, R);
          if (items.size() > opts.budget) throw BudgetExceeded("spider family exceeds budget");
          auto r = record(n, R);
          const auto kept = greedy_separated(
              items.size(), [&](std::size_t i, std::size_t j) { return spider_item_distance(items[i], items[j], R); }, R);
          // The base orbit that never leaves the half-line is always available.
          r.separated_lower = static_cast<double>(std::max<std::size_t>(kept.size(), 1));
          out.push_back(r);
        }
      return;
    case Strategy::ShadowHull:
      for (int n = n_lo; n <= n_hi; ++n)
        for (double R : R_list) {
          auto r = record(n, R);
          r.spanning_upper = shadow_hull_count(f, x0, n, R, delta);
          out.push_back(r);
        }
      return;
    case Strategy::Coded: {
      const std::size_t q = euclid_dim(f);
      const auto lip = f.lipschitz_constant();
      if (!lip || !(*lip > 1.0)) throw Infeasible("coded strategy needs a Lipschitz constant > 1");
      for (int n = n_lo; n <= n_hi; ++n)
        for (double R : R_list) {
          auto r = record(n, R);
          r.spanning_upper = coded_count(q, *lip, n, R, delta);
          out.push_back(r);
        }
      return;
    }
  }
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::FullEnum: return "FULL_ENUM";
    case Strategy::FinalTerm: return "FINAL_TERM";
    case Strategy::Seeded: return "SEEDED";
    case Strategy::SpiderAxes: return "SPIDER_AXES";
    case Strategy::ShadowHull: return "SHADOW_HULL";
    case Strategy::Coded: return "CODED";
  }
  return "?";
}

Strategy strategy_from_name(const std::string& s) {
  for (Strategy k : {Strategy::FullEnum, Strategy::FinalTerm, Strategy::Seeded, Strategy::SpiderAxes,
                     Strategy::ShadowHull, Strategy::Coded})
    if (s == strategy_name(k)) return k;
  throw InvalidInput("unknown strategy '" + s + "'");
}

bool is_upper_strategy(Strategy s) { return s == Strategy::ShadowHull || s == Strategy::Coded; }

std::vector<CountRecord> count_series(const Map& f, const Point& x0, double delta, const std::vector<double>& R_list,
                                      int n_lo, int n_hi, Strategy strategy, double spacing,
                                      const StrategyOptions& opts) {
  std::vector<CountRecord> out;
  series_into(f, x0, delta, R_list, n_lo, n_hi, strategy, spacing, opts, out);
  return out;
}

CountRecord count_separated(const Map& f, const Point& x0, int n, double R, double delta, Strategy strategy,
                            double spacing, const StrategyOptions& opts) {
  if (is_upper_strategy(strategy)) throw Infeasible(std::string(strategy_name(strategy)) + " only bounds spanning counts");
  return count_series(f, x0, delta, {R}, n, n, strategy, spacing, opts).front();
}

CountRecord count_spanning(const Map& f, const Point& x0, int n, double R, double delta, Strategy strategy,
                           double spacing, const StrategyOptions& opts) {
  if (strategy != Strategy::FullEnum && !is_upper_strategy(strategy))
    throw Infeasible(std::string(strategy_name(strategy)) + " gives no spanning upper bound");
  return count_series(f, x0, delta, {R}, n, n, strategy, spacing, opts).front();
}

double shadow_hull_count(const Map& f, const Point& x0, int n, double R, double delta) {
  const std::size_t q = euclid_dim(f);
  const auto hull = shadow_hull(f, x0, n, delta);
  const double lambda = *f.expansion_constant();
  const double S = R - 2.0 * delta / (lambda - 1.0);
  if (!(S > 0.0)) throw Infeasible("shadow-hull count needs R > 2 delta / (lambda - 1)");
  const double side = S / std::sqrt(static_cast<double>(q));
  double count = 1.0;
  for (double a : hull.semi_axes) count *= std::max(1.0, std::ceil(2.0 * a / side));
  return count;
}

double coded_count(std::size_t q, double lipschitz, int n, double R, double delta) {
  if (!(lipschitz > 1.0)) throw Infeasible("coded count needs a Lipschitz constant > 1");
  const double S = 2.0 * delta / (lipschitz - 1.0);
  int m = 0;
  while (2.0 * S * std::pow(lipschitz, m + 1) < R) ++m;
  if (m < 1) throw Infeasible("coded count needs R > 2 S lambda");
  const double qd = static_cast<double>(q);
  const double C = std::pow(std::sqrt(qd) + 1.0, qd);
  const double per_block = C * std::pow(2.0, qd) * std::pow(lipschitz, m * qd);
  const int k = (n + m - 1) / m;
  return std::pow(per_block, k);
}

std::vector<PseudoOrbit> seeded_family(const Map& f, const Point& x0, int n, double delta, double spacing,
                                       const SeededOptions& opts) {
  const auto plan = plan_seeds(f, x0, n, delta, spacing, opts, 10'000'000);
  std::vector<PseudoOrbit> out;
  for (const Point& seed : plan.seeds) {
    PseudoOrbit o;
    o.delta = delta;
    o.map_id = f.describe();
    o.points = plan.prefix;
    o.points.push_back(seed);
    bool ok = true;
    for (int i = 0; i < plan.tail && ok; ++i) {
      try {
        o.points.push_back(f.apply(o.points.back()));
      } catch (const InvalidInput&) {
        ok = false;
      }
    }
    if (ok) out.push_back(std::move(o));
  }
  return out;
}

PseudoOrbit spider_axis_orbit(const Space& spider, int n, double delta, double R, std::size_t level,
                              std::size_t axis, bool negative) {
  if (spider.kind() != Space::Kind::Spider || level > spider.spider_max_level() || axis >= (std::size_t{1} << level))
    throw InvalidInput("invalid spider axis item");
  const double j = static_cast<double>(level);
  if (j + R > n * delta + 1e-9) throw InvalidInput("spider axis item is not reachable in n steps");
  PseudoOrbit o;
  o.delta = delta;
  for (int i = 0; i <= n; ++i) {
    const double s = std::min(i * delta, j + R);
    if (s <= j) {
      o.points.emplace_back(0, std::vector<double>{s});
    } else {
      std::vector<double> c(std::size_t{1} << level, 0.0);
      c[axis] = negative ? -(s - j) : (s - j);
      o.points.emplace_back(level + 1, std::move(c));
    }
  }
  return o;
}

GrowthFit fit_growth_rate(const std::vector<std::pair<int, double>>& counts, int n_lo, int n_hi) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [n, c] : counts)
    if (n >= n_lo && n <= n_hi) {
      if (!(c >= 1.0)) throw InvalidInput("growth fit needs counts >= 1");
      pts.emplace_back(n, std::log(c));
    }
  if (pts.size() < 3) throw InvalidInput("growth fit needs at least 3 records in the window");
  const double k = static_cast<double>(pts.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw InvalidInput("growth fit window is degenerate");
  GrowthFit g;
  g.slope = sxy / sxx;
  g.intercept = my - g.slope * mx;
  double ss = 0;
  for (const auto& [x, y] : pts) {
    const double e = y - (g.intercept + g.slope * x);
    ss += e * e;
  }
  g.residual = std::sqrt(ss / k);
  g.n_lo = n_lo;
  g.n_hi = n_hi;
  return g;
}

GrowthFit fit_limsup(const std::vector<std::pair<int, double>>& counts, int n_lo, int n_hi) {
  GrowthFit best = fit_growth_rate(counts, n_lo, n_hi);
  if (best.residual <= 0.1) return best;
  std::optional<GrowthFit> top;
  for (int lo = n_lo; lo + 4 <= n_hi; ++lo) {
    try {
      const auto g = fit_growth_rate(counts, lo, n_hi);
      if (!top || g.slope > top->slope) top = g;
    } catch (const InvalidInput&) {
    }
  }
  return top ? *top : best;
}

void validate_schedule(const Schedule& s) {
  if (s.cells.empty()) throw InvalidInput("schedule has no cells");
  for (std::size_t i = 0; i < s.cells.size(); ++i) {
    const auto& c = s.cells[i];
    if (!(c.delta > 0.0)) throw InvalidInput("schedule deltas must be positive");
    if (i > 0 && !(c.delta > s.cells[i - 1].delta)) throw InvalidInput("schedule deltas must be strictly increasing");
    if (c.R_list.empty()) throw InvalidInput("schedule R list is empty");
    for (std::size_t k = 0; k < c.R_list.size(); ++k) {
      if (!(c.R_list[k] > 0.0)) throw InvalidInput("schedule radii must be positive");
      if (k > 0 && !(c.R_list[k] > c.R_list[k - 1])) throw InvalidInput("schedule R lists must be strictly increasing");
    }
    if (c.n_lo < 1 || c.n_hi < c.n_lo + 2) throw InvalidInput("schedule n windows need at least 3 lengths");
    if (!(c.spacing > 0.0)) throw InvalidInput("schedule spacing must be positive");
    if (is_upper_strategy(c.lower)) throw InvalidInput("lower strategy must be a separated-count strategy");
    if (c.upper && !is_upper_strategy(*c.upper) && *c.upper != Strategy::FullEnum)
      throw InvalidInput("upper strategy must be SHADOW_HULL, CODED or FULL_ENUM");
  }
  if (!(s.stabilization_tol > 0.0)) throw InvalidInput("stabilization tolerance must be positive");
  if (s.options.budget == 0) throw InvalidInput("budget must be positive");
}

const char* provenance_name(BoundProvenance p) {
  switch (p) {
    case BoundProvenance::LowerOnly: return "LOWER_ONLY";
    case BoundProvenance::UpperOnly: return "UPPER_ONLY";
    case BoundProvenance::Bracketed: return "BRACKETED";
  }
  return "?";
}

double EntropyEstimate::value() const {
  if (infinite) return std::numeric_limits<double>::infinity();
  if (extrapolated_lower) return *extrapolated_lower;
  if (extrapolated_upper) return *extrapolated_upper;
  return std::numeric_limits<double>::quiet_NaN();
}

bool infinity_flag(const std::vector<DeltaSummary>& per_delta) {
  if (per_delta.size() < 3) return false;
  for (const auto& d : per_delta) {
    const auto v = d.lower ? d.lower : d.upper;
    if (!v || *v < 0.5 * d.delta * kLog2) return false;
  }
  return true;
}

namespace {

/// Slope at the largest R whose change from the previous R is below tol.
void stabilize(const std::vector<std::pair<double, double>>& slopes, double tol, std::optional<double>& value,
               double& R, bool& stabilized) {
  if (slopes.empty()) return;
  value = slopes.back().second;
  R = slopes.back().first;
  stabilized = false;
  for (std::size_t i = slopes.size(); i-- > 1;)
    if (std::abs(slopes[i].second - slopes[i - 1].second) < tol) {
      value = slopes[i].second;
      R = slopes[i].first;
      stabilized = true;
      return;
    }
}

}  // namespace

EntropyEstimate estimate_entropy(const Map& f, const Point& x0, const Schedule& schedule) {
  validate_schedule(schedule);
  EntropyEstimate est;
  for (const auto& cell : schedule.cells) {
    std::vector<CountRecord> lower, upper;
    auto run = [&](Strategy st, std::vector<CountRecord>& into) {
      try {
        series_into(f, x0, cell.delta, cell.R_list, cell.n_lo, cell.n_hi, st, cell.spacing, schedule.options, into);
      } catch (const BudgetExceeded& e) {
        est.budget_exhausted = true;
        est.errors.push_back("delta " + std::to_string(cell.delta) + " " + strategy_name(st) + ": " + e.what());
      }
    };
    run(cell.lower, lower);
    if (cell.upper) run(*cell.upper, upper);
    est.records.insert(est.records.end(), lower.begin(), lower.end());
    est.records.insert(est.records.end(), upper.begin(), upper.end());

    std::vector<std::pair<double, double>> lo_slopes, up_slopes;
    for (double R : cell.R_list) {
      GridEntry g;
      g.delta = cell.delta;
      g.R = R;
      std::vector<std::pair<int, double>> ls, us;
      for (const auto& r : lower)
        if (r.R == R && r.separated_lower) ls.emplace_back(r.n, *r.separated_lower);
      for (const auto& r : upper)
        if (r.R == R && r.spanning_upper) us.emplace_back(r.n, *r.spanning_upper);
      if (ls.size() >= 3) g.lower = fit_limsup(ls, cell.n_lo, cell.n_hi);
      if (us.size() >= 3) g.upper = fit_limsup(us, cell.n_lo, cell.n_hi);
      if (g.lower) lo_slopes.emplace_back(R, g.lower->slope);
      if (g.upper) up_slopes.emplace_back(R, g.upper->slope);
      est.grid.push_back(g);
    }
    DeltaSummary d;
    d.delta = cell.delta;
    stabilize(lo_slopes, schedule.stabilization_tol, d.lower, d.R_lower, d.stabilized_lower);
    stabilize(up_slopes, schedule.stabilization_tol, d.upper, d.R_upper, d.stabilized_upper);
    est.per_delta.push_back(d);
  }
  for (auto it = est.per_delta.rbegin(); it != est.per_delta.rend(); ++it)
    if (it->lower || it->upper) {
      est.extrapolated_lower = it->lower;
      est.extrapolated_upper = it->upper;
      break;
    }
  if (est.extrapolated_lower && est.extrapolated_upper)
    est.provenance = BoundProvenance::Bracketed;
  else if (est.extrapolated_upper)
    est.provenance = BoundProvenance::UpperOnly;
  else
    est.provenance = BoundProvenance::LowerOnly;
  est.infinite = infinity_flag(est.per_delta);
  return est;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> separated_orbits(const Space& space, const std::vector<PseudoOrbit>& family, double R,
                                          const std::vector<std::size_t>& priority) {
  std::vector<std::size_t> order;
  if (!priority.empty()) {
    std::vector<bool> used(family.size(), false);
    for (std::size_t i : priority) {
      if (i >= family.size()) throw InvalidInput("priority index out of range");
      if (!used[i]) order.push_back(i);
      used[i] = true;
    }
    for (std::size_t i = 0; i < family.size(); ++i)
      if (!used[i]) order.push_back(i);
  }
  return greedy_separated_indexed(
      space, family.size(), [&](std::size_t i) { return point_key(family[i].points.back()); },
      [&](std::size_t i, std::size_t j) { return orbit_distance(space, family[i], family[j]); }, R, order);
}

PseudoOrbit lift_iterate_orbit(const Map& f, const PseudoOrbit& orbit, int k) {
  if (k < 1) throw InvalidInput("lift needs k >= 1");
  PseudoOrbit out;
  out.delta = orbit.delta;
  out.map_id = f.describe();
  for (std::size_t i = 0; i < orbit.points.size(); ++i) {
    out.points.push_back(orbit.points[i]);
    if (i + 1 == orbit.points.size()) break;
    Point p = orbit.points[i];
    for (int j = 1; j < k; ++j) {
      p = f.apply(p);
      out.points.push_back(p);
    }
  }
  return out;
}

ProductCounts count_product(const Space& left_space, const std::vector<PseudoOrbit>& left, const Space& right_space,
                            const std::vector<PseudoOrbit>& right, double R) {
  if (left.empty() || right.empty()) throw InvalidInput("count_product needs nonempty families");
  if (left.front().length() != right.front().length() || left.front().delta != right.front().delta)
    throw InvalidInput("count_product needs equal n and delta");
  const std::size_t nl = left.size(), nr = right.size();
  if (nl * nr > 4'000'000) throw BudgetExceeded("product family exceeds budget");
  auto table = [](const Space& s, const std::vector<PseudoOrbit>& fam) {
    std::vector<double> d(fam.size() * fam.size(), 0.0);
    for (std::size_t i = 0; i < fam.size(); ++i)
      for (std::size_t j = i + 1; j < fam.size(); ++j) d[i * fam.size() + j] = d[j * fam.size() + i] = orbit_distance(s, fam[i], fam[j]);
    return d;
  };
  const auto dl = table(left_space, left);
  const auto dr = table(right_space, right);
  auto dleft = [&](std::size_t i, std::size_t j) { return dl[i * nl + j]; };
  auto dright = [&](std::size_t i, std::size_t j) { return dr[i * nr + j]; };
  auto dprod = [&](std::size_t a, std::size_t b) { return std::max(dleft(a / nr, b / nr), dright(a % nr, b % nr)); };

  ProductCounts pc;
  const auto el = greedy_separated(nl, dleft, R);
  const auto er = greedy_separated(nr, dright, R);
  const auto sl = greedy_spanning(nl, dleft, R);
  const auto sr = greedy_spanning(nr, dright, R);
  pc.left_separated = static_cast<double>(el.size());
  pc.right_separated = static_cast<double>(er.size());
  pc.left_spanning = static_cast<double>(sl.size());
  pc.right_spanning = static_cast<double>(sr.size());

  const std::size_t total = nl * nr;
  pc.raw_separated = static_cast<double>(greedy_separated(total, dprod, R).size());
  pc.raw_spanning = static_cast<double>(greedy_spanning(total, dprod, R).size());

  // E_left x E_right: separated when one coordinate differs, checked pairwise.
  std::vector<std::size_t> pairs;
  for (std::size_t a : el)
    for (std::size_t b : er) pairs.push_back(a * nr + b);
  pc.product_of_separated_is_separated = true;
  for (std::size_t i = 0; i < pairs.size() && pc.product_of_separated_is_separated; ++i)
    for (std::size_t j = i + 1; j < pairs.size(); ++j)
      if (dprod(pairs[i], pairs[j]) < R) {
        pc.product_of_separated_is_separated = false;
        break;
      }
  std::vector<std::size_t> order = pairs;
  {
    std::vector<bool> used(total, false);
    for (std::size_t p : pairs) used[p] = true;
    for (std::size_t i = 0; i < total; ++i)
      if (!used[i]) order.push_back(i);
  }
  std::vector<std::size_t> kept;
  for (std::size_t i : order) {
    bool ok = true;
    for (std::size_t k : kept)
      if (dprod(i, k) < R) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(i);
  }
  pc.separated_lower = std::max(pc.raw_separated, static_cast<double>(kept.size()));

  // S_left x S_right spans the product family iff every item has a pair within < R.
  pc.product_of_spanning_is_spanning = true;
  for (std::size_t i = 0; i < total && pc.product_of_spanning_is_spanning; ++i) {
    bool covered = false;
    for (std::size_t a : sl) {
      if (dleft(i / nr, a) >= R) continue;
      for (std::size_t b : sr)
        if (dright(i % nr, b) < R) {
          covered = true;
          break;
        }
      if (covered) break;
    }
    if (!covered) pc.product_of_spanning_is_spanning = false;
  }
  pc.spanning_upper = pc.raw_spanning;
  if (pc.product_of_spanning_is_spanning)
    pc.spanning_upper = std::min(pc.raw_spanning, pc.left_spanning * pc.right_spanning);
  return pc;
}

}  // namespace coarsent
