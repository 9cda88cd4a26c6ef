#include "coarsent/orbit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_set>

#include "json.hpp"

#include "coarsent/coarse.hpp"
#include "coarsent/error.hpp"

namespace coarsent {

namespace {

double step_slack(double delta) { return 1e-9 * std::max(1.0, delta); }

std::size_t point_hash(const Point& p) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  mix(p.chart);
  for (double c : p.coords) {
    if (c == 0.0) c = 0.0;  // fold -0
    std::uint64_t bits;
    std::memcpy(&bits, &c, sizeof bits);
    mix(bits);
  }
  return static_cast<std::size_t>(h);
}

Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd m(a.size(), a.empty() ? 0 : a[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i][j];
  return m;
}

}  // namespace

Validation validate(const Map& f, const PseudoOrbit& orbit) {
  Validation v;
  const Space& s = f.domain();
  for (std::size_t i = 0; i < orbit.points.size(); ++i) {
    if (!s.contains(orbit.points[i])) {
      v.valid = false;
      v.first_violation = i;
      return v;
    }
  }
  for (std::size_t i = 0; i + 1 < orbit.points.size(); ++i) {
    const double d = s.distance(f.apply(orbit.points[i]), orbit.points[i + 1]);
    if (d > orbit.delta + step_slack(orbit.delta)) {
      v.valid = false;
      v.first_violation = i;
      return v;
    }
  }
  return v;
}

double orbit_distance(const Space& space, const PseudoOrbit& a, const PseudoOrbit& b) {
  if (a.points.size() != b.points.size()) throw InvalidInput("orbit_distance needs orbits of equal length");
  double m = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) m = std::max(m, space.distance(a.points[i], b.points[i]));
  return m;
}

std::vector<PseudoOrbit> enumerate(const Map& f, const Point& x0, int n, double delta, double spacing,
                                   std::size_t budget) {
  if (n < 1) throw InvalidInput("enumerate needs n >= 1");
  if (!(delta > 0.0) || !(spacing > 0.0)) throw InvalidInput("enumerate needs delta > 0 and spacing > 0");
  if (!f.domain().contains(x0)) throw InvalidInput("enumerate: x0 is not a member of the domain");
  std::vector<PseudoOrbit> out;
  std::vector<Point> path{x0};
  const std::string id = f.describe();
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      if (out.size() >= budget) throw BudgetExceeded("pseudoorbit enumeration exceeds budget of " + std::to_string(budget));
      out.push_back(PseudoOrbit{path, delta, id});
      return;
    }
    Point image;
    try {
      image = f.apply(path.back());
    } catch (const InvalidInput&) {
      return;  // the orbit leaves a truncated domain
    }
    for (const Point& next : f.domain().lattice_region(image, delta, spacing, budget)) {
      path.push_back(next);
      self(self, depth + 1);
      path.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

PseudoOrbit FinalTermSet::reconstruct(std::size_t level, std::size_t index) const {
  if (level >= levels.size() || index >= levels[level].size()) throw InvalidInput("reconstruct: index out of range");
  PseudoOrbit o;
  o.delta = delta;
  o.points.resize(level + 1);
  for (std::size_t j = level + 1; j-- > 0;) {
    o.points[j] = levels[j][index];
    if (j > 0) index = parents[j][index];
  }
  return o;
}

namespace detail {

/// One closure step: every grid point within delta of f(y), y in `prev`.
/// Output is sorted; parents index `prev`.
void closure_step(const Map& f, const std::vector<Point>& prev, double delta, double spacing, std::size_t budget,
                  std::vector<Point>& next, std::vector<std::uint32_t>& parents) {
  next.clear();
  parents.clear();
  auto hash = [&next](std::uint32_t i) { return point_hash(next[i]); };
  auto eq = [&next](std::uint32_t a, std::uint32_t b) { return next[a] == next[b]; };
  std::unordered_set<std::uint32_t, decltype(hash), decltype(eq)> seen(1024, hash, eq);
  const Space& s = f.domain();
  for (std::uint32_t pi = 0; pi < prev.size(); ++pi) {
    Point image;
    try {
      image = f.apply(prev[pi]);
    } catch (const InvalidInput&) {
      continue;
    }
    s.for_each_lattice_point(image, delta, spacing, budget, [&](const Point& p) {
      next.push_back(p);
      if (seen.insert(static_cast<std::uint32_t>(next.size() - 1)).second) {
        parents.push_back(pi);
        if (next.size() > budget)
          throw BudgetExceeded("final-term level exceeds point budget of " + std::to_string(budget));
      } else {
        next.pop_back();
      }
    });
  }
  seen.clear();
  std::vector<std::uint32_t> perm(next.size());
  std::iota(perm.begin(), perm.end(), 0u);
  std::sort(perm.begin(), perm.end(), [&](std::uint32_t a, std::uint32_t b) { return next[a] < next[b]; });
  std::vector<Point> sorted(next.size());
  std::vector<std::uint32_t> sp(next.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    sorted[i] = std::move(next[perm[i]]);
    sp[i] = parents[perm[i]];
  }
  next = std::move(sorted);
  parents = std::move(sp);
}

}  // namespace detail

FinalTermSet final_terms_lower(const Map& f, const Point& x0, int n, double delta, double spacing,
                               std::size_t budget) {
  if (n < 1) throw InvalidInput("final_terms_lower needs n >= 1");
  if (!(delta > 0.0) || !(spacing > 0.0) || spacing > delta)
    throw InvalidInput("final_terms_lower needs 0 < spacing <= delta");
  if (!f.domain().contains(x0)) throw InvalidInput("final_terms_lower: x0 is not a member of the domain");
  FinalTermSet k;
  k.delta = delta;
  k.provenance = Provenance::Lower;
  k.levels.push_back({x0});
  k.parents.push_back({});
  for (int j = 1; j <= n; ++j) {
    std::vector<Point> next;
    std::vector<std::uint32_t> par;
    detail::closure_step(f, k.levels.back(), delta, spacing, budget, next, par);
    k.levels.push_back(std::move(next));
    k.parents.push_back(std::move(par));
  }
  return k;
}

void for_each_final_level(const Map& f, const Point& x0, int n, double delta, double spacing, std::size_t budget,
                          const std::function<void(int, const std::vector<Point>&)>& visit) {
  if (n < 1) throw InvalidInput("final-term closure needs n >= 1");
  if (!(delta > 0.0) || !(spacing > 0.0) || spacing > delta)
    throw InvalidInput("final-term closure needs 0 < spacing <= delta");
  if (!f.domain().contains(x0)) throw InvalidInput("final-term closure: x0 is not a member of the domain");
  std::vector<Point> cur{x0}, next;
  std::vector<std::uint32_t> par;
  for (int j = 1; j <= n; ++j) {
    detail::closure_step(f, cur, delta, spacing, budget, next, par);
    std::swap(cur, next);
    visit(j, cur);
  }
}

Ellipsoid shadow_hull(const Map& f, const Point& x0, int n, double delta) {
  if (f.kind() != Map::Kind::Affine || f.domain().kind() != Space::Kind::Euclidean || !f.is_self_map())
    throw Infeasible("shadow_hull needs a linear self-map of a Euclidean space");
  if (n < 0 || !(delta > 0.0)) throw InvalidInput("shadow_hull needs n >= 0 and delta > 0");
  const auto lambda = f.expansion_constant();
  if (!lambda || !(*lambda > 1.0)) throw Infeasible("shadow_hull needs an expansion constant lambda > 1");
  const Eigen::MatrixXd a = to_eigen(f.matrix());
  Eigen::JacobiSVD<Eigen::MatrixXd> sv(a);
  const double smin = sv.singularValues().minCoeff();
  if (*lambda > smin * (1.0 + 1e-12))
    throw Infeasible("expansion constant exceeds the smallest singular value; declare a lambda valid for the Euclidean norm");
  const double r = delta / (*lambda - 1.0);
  Eigen::MatrixXd an = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (int i = 0; i < n; ++i) an = a * an;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(an, Eigen::ComputeFullU);
  Ellipsoid e;
  e.center = x0.coords;
  for (int i = 0; i < n; ++i) e.center = f.apply(Point(0, e.center)).coords;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    e.semi_axes.push_back(svd.singularValues()(i) * r);
    std::vector<double> axis(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index j = 0; j < a.rows(); ++j) axis[static_cast<std::size_t>(j)] = svd.matrixU()(j, i);
    e.axes.push_back(std::move(axis));
  }
  return e;
}

PseudoOrbit subsample(const PseudoOrbit& orbit, int k, const ControlFunction& L) {
  if (k < 1) throw InvalidInput("subsample needs k >= 1");
  if (orbit.points.empty() || orbit.length() % static_cast<std::size_t>(k) != 0)
    throw InvalidInput("subsample needs an orbit length divisible by k");
  PseudoOrbit out;
  out.delta = eta(L, orbit.delta, k);
  out.map_id = k == 1 ? orbit.map_id : "iterate(" + orbit.map_id + "," + std::to_string(k) + ")";
  for (std::size_t i = 0; i < orbit.points.size(); i += static_cast<std::size_t>(k)) out.points.push_back(orbit.points[i]);
  return out;
}

PseudoOrbit push_forward(const PseudoOrbit& orbit, const CoarseMapCert& cert) {
  if (!cert.K_close) throw InvalidInput("push_forward needs a declared closeness budget K");
  PseudoOrbit out;
  out.delta = cert.L(orbit.delta) + *cert.K_close;
  for (const Point& p : orbit.points) out.points.push_back(cert.phi.apply(p));
  return out;
}

std::string to_json_line(const PseudoOrbit& orbit) {
  nlohmann::json j;
  j["delta"] = orbit.delta;
  if (!orbit.map_id.empty()) j["map"] = orbit.map_id;
  nlohmann::json pts = nlohmann::json::array();
  for (const Point& p : orbit.points) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(p.chart);
    for (double c : p.coords) row.push_back(c);
    pts.push_back(std::move(row));
  }
  j["points"] = std::move(pts);
  return j.dump();
}

PseudoOrbit from_json_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    PseudoOrbit o;
    o.delta = j.at("delta").get<double>();
    if (j.contains("map")) o.map_id = j.at("map").get<std::string>();
    for (const auto& row : j.at("points")) {
      if (!row.is_array() || row.empty()) throw InvalidInput("pseudoorbit point rows must be [chart, coords...]");
      Point p;
      p.chart = row.at(0).get<std::size_t>();
      for (std::size_t i = 1; i < row.size(); ++i) p.coords.push_back(row.at(i).get<double>());
      o.points.push_back(std::move(p));
    }
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed pseudoorbit line: ") + e.what());
  }
}

}  // namespace coarsent
