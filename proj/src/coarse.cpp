#include "coarsent/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "json.hpp"

#include "coarsent/error.hpp"

namespace coarsent {

namespace {

double tol(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

}  // namespace

EmbeddingReport check_embedding(const CoarseMapCert& cert, double region_radius, std::size_t samples,
                                std::uint64_t seed) {
  if (samples == 0 || !(region_radius > 0.0)) throw InvalidInput("check_embedding needs samples >= 1 and a positive radius");
  const Space& X = cert.phi.domain();
  const Space& Y = cert.phi.codomain();
  std::mt19937_64 rng(seed);
  const Point o = X.origin();
  EmbeddingReport rep;
  rep.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const Point a = X.sample(rng, o, region_radius);
    const Point b = X.sample(rng, o, region_radius);
    const double dx = X.distance(a, b);
    const double dy = Y.distance(cert.phi.apply(a), cert.phi.apply(b));
    if (dy > cert.L(dx) + tol(cert.L(dx))) {
      ++rep.upper_violations;
      if (rep.upper_witnesses.size() < 8) rep.upper_witnesses.emplace_back(a, b);
    }
    if (dx > cert.L(dy) + tol(cert.L(dy))) {
      ++rep.lower_violations;
      if (rep.lower_witnesses.size() < 8) rep.lower_witnesses.emplace_back(a, b);
    }
  }
  return rep;
}

DensityReport check_density(const CoarseMapCert& cert, double codomain_region_radius, double grid_spacing,
                            std::size_t budget) {
  if (!cert.M_dense) throw InvalidInput("check_density needs a declared density budget M");
  const Space& X = cert.phi.domain();
  const Space& Y = cert.phi.codomain();
  const double dom_radius = 2.0 * codomain_region_radius + *cert.M_dense + 1.0;
  const auto targets = Y.lattice_region(Y.origin(), codomain_region_radius, grid_spacing, budget);
  const auto sources = X.lattice_region(X.origin(), dom_radius, grid_spacing, budget);
  if (targets.size() * sources.size() > budget * 100)
    throw BudgetExceeded("density check exceeds pair budget");
  std::vector<Point> images;
  images.reserve(sources.size());
  for (const Point& p : sources) images.push_back(cert.phi.apply(p));
  DensityReport rep;
  rep.slack = grid_spacing;
  bool first = true;
  for (const Point& y : targets) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& z : images) {
      best = std::min(best, Y.distance(y, z));
      if (best == 0.0) break;
    }
    if (first || best > rep.max_gap) {
      rep.max_gap = best;
      rep.argmax = y;
      first = false;
    }
  }
  rep.flagged = rep.max_gap > *cert.M_dense + rep.slack + tol(rep.max_gap);
  return rep;
}

DefectResult closeness_defect(const Map& f1, const Map& f2, double region_radius, double grid_spacing,
                              std::size_t budget) {
  if (!(f1.domain() == f2.domain())) throw InvalidInput("closeness_defect needs a shared domain");
  if (!(f1.codomain() == f2.codomain())) throw InvalidInput("closeness_defect needs a shared codomain");
  const Space& X = f1.domain();
  const Space& Y = f1.codomain();
  DefectResult r;
  r.argmax = X.origin();
  X.for_each_lattice_point(X.origin(), region_radius, grid_spacing, budget, [&](const Point& p) {
    const double d = Y.distance(f1.apply(p), f2.apply(p));
    if (d > r.sup_defect || (d == r.sup_defect && p < r.argmax)) {
      r.sup_defect = d;
      r.argmax = p;
    }
  });
  return r;
}

const char* trend_name(Trend t) {
  switch (t) {
    case Trend::Bounded: return "BOUNDED";
    case Trend::Growing: return "GROWING";
    case Trend::Undetermined: return "UNDETERMINED";
  }
  return "UNDETERMINED";
}

Trend classify_trend(const std::vector<std::pair<double, double>>& curve) {
  if (curve.size() < 3) return Trend::Undetermined;
  const double a = curve[curve.size() - 3].second;
  const double b = curve[curve.size() - 2].second;
  const double c = curve.back().second;
  auto flat = [](double lo, double hi) { return std::abs(hi - lo) <= 0.01 * std::max(std::abs(hi), 1e-300) || hi == lo; };
  if (flat(a, b) && flat(b, c)) return Trend::Bounded;
  if (b >= 1.2 * a && c >= 1.2 * b && c > 0.0) return Trend::Growing;
  return Trend::Undetermined;
}

DefectCurve defect_curve(const Map& f1, const Map& f2, const std::vector<double>& radii, double grid_spacing,
                         std::size_t budget) {
  DefectCurve c;
  for (double r : radii) {
    const auto d = closeness_defect(f1, f2, r, grid_spacing, budget);
    c.points.emplace_back(r, d.sup_defect);
    c.witnesses.push_back(d.argmax);
  }
  c.classification = classify_trend(c.points);
  return c;
}

CoarseMapCert compose_certs(const CoarseMapCert& outer, const CoarseMapCert& inner) {
  if (!(inner.phi.codomain() == outer.phi.domain())) throw InvalidInput("compose_certs: space mismatch");
  CoarseMapCert c{Map::compose(outer.phi, inner.phi),
                  ControlFunction::max(ControlFunction::compose(outer.L, inner.L),
                                       ControlFunction::compose(inner.L, outer.L)),
                  std::nullopt, std::nullopt};
  if (inner.M_dense && outer.M_dense) c.M_dense = outer.L(*inner.M_dense) + *outer.M_dense;
  return c;
}

ConjugacyReport check_conjugacy(const Map& f, const Map& g, const CoarseMapCert& phi, const CoarseMapCert& psi,
                                const std::vector<double>& radii, double grid_spacing, std::size_t budget) {
  const Space& X = f.domain();
  const Space& Y = g.domain();
  if (!(phi.phi.domain() == X) || !(phi.phi.codomain() == Y) || !(psi.phi.domain() == Y) || !(psi.phi.codomain() == X))
    throw InvalidInput("check_conjugacy: phi must map X to Y and psi Y to X");
  ConjugacyReport r;
  r.K_phi = defect_curve(Map::compose(phi.phi, f), Map::compose(g, phi.phi), radii, grid_spacing, budget);
  r.K_psi = defect_curve(Map::compose(psi.phi, g), Map::compose(f, psi.phi), radii, grid_spacing, budget);
  r.psi_phi = defect_curve(Map::compose(psi.phi, phi.phi), Map::identity(X), radii, grid_spacing, budget);
  r.phi_psi = defect_curve(Map::compose(phi.phi, psi.phi), Map::identity(Y), radii, grid_spacing, budget);
  return r;
}

std::string to_json(const DefectCurve& c) {
  nlohmann::json j;
  j["defect_curve"] = nlohmann::json::array();
  for (const auto& [r, d] : c.points) j["defect_curve"].push_back({r, d});
  j["classification"] = trend_name(c.classification);
  j["witnesses"] = nlohmann::json::array();
  for (const Point& p : c.witnesses) {
    nlohmann::json row = nlohmann::json::array();
    row.push_back(p.chart);
    for (double v : p.coords) row.push_back(v);
    j["witnesses"].push_back(std::move(row));
  }
  return j.dump();
}

}  // namespace coarsent
