#include "coarsent/map.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "coarsent/error.hpp"

namespace coarsent {

namespace detail {

struct MapNode {
  Map::Kind kind = Map::Kind::Identity;
  std::optional<Space> domain, codomain;
  Matrix a;
  std::vector<double> b;
  double lambda = 1.0;
  int k = 1;
  double exponent = 2.0;
  std::vector<double> coeffs, inverse_coeffs;
  std::vector<Map> parts;
  std::optional<double> declared_expansion, declared_lipschitz, declared_big_lambda;
};

}  // namespace detail

namespace {

bool euclidean_like(const Space& s) {
  switch (s.kind()) {
    case Space::Kind::Euclidean:
    case Space::Kind::Integers:
    case Space::Kind::Halfplane:
    case Space::Kind::HalfLine: return true;
    case Space::Kind::Cone: return s.cone_spec().kind == BaseSetSpec::Kind::FullSphere;
    default: return false;
  }
}

void require_member(const Space& s, const Point& p, const char* what) {
  if (!s.contains(p)) {
    std::ostringstream os;
    os << what << ": point " << p << " is not a member of the domain";
    throw InvalidInput(os.str());
  }
}

std::string matrix_text(const Matrix& a) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (const auto& row : a) {
    os << '[';
    for (double v : row) os << v << ',';
    os << ']';
  }
  os << ']';
  return os.str();
}

}  // namespace

Point squeeze(const Point& p) {
  const double x = p.coords.at(0), y = p.coords.at(1);
  const double ey = std::exp(y);
  if (x > ey) return Point(0, {x - ey + 1.0, y});
  if (x < -ey) return Point(0, {x + ey - 1.0, y});
  return Point(0, {x / ey, y});
}

Point squeeze_inverse(const Point& p) {
  const double x = p.coords.at(0), y = p.coords.at(1);
  const double ey = std::exp(y);
  if (x > 1.0) return Point(0, {x + ey - 1.0, y});
  if (x < -1.0) return Point(0, {x - ey + 1.0, y});
  return Point(0, {x * ey, y});
}

double operator_norm(const Matrix& a) {
  if (a.empty()) return 0.0;
  Eigen::MatrixXd m(a.size(), a[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i][j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// ---------------------------------------------------------------------------

Map Map::identity(Space space) {
  auto n = std::make_shared<detail::MapNode>();
  n->kind = Kind::Identity;
  n->domain = space;
  n->codomain = space;
  return Map(n);
}

Map Map::linear(Matrix a) {
  const std::size_t q = a.size();
  return affine(Space::euclidean(q), Space::euclidean(q), std::move(a), std::vector<double>(q, 0.0));
}

Map Map::affine(Space domain, Space codomain, Matrix a, std::vector<double> b) {
  if (!euclidean_like(domain) || !euclidean_like(codomain))
    throw InvalidInput("affine maps need Euclidean-like domain and codomain");
  const std::size_t rows = *codomain.chart_dim(0), cols = *domain.chart_dim(0);
  if (a.size() != rows) throw InvalidInput("affine matrix row count must equal codomain dimension");
  for (const auto& r : a)
    if (r.size() != cols) throw InvalidInput("affine matrix column count must equal domain dimension");
  if (b.empty()) b.assign(rows, 0.0);
  if (b.size() != rows) throw InvalidInput("affine offset length must equal codomain dimension");
  auto n = std::make_shared<detail::MapNode>();
  n->kind = Kind::Affine;
  n->domain = std::move(domain);
  n->codomain = std::move(codomain);
  n->a = std::move(a);
  n->b = std::move(b);
  return Map(n);
}

Map Map::homothety(Space space, double lambda) {
  if (space.kind() != Space::Kind::Cone && space.kind() != Space::Kind::Euclidean)
    throw InvalidInput("homothety needs a cone or Euclidean space");
  if (!(lambda > 0.0)) throw InvalidInput("homothety factor must be positive");
  auto n = std::make_shared<detail::MapNode>();
  n->kind = Kind::Homothety;
  n->domain = space;
  n->codomain = space;
  n->lambda = lambda;
  return Map(n);
}

Map Map::chain_linear(Space chain) {
  if (chain.kind() != Space::Kind::Chain) throw InvalidInput("chain_linear needs a chain space");
  auto n = std::make_shared<detail::MapNode>();
  n->kind = Kind::ChainLinear;
  n->domain = chain;
  n->codomain = chain;
  return Map(n);
}

Map Map::conjugated_doubling() {
  auto n = std::make_shared<detail::MapNode>();
  n->kind = Kind::ConjugatedDoubling;
  n->domain = Space::halfplane();
  n->codomain = n->domain;
  return Map(n);
}

Map Map::iterate(Map base, int k) {
  if (k < 1) throw InvalidInput("iterate needs k >= 1");
  if (!base.is_self_map()) throw InvalidInput("iterate needs a self-map");
  auto n = std::make_shared<detail::MapNode>();
  n->kind = Kind::Iterate;
  n->domain = base.domain();
  n->codomain = base.codomain();
  n->k = k;
  n->parts = {std::move(base)};
  return Map(n);
}

Map Map::product(Map left, Map right) {
  auto n = std::make_shared<detail::MapNode>();
  n->kind = Kind::Product;
  n->domain = Space::product(left.domain(), right.domain());
  n->codomain = Space::product(left.codomain(), right.codomain());
  n->parts = {std::move(left), std::move(right)};
  return Map(n);
}

Map Map::power(Space half_line, double exponent) {
  if (half_line.kind() != Space::Kind::HalfLine || half_line.lower_bound() < 2.0)
    throw InvalidInput("power map needs a half-line [a, inf) with a >= 2");
  if (!(exponent >= 1.0)) throw InvalidInput("power map exponent must be >= 1");
  auto n = std::make_shared<detail::MapNode>();
  n->kind = Kind::Power;
  n->domain = half_line;
  n->codomain = half_line;
  n->exponent = exponent;
  return Map(n);
}

Map Map::polynomial(Space domain, Space codomain, std::vector<double> coeffs, std::vector<double> inverse_coeffs) {
  if (!euclidean_like(domain) || !euclidean_like(codomain) || *domain.chart_dim(0) != 1 || *codomain.chart_dim(0) != 1)
    throw InvalidInput("polynomial maps act between one-dimensional spaces");
  auto n = std::make_shared<detail::MapNode>();
  n->kind = Kind::Polynomial;
  n->domain = std::move(domain);
  n->codomain = std::move(codomain);
  n->coeffs = std::move(coeffs);
  n->inverse_coeffs = std::move(inverse_coeffs);
  return Map(n);
}

Map Map::compose(Map outer, Map inner) {
  if (!(inner.codomain() == outer.domain())) throw InvalidInput("compose: inner codomain differs from outer domain");
  auto n = std::make_shared<detail::MapNode>();
  n->kind = Kind::Compose;
  n->domain = inner.domain();
  n->codomain = outer.codomain();
  n->parts = {std::move(outer), std::move(inner)};
  return Map(n);
}

Map Map::with_declared(std::optional<double> expansion, std::optional<double> lipschitz,
                       std::optional<double> big_lambda) const {
  auto n = std::make_shared<detail::MapNode>(*node_);
  if (expansion) n->declared_expansion = expansion;
  if (lipschitz) n->declared_lipschitz = lipschitz;
  if (big_lambda) n->declared_big_lambda = big_lambda;
  return Map(n);
}

// ---------------------------------------------------------------------------

Map::Kind Map::kind() const { return node_->kind; }
const Space& Map::domain() const { return *node_->domain; }
const Space& Map::codomain() const { return *node_->codomain; }
const Matrix& Map::matrix() const { return node_->a; }
const std::vector<double>& Map::offset() const { return node_->b; }
double Map::lambda() const { return node_->lambda; }
const Map& Map::base() const { return node_->parts.at(0); }
int Map::power_k() const { return node_->k; }
const Map& Map::left() const { return node_->parts.at(0); }
const Map& Map::right() const { return node_->parts.at(1); }
double Map::exponent() const { return node_->exponent; }
const std::vector<double>& Map::coeffs() const { return node_->coeffs; }
const std::vector<double>& Map::inverse_coeffs() const { return node_->inverse_coeffs; }

Point Map::apply(const Point& p) const {
  const auto& n = *node_;
  switch (n.kind) {
    case Kind::Identity:
      require_member(domain(), p, "identity");
      return p;
    case Kind::Affine: {
      require_member(domain(), p, "affine");
      Point out(0, n.b);
      for (std::size_t i = 0; i < n.a.size(); ++i)
        for (std::size_t j = 0; j < p.coords.size(); ++j) out.coords[i] += n.a[i][j] * p.coords[j];
      if (!codomain().contains(out)) throw InvalidInput("affine image leaves the codomain");
      return out;
    }
    case Kind::Homothety: {
      require_member(domain(), p, "homothety");
      Point out = p;
      for (double& c : out.coords) c *= n.lambda;
      return out;
    }
    case Kind::ChainLinear: {
      require_member(domain(), p, "chain_linear");
      const Space& s = domain();
      if (p.chart + 1 >= s.chain_blocks()) throw InvalidInput("chain image leaves the truncated chain");
      const auto& from = s.block_extent(p.chart);
      const auto& to = s.block_extent(p.chart + 1);
      Point out(p.chart + 1, p.coords);
      for (std::size_t i = 0; i < out.coords.size(); ++i) out.coords[i] *= to[i] / from[i];
      return out;
    }
    case Kind::ConjugatedDoubling: {
      require_member(domain(), p, "conjugated_doubling");
      Point u = squeeze_inverse(p);
      u.coords[0] *= 2.0;
      return squeeze(u);
    }
    case Kind::Iterate: {
      Point out = p;
      for (int i = 0; i < n.k; ++i) out = base().apply(out);
      return out;
    }
    case Kind::Product: {
      require_member(domain(), p, "product");
      auto [a, b] = domain().split(p);
      return codomain().join(left().apply(a), right().apply(b));
    }
    case Kind::Power:
      require_member(domain(), p, "power");
      return Point(0, {std::pow(p.coords[0], n.exponent)});
    case Kind::Polynomial: {
      require_member(domain(), p, "polynomial");
      const double x = p.coords[0];
      double y = 0.0, xp = 1.0;
      for (double c : n.coeffs) {
        y += c * xp;
        xp *= x;
      }
      if (!n.inverse_coeffs.empty()) {
        if (x == 0.0) throw InvalidInput("polynomial map with inverse powers evaluated at 0");
        double ip = 1.0;
        for (double d : n.inverse_coeffs) {
          ip /= x;
          y += d * ip;
        }
      }
      Point out(0, {y});
      if (!codomain().contains(out)) throw InvalidInput("polynomial image leaves the codomain");
      return out;
    }
    case Kind::Compose: return left().apply(right().apply(p));
  }
  return p;
}

Point Map::iterate_apply(int k, const Point& p) const {
  if (k < 1) throw InvalidInput("iterate_apply needs k >= 1");
  Point out = p;
  for (int i = 0; i < k; ++i) out = apply(out);
  return out;
}

std::optional<std::vector<double>> Map::triangular_eigenvalues() const {
  const auto& n = *node_;
  if (n.kind == Kind::Identity && domain().uniform_dim()) return std::vector<double>(*domain().uniform_dim(), 1.0);
  if (n.kind == Kind::Homothety && domain().kind() == Space::Kind::Euclidean)
    return std::vector<double>(domain().dimension(), n.lambda);
  if (n.kind != Kind::Affine || n.a.size() != n.a[0].size()) return std::nullopt;
  const std::size_t q = n.a.size();
  bool upper = true, lower = true;
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      if (i > j && n.a[i][j] != 0.0) upper = false;
      if (i < j && n.a[i][j] != 0.0) lower = false;
    }
  if (!upper && !lower) return std::nullopt;
  std::vector<double> ev(q);
  for (std::size_t i = 0; i < q; ++i) ev[i] = n.a[i][i];
  return ev;
}

std::optional<double> Map::expansion_constant() const {
  const auto& n = *node_;
  if (n.declared_expansion) return n.declared_expansion;
  if (n.kind == Kind::Homothety) return n.lambda > 1.0 ? std::optional<double>(n.lambda) : std::nullopt;
  if (auto ev = triangular_eigenvalues()) {
    double m = INFINITY;
    for (double e : *ev) m = std::min(m, std::abs(e));
    if (m > 1.0) return m;
  }
  return std::nullopt;
}

std::optional<double> Map::lipschitz_constant() const {
  const auto& n = *node_;
  if (n.declared_lipschitz) return n.declared_lipschitz;
  switch (n.kind) {
    case Kind::Identity: return 1.0;
    case Kind::Affine: return operator_norm(n.a);
    case Kind::Homothety: return n.lambda;
    default: return std::nullopt;
  }
}

std::optional<double> Map::big_lambda() const {
  const auto& n = *node_;
  if (n.declared_big_lambda) return n.declared_big_lambda;
  if (auto ev = triangular_eigenvalues()) {
    double p = 1.0;
    for (double e : *ev)
      if (std::abs(e) > 1.0) p *= std::abs(e);
    return p;
  }
  return std::nullopt;
}

std::string Map::describe() const {
  const auto& n = *node_;
  std::ostringstream os;
  os.precision(17);
  switch (n.kind) {
    case Kind::Identity: os << "identity(" << domain().key() << ')'; break;
    case Kind::Affine:
      os << "affine(" << domain().key() << "->" << codomain().key() << ',' << matrix_text(n.a) << ',';
      for (double v : n.b) os << v << ';';
      os << ')';
      break;
    case Kind::Homothety: os << "homothety(" << domain().key() << ',' << n.lambda << ')'; break;
    case Kind::ChainLinear: os << "chain_linear(" << domain().key() << ')'; break;
    case Kind::ConjugatedDoubling: os << "conjugated_doubling"; break;
    case Kind::Iterate: os << "iterate(" << base().describe() << ',' << n.k << ')'; break;
    case Kind::Product: os << "product(" << left().describe() << ',' << right().describe() << ')'; break;
    case Kind::Power: os << "power(" << domain().key() << ',' << n.exponent << ')'; break;
    case Kind::Polynomial:
      os << "polynomial(" << domain().key() << "->" << codomain().key() << ',';
      for (double c : n.coeffs) os << c << ';';
      os << '|';
      for (double c : n.inverse_coeffs) os << c << ';';
      os << ')';
      break;
    case Kind::Compose: os << "compose(" << left().describe() << ',' << right().describe() << ')'; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

ControlReport verify_control(const Map& map, const ControlWitness& witness, double region_radius, std::size_t samples,
                             std::uint64_t seed) {
  if (!witness.L) throw InvalidInput("verify_control needs a declared control function");
  if (samples == 0) throw InvalidInput("verify_control needs at least one sample");
  if (!(region_radius > 0.0)) throw InvalidInput("verify_control needs a positive region radius");
  const ControlFunction& L = *witness.L;
  std::mt19937_64 rng(seed);
  const Space& dom = map.domain();
  const Point center = dom.origin();
  ControlReport rep;
  rep.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const Point x = dom.sample(rng, center, region_radius);
    const Point y = dom.sample(rng, center, region_radius);
    const double d = dom.distance(x, y);
    const double fd = map.codomain().distance(map.apply(x), map.apply(y));
    const double bound = L(d);
    if (bound > 0.0) rep.max_ratio = std::max(rep.max_ratio, fd / bound);
    if (fd > bound + 1e-9 * std::max(1.0, bound)) {
      ++rep.violations;
      if (rep.witnesses.size() < 8) rep.witnesses.emplace_back(x, y);
    }
  }
  return rep;
}

}  // namespace coarsent
