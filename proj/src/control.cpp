#include "coarsent/control.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "coarsent/error.hpp"

namespace coarsent {

namespace detail {

struct ControlNode {
  ControlFunction::Kind kind = ControlFunction::Kind::Affine;
  double a = 1.0, b = 0.0, p = 1.0;
  std::vector<std::pair<double, double>> knots;
  double tail = 1.0;
  std::vector<ControlFunction> parts;
};

}  // namespace detail

ControlFunction ControlFunction::affine(double a, double b) {
  if (!(a > 0.0) || !(b >= 0.0)) throw InvalidInput("affine control needs a > 0 and b >= 0");
  auto n = std::make_shared<detail::ControlNode>();
  n->kind = Kind::Affine;
  n->a = a;
  n->b = b;
  return ControlFunction(n);
}

ControlFunction ControlFunction::power_affine(double a, double b, double p) {
  if (!(a > 0.0) || !(b >= 0.0) || !(p >= 1.0)) throw InvalidInput("power-affine control needs a > 0, b >= 0, p >= 1");
  auto n = std::make_shared<detail::ControlNode>();
  n->kind = Kind::PowerAffine;
  n->a = a;
  n->b = b;
  n->p = p;
  return ControlFunction(n);
}

ControlFunction ControlFunction::table(std::vector<std::pair<double, double>> knots, double tail_slope) {
  if (knots.empty() || knots.front().first != 0.0) throw InvalidInput("table control must start at t = 0");
  if (knots.front().second < 0.0) throw InvalidInput("table control must be nonnegative");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].first > knots[i - 1].first) || !(knots[i].second > knots[i - 1].second))
      throw InvalidInput("table control knots must be strictly increasing");
  if (!(tail_slope > 0.0)) throw InvalidInput("table control needs a positive tail slope");
  auto n = std::make_shared<detail::ControlNode>();
  n->kind = Kind::Table;
  n->knots = std::move(knots);
  n->tail = tail_slope;
  return ControlFunction(n);
}

ControlFunction ControlFunction::compose(const ControlFunction& outer, const ControlFunction& inner) {
  if (outer.kind() == Kind::Affine && inner.kind() == Kind::Affine)
    return affine(outer.slope() * inner.slope(), outer.slope() * inner.offset() + outer.offset());
  auto n = std::make_shared<detail::ControlNode>();
  n->kind = Kind::Composed;
  n->parts = {outer, inner};
  return ControlFunction(n);
}

ControlFunction ControlFunction::max(const ControlFunction& a, const ControlFunction& b) {
  if (a == b) return a;
  auto n = std::make_shared<detail::ControlNode>();
  n->kind = Kind::Max;
  n->parts = {a, b};
  return ControlFunction(n);
}

ControlFunction::Kind ControlFunction::kind() const { return node_->kind; }
double ControlFunction::slope() const { return node_->a; }
double ControlFunction::offset() const { return node_->b; }

double ControlFunction::operator()(double t) const {
  const auto& n = *node_;
  t = std::max(t, 0.0);
  switch (n.kind) {
    case Kind::Affine: return n.a * t + n.b;
    case Kind::PowerAffine: return n.a * std::pow(t, n.p) + n.b;
    case Kind::Table: {
      const auto& k = n.knots;
      if (t >= k.back().first) return k.back().second + n.tail * (t - k.back().first);
      auto it = std::upper_bound(k.begin(), k.end(), t, [](double v, const auto& knot) { return v < knot.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      return lo.second + (hi.second - lo.second) * (t - lo.first) / (hi.first - lo.first);
    }
    case Kind::Composed: return n.parts[0](n.parts[1](t));
    case Kind::Max: return std::max(n.parts[0](t), n.parts[1](t));
  }
  return t;
}

double ControlFunction::inverse(double s) const {
  const auto& n = *node_;
  if (s <= (*this)(0.0)) return 0.0;
  switch (n.kind) {
    case Kind::Affine: return (s - n.b) / n.a;
    case Kind::PowerAffine: return std::pow((s - n.b) / n.a, 1.0 / n.p);
    case Kind::Table: {
      const auto& k = n.knots;
      if (s >= k.back().second) return k.back().first + (s - k.back().second) / n.tail;
      auto it = std::upper_bound(k.begin(), k.end(), s, [](double v, const auto& knot) { return v < knot.second; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      return lo.first + (hi.first - lo.first) * (s - lo.second) / (hi.second - lo.second);
    }
    case Kind::Composed: return n.parts[1].inverse(n.parts[0].inverse(s));
    case Kind::Max: break;
  }
  // Bisection on a strictly increasing function.
  double lo = 0.0, hi = 1.0;
  while ((*this)(hi) < s) {
    hi *= 2.0;
    if (hi > 1e300) throw InvalidInput("control inverse out of range");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < s)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double ControlFunction::iterate(double t, int k) const {
  for (int i = 0; i < k; ++i) t = (*this)(t);
  return t;
}

std::string ControlFunction::describe() const {
  const auto& n = *node_;
  std::ostringstream os;
  os.precision(17);
  switch (n.kind) {
    case Kind::Affine: os << "affine(" << n.a << ',' << n.b << ')'; break;
    case Kind::PowerAffine: os << "power(" << n.a << ',' << n.b << ',' << n.p << ')'; break;
    case Kind::Table:
      os << "table(";
      for (const auto& [t, v] : n.knots) os << t << ':' << v << ';';
      os << n.tail << ')';
      break;
    case Kind::Composed: os << "compose(" << n.parts[0].describe() << ',' << n.parts[1].describe() << ')'; break;
    case Kind::Max: os << "max(" << n.parts[0].describe() << ',' << n.parts[1].describe() << ')'; break;
  }
  return os.str();
}

double eta(const ControlFunction& L, double delta, int k) {
  if (k < 1) throw InvalidInput("eta needs k >= 1");
  double sum = 0.0, term = delta;
  for (int i = 0; i < k; ++i) {
    sum += term;
    term = L(term);
  }
  return sum;
}

}  // namespace coarsent
