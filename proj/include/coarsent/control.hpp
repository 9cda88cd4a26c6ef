#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace coarsent {

namespace detail {
struct ControlNode;
}

/// Strictly increasing, continuous, unbounded L : [0, inf) -> [0, inf) used in
/// every coarse-map bound.
class ControlFunction {
 public:
  enum class Kind { Affine, PowerAffine, Table, Composed, Max };

  /// t -> a t + b, a > 0, b >= 0.
  static ControlFunction affine(double a, double b = 0.0);
  /// t -> a t^p + b, a > 0, p >= 1, b >= 0.
  static ControlFunction power_affine(double a, double b, double p);
  /// Piecewise-linear through strictly increasing knots (t_i, L_i) starting at t = 0,
  /// continued past the last knot with slope `tail_slope` > 0.
  static ControlFunction table(std::vector<std::pair<double, double>> knots, double tail_slope);
  /// outer(inner(t)).
  static ControlFunction compose(const ControlFunction& outer, const ControlFunction& inner);
  /// max(a(t), b(t)).
  static ControlFunction max(const ControlFunction& a, const ControlFunction& b);

  Kind kind() const;
  double operator()(double t) const;
  /// Smallest t >= 0 with L(t) >= s; 0 when s <= L(0).
  double inverse(double s) const;
  /// L applied k times.
  double iterate(double t, int k) const;

  /// Affine coefficients; only meaningful for Kind::Affine.
  double slope() const;
  double offset() const;

  std::string describe() const;

  friend bool operator==(const ControlFunction& a, const ControlFunction& b) { return a.describe() == b.describe(); }

 private:
  explicit ControlFunction(std::shared_ptr<const detail::ControlNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::ControlNode> node_;
};

/// eta_k = delta + L(delta) + L^2(delta) + ... + L^{k-1}(delta).
double eta(const ControlFunction& L, double delta, int k);

}  // namespace coarsent
