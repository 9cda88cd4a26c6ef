#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "coarsent/control.hpp"
#include "coarsent/point.hpp"
#include "coarsent/space.hpp"

namespace coarsent {

/// Dense row-major matrix.
using Matrix = std::vector<std::vector<double>>;

namespace detail {
struct MapNode;
}

/// Immutable handle describing a map between two spaces (usually a self-map).
class Map {
 public:
  enum class Kind {
    Identity,
    Affine,
    Homothety,
    ChainLinear,
    ConjugatedDoubling,
    Iterate,
    Product,
    Power,
    Polynomial,
    Compose,
  };

  static Map identity(Space space);
  /// x -> A x on Euclidean(q).
  static Map linear(Matrix a);
  /// x -> A x + b between Euclidean-like spaces (Euclidean, Integers, Halfplane, HalfLine).
  static Map affine(Space domain, Space codomain, Matrix a, std::vector<double> b);
  /// x -> lambda x on a cone or Euclidean space.
  static Map homothety(Space space, double lambda);
  /// Block n onto block n+1 of a chain space, anchor to anchor, axis-preserving.
  static Map chain_linear(Space chain);
  /// g = phi o f o phi^{-1} on the half-plane, with f(x, y) = (2x, y).
  static Map conjugated_doubling();
  static Map iterate(Map base, int k);
  static Map product(Map left, Map right);
  /// x -> x^p on a half-line [a, inf) with a >= 2.
  static Map power(Space half_line, double exponent);
  /// x -> sum c_i x^i + sum d_j x^{-j} (j >= 1) between one-dimensional spaces.
  static Map polynomial(Space domain, Space codomain, std::vector<double> coeffs,
                        std::vector<double> inverse_coeffs = {});
  /// outer o inner.
  static Map compose(Map outer, Map inner);

  Kind kind() const;
  const Space& domain() const;
  const Space& codomain() const;
  bool is_self_map() const { return domain() == codomain(); }

  /// Exact image. Throws InvalidInput for non-member input or an image that
  /// leaves a truncated domain.
  Point apply(const Point& p) const;
  /// apply composed k times (k >= 1).
  Point iterate_apply(int k, const Point& p) const;

  /// Matrix of a linear/affine map.
  const Matrix& matrix() const;
  const std::vector<double>& offset() const;
  double lambda() const;  ///< homothety factor
  const Map& base() const;
  int power_k() const;
  const Map& left() const;
  const Map& right() const;
  double exponent() const;
  const std::vector<double>& coeffs() const;
  const std::vector<double>& inverse_coeffs() const;

  /// Eigenvalues when the matrix is triangular (diagonal included); nullopt otherwise.
  std::optional<std::vector<double>> triangular_eigenvalues() const;
  /// Minimal expansion constant lambda > 1 for shadowing: declared, or min |eigenvalue|
  /// for triangular matrices, or the homothety factor.
  std::optional<double> expansion_constant() const;
  /// Lipschitz constant: declared, or the operator norm of a linear map, or the homothety factor.
  std::optional<double> lipschitz_constant() const;
  /// Product of |eigenvalues| > 1: declared, or exact for triangular matrices.
  std::optional<double> big_lambda() const;

  /// Returns a copy carrying user-declared constants (used by the entropy strategies).
  Map with_declared(std::optional<double> expansion, std::optional<double> lipschitz,
                    std::optional<double> big_lambda) const;

  std::string describe() const;

 private:
  explicit Map(std::shared_ptr<const detail::MapNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::MapNode> node_;
};

/// Squeezing homeomorphism of the half-plane used by conjugated_doubling, and its closed-form inverse.
Point squeeze(const Point& p);
Point squeeze_inverse(const Point& p);

/// Operator norm (largest singular value) of a matrix.
double operator_norm(const Matrix& a);

/// Optional declared control for a map.
struct ControlWitness {
  std::optional<ControlFunction> L;
  std::optional<double> lipschitz_lambda;
};

struct ControlReport {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;
  std::vector<std::pair<Point, Point>> witnesses;  ///< first few violating pairs
};

/// Samples random member pairs within `region_radius` of the domain origin and
/// checks d(f x, f x') <= L(d(x, x')). Deterministic given the seed.
ControlReport verify_control(const Map& map, const ControlWitness& witness, double region_radius,
                             std::size_t samples, std::uint64_t seed);

}  // namespace coarsent
