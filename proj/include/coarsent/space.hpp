#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "coarsent/point.hpp"

namespace coarsent {

/// Base set A of a cone, as a subset of the unit sphere.
struct BaseSetSpec {
  enum class Kind { FullSphere, FiniteAngles, CantorArc };
  Kind kind = Kind::FullSphere;
  /// FiniteAngles: polar angles in radians (q == 2 only).
  std::vector<double> angles;
  /// CantorArc: number of middle-thirds refinement steps.
  int levels = 0;
  /// CantorArc: angular length of the arc carrying [0,1], starting at angle 0.
  double arc = 1.0;
  /// FullSphere: number of equally spaced directions used to represent the circle.
  int resolution = 360;
};

/// Unit vectors representing the base set. q must be 2 for all kinds but FullSphere.
std::vector<std::vector<double>> generate_base_points(std::size_t q, const BaseSetSpec& spec);

/// Angles of the truncated middle-thirds Cantor set (left endpoints), mapped onto [0, arc].
std::vector<double> cantor_arc_angles(int levels, double arc);

enum class ChainRule {
  Rectangles,  ///< P_{2m} is 1 x 2^m, P_{2m+1} is 2^m x 1, anchored at the centre
  SegmentsF,   ///< unit first segment, the "f" length rule, anchored at the left end
  SegmentsG,   ///< unit first segment, the "g" length rule, anchored at the left end
};

/// Growth factor (1 or 2) applied to segment n to get segment n+1.
double segment_growth(ChainRule rule, std::size_t n);

class Space;

namespace detail {
struct SpaceNode;
}

/// Immutable, cheaply copyable handle to a computable metric space.
class Space {
 public:
  static Space euclidean(std::size_t q);
  static Space halfplane();
  static Space half_line(double lower);
  static Space integers(std::size_t q);
  static Space cone(std::size_t q, BaseSetSpec base, double tolerance = 1e-9);
  static Space chain(ChainRule rule, std::size_t blocks);
  /// Half-line with R^{2^j} attached at every integer j <= max_level.
  static Space spider(std::size_t max_level);
  static Space product(Space left, Space right);

  enum class Kind { Euclidean, Halfplane, HalfLine, Integers, Cone, Chain, Spider, Product };
  Kind kind() const;

  /// Dimension of a chart, or nullopt when the chart id is invalid.
  std::optional<std::size_t> chart_dim(std::size_t chart) const;
  /// Common chart dimension when every chart has the same one.
  std::optional<std::size_t> uniform_dim() const;
  std::size_t chart_count() const;

  bool contains(const Point& p) const;
  /// Cone membership with an explicit angular-chord tolerance.
  bool contains(const Point& p, double cone_tolerance) const;

  /// Exact metric. Throws InvalidInput on an invalid chart or dimension mismatch.
  double distance(const Point& a, const Point& b) const;

  /// Lower bound on the distance between any points of two charts.
  double chart_gap(std::size_t a, std::size_t b) const;

  /// Distinguished base point (origin, c_0, lower end of a half-line).
  Point origin() const;

  /// Visits the grid points of the space within `radius` of `center`, in no
  /// particular order. The scratch point passed to `visit` is reused.
  /// Throws BudgetExceeded once more than `budget` points have been visited.
  void for_each_lattice_point(const Point& center, double radius, double spacing,
                              std::size_t budget,
                              const std::function<void(const Point&)>& visit) const;

  /// Grid points within `radius` of `center`, chart ascending then lexicographic.
  std::vector<Point> lattice_region(const Point& center, double radius, double spacing,
                                    std::size_t budget = 10'000'000) const;

  /// Random member point at distance at most `radius` from `center`.
  Point sample(std::mt19937_64& rng, const Point& center, double radius) const;

  /// Canonical textual description; equal iff the descriptors are equal.
  const std::string& key() const;

  // Kind-specific accessors.
  std::size_t dimension() const;  ///< Euclidean / Integers / Cone ambient dimension
  double lower_bound() const;     ///< HalfLine
  const std::vector<std::vector<double>>& cone_base() const;
  const BaseSetSpec& cone_spec() const;
  double cone_tolerance() const;
  ChainRule chain_rule() const;
  std::size_t chain_blocks() const;
  /// Extents (width, height) of a rectangle block, or (length) of a segment block.
  const std::vector<double>& block_extent(std::size_t block) const;
  std::size_t spider_max_level() const;
  const Space& left() const;
  const Space& right() const;

  /// Product chart encoding.
  static std::size_t product_chart(std::size_t left, std::size_t right) { return (left << 32) | right; }
  static std::size_t product_left_chart(std::size_t c) { return c >> 32; }
  static std::size_t product_right_chart(std::size_t c) { return c & 0xffffffffULL; }

  /// Splits a product point into its factors.
  std::pair<Point, Point> split(const Point& p) const;
  /// Joins factor points into a product point.
  Point join(const Point& a, const Point& b) const;

  friend bool operator==(const Space& a, const Space& b) { return a.key() == b.key(); }

 private:
  explicit Space(std::shared_ptr<const detail::SpaceNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::SpaceNode> node_;
};

/// Distance in a chain space between two blocks' anchors: (n+1) + ... + m.
double chain_anchor_gap(std::size_t n, std::size_t m);

}  // namespace coarsent
