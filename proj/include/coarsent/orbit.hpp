#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coarsent/control.hpp"
#include "coarsent/map.hpp"
#include "coarsent/point.hpp"

namespace coarsent {

struct CoarseMapCert;

/// A finite sequence (x_0, ..., x_n) with its step tolerance.
struct PseudoOrbit {
  std::vector<Point> points;
  double delta = 0.0;
  std::string map_id;

  std::size_t length() const { return points.empty() ? 0 : points.size() - 1; }
  bool operator==(const PseudoOrbit&) const = default;
};

struct Validation {
  bool valid = true;
  /// Index i of the first step with d(f(x_i), x_{i+1}) > delta, or of the first
  /// non-member point.
  std::optional<std::size_t> first_violation;
};

Validation validate(const Map& f, const PseudoOrbit& orbit);

/// max_i d(a_i, b_i).
double orbit_distance(const Space& space, const PseudoOrbit& a, const PseudoOrbit& b);

/// All grid pseudoorbits of length n from x0: successors of x_i are the grid
/// points within delta of f(x_i). Depth-first, lattice order at each level.
/// Throws BudgetExceeded when more than `budget` orbits are produced.
std::vector<PseudoOrbit> enumerate(const Map& f, const Point& x0, int n, double delta, double spacing,
                                   std::size_t budget = 10'000'000);

enum class Provenance { Lower, Upper };

/// Final terms of grid pseudoorbits, one level per step. Level j holds every
/// grid point z within delta of f(y) for some y on level j-1 (level 0 = {x0}),
/// so each point is the final term of a reconstructible pseudoorbit.
struct FinalTermSet {
  std::vector<std::vector<Point>> levels;
  std::vector<std::vector<std::uint32_t>> parents;  ///< parents[j][i] indexes levels[j-1]
  double delta = 0.0;
  Provenance provenance = Provenance::Lower;

  int n() const { return static_cast<int>(levels.size()) - 1; }
  const std::vector<Point>& points() const { return levels.back(); }
  /// Explicit pseudoorbit ending at levels[level][index].
  PseudoOrbit reconstruct(std::size_t level, std::size_t index) const;
};

/// Builds levels 0..n. `budget` caps the points of any single level.
FinalTermSet final_terms_lower(const Map& f, const Point& x0, int n, double delta, double spacing,
                               std::size_t budget = 10'000'000);

/// Streams levels 1..n of the same closure without keeping earlier levels.
void for_each_final_level(const Map& f, const Point& x0, int n, double delta, double spacing, std::size_t budget,
                          const std::function<void(int, const std::vector<Point>&)>& visit);

/// Ellipsoid f^n(B(x0-orbit, r)) for an expanding linear map.
struct Ellipsoid {
  std::vector<double> center;
  std::vector<double> semi_axes;             ///< descending
  std::vector<std::vector<double>> axes;     ///< unit principal directions
};

/// Hull containing every final term of a delta-pseudoorbit of length n:
/// f^n(B(delta / (lambda - 1))) around f^n(x0).
Ellipsoid shadow_hull(const Map& f, const Point& x0, int n, double delta);

/// Every k-th point, with tolerance eta_k(L, delta); valid for f^k.
PseudoOrbit subsample(const PseudoOrbit& orbit, int k, const ControlFunction& L);

/// Pointwise image under cert.phi with tolerance L(delta) + K.
PseudoOrbit push_forward(const PseudoOrbit& orbit, const CoarseMapCert& cert);

/// {"delta": d, "points": [[chart, coords...], ...]}
std::string to_json_line(const PseudoOrbit& orbit);
PseudoOrbit from_json_line(const std::string& line);

}  // namespace coarsent
