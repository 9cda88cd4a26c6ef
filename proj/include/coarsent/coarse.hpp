#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarsent/control.hpp"
#include "coarsent/map.hpp"

namespace coarsent {

/// A map between two spaces together with declared coarse budgets.
struct CoarseMapCert {
  Map phi;
  ControlFunction L;
  std::optional<double> K_close;  ///< semiconjugacy closeness budget
  std::optional<double> M_dense;  ///< density budget of the image
};

struct EmbeddingReport {
  std::size_t samples = 0;
  std::size_t upper_violations = 0;
  std::size_t lower_violations = 0;
  std::vector<std::pair<Point, Point>> upper_witnesses;
  std::vector<std::pair<Point, Point>> lower_witnesses;
  bool passed() const { return upper_violations == 0 && lower_violations == 0; }
};

/// Checks d(phi x, phi x') <= L(d(x, x')) and d(x, x') <= L(d(phi x, phi x'))
/// on seeded member pairs within `region_radius` of the domain origin.
EmbeddingReport check_embedding(const CoarseMapCert& cert, double region_radius, std::size_t samples,
                                std::uint64_t seed);

struct DensityReport {
  double max_gap = 0.0;
  Point argmax;
  double slack = 0.0;
  bool flagged = false;  ///< max_gap > M + slack
};

/// Max over a codomain lattice of the distance to the image of a domain lattice.
DensityReport check_density(const CoarseMapCert& cert, double codomain_region_radius, double grid_spacing,
                            std::size_t budget = 10'000'000);

struct DefectResult {
  double sup_defect = 0.0;
  Point argmax;
};

/// sup over the domain lattice within `region_radius` of the domain origin of d(f1 x, f2 x).
DefectResult closeness_defect(const Map& f1, const Map& f2, double region_radius, double grid_spacing,
                              std::size_t budget = 10'000'000);

enum class Trend { Bounded, Growing, Undetermined };
const char* trend_name(Trend t);

/// BOUNDED: defect changes by at most 1% across each of the last two radius
/// doublings. GROWING: defect grows by at least 20% across each of them.
Trend classify_trend(const std::vector<std::pair<double, double>>& curve);

struct DefectCurve {
  std::vector<std::pair<double, double>> points;  ///< (radius, sup defect)
  std::vector<Point> witnesses;
  Trend classification = Trend::Undetermined;
};

DefectCurve defect_curve(const Map& f1, const Map& f2, const std::vector<double>& radii, double grid_spacing,
                         std::size_t budget = 10'000'000);

/// Composition of certificates: controls compose, density budgets add up.
CoarseMapCert compose_certs(const CoarseMapCert& outer, const CoarseMapCert& inner);

struct ConjugacyReport {
  DefectCurve K_phi;      ///< phi o f vs g o phi on X
  DefectCurve K_psi;      ///< psi o g vs f o psi on Y
  DefectCurve psi_phi;    ///< psi o phi vs id_X
  DefectCurve phi_psi;    ///< phi o psi vs id_Y
};

/// Four empirical sup-defects over nested regions (radii doubling up to `region_radius`).
ConjugacyReport check_conjugacy(const Map& f, const Map& g, const CoarseMapCert& phi, const CoarseMapCert& psi,
                                const std::vector<double>& radii, double grid_spacing,
                                std::size_t budget = 10'000'000);

std::string to_json(const DefectCurve& c);

}  // namespace coarsent
