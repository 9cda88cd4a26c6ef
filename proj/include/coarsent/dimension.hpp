#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "coarsent/point.hpp"
#include "coarsent/space.hpp"

namespace coarsent {

struct DimensionEstimate {
  std::vector<std::pair<double, double>> scales;  ///< (epsilon, spanning count)
  double fitted_dimension = 0.0;
  double fit_residual = 0.0;
};

struct Region {
  Point center;
  double radius = 0.0;
  std::optional<std::pair<std::vector<double>, std::vector<double>>> box;  ///< optional coordinate clip
};

/// Greedy spanning counts of the lattice region at spacing epsilon * spacing_factor,
/// slope of log count against -log epsilon.
DimensionEstimate bcd_estimate(const Space& space, const Region& region, const std::vector<double>& epsilons,
                               double spacing_factor = 0.25, std::size_t budget = 10'000'000);

}  // namespace coarsent
