#include "coarsent/dimension.hpp"

#include <algorithm>
#include <cmath>

#include "coarsent/error.hpp"
#include "coarsent/greedy.hpp"

namespace coarsent {

DimensionEstimate bcd_estimate(const Space& space, const Region& region, const std::vector<double>& epsilons,
                               double spacing_factor, std::size_t budget) {
  if (epsilons.size() < 2) throw InvalidInput("bcd_estimate needs at least two scales");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw InvalidInput("bcd scales must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw InvalidInput("bcd scales must be decreasing");
  }
  if (!(spacing_factor > 0.0) || spacing_factor > 0.5) throw InvalidInput("bcd spacing factor must be in (0, 1/2]");
  DimensionEstimate est;
  for (double eps : epsilons) {
    std::vector<Point> pts;
    if (region.radius > 0.0) {
      pts = space.lattice_region(region.center, region.radius, eps * spacing_factor, budget);
    } else {
      pts.push_back(region.center);
    }
    if (region.box) {
      const auto& [lo, hi] = *region.box;
      std::erase_if(pts, [&](const Point& p) {
        for (std::size_t i = 0; i < p.coords.size() && i < lo.size(); ++i)
          if (p.coords[i] < lo[i] - 1e-12 || p.coords[i] > hi[i] + 1e-12) return true;
        return false;
      });
    }
    const double count = pts.empty() ? 1.0 : static_cast<double>(greedy_spanning(space, pts, eps).size());
    est.scales.emplace_back(eps, count);
  }
  const double k = static_cast<double>(est.scales.size());
  double sx = 0, sy = 0;
  for (const auto& [e, c] : est.scales) {
    sx += -std::log(e);
    sy += std::log(c);
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (const auto& [e, c] : est.scales) {
    sxx += (-std::log(e) - mx) * (-std::log(e) - mx);
    sxy += (-std::log(e) - mx) * (std::log(c) - my);
  }
  est.fitted_dimension = std::max(0.0, sxy / sxx);
  double ss = 0;
  for (const auto& [e, c] : est.scales) {
    const double r = std::log(c) - (my + est.fitted_dimension * (-std::log(e) - mx));
    ss += r * r;
  }
  est.fit_residual = std::sqrt(ss / k);
  return est;
}

}  // namespace coarsent
