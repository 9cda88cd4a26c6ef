#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarsent/map.hpp"
#include "coarsent/orbit.hpp"

namespace coarsent {

enum class Strategy {
  FullEnum,     ///< exhaustive grid family, orbit distance
  FinalTerm,    ///< final terms of the grid family, space metric
  Seeded,       ///< drift prefix, fine seed grid, exact tail
  SpiderAxes,   ///< identity on a spider: axis points at radius R in every reachable attached space
  ShadowHull,   ///< spanning upper bound from the shadowing hull
  Coded,        ///< spanning upper bound from block coding with a Lipschitz constant
};

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& s);
bool is_upper_strategy(Strategy s);

/// Parameters of the Seeded family. Exactly one of prefix / tail is used:
/// the orbit is x_0, p drift steps x_j = f(x_{j-1}) + delta * drift, a seed
/// within delta of f(x_p), then exact images up to x_n.
struct SeededOptions {
  std::vector<double> drift;      ///< empty = no drift
  int tail = -1;                  ///< fixed tail length (prefix = n - 1 - tail)
  int prefix = -1;                ///< fixed prefix length (tail = n - 1 - prefix)
  double seed_spacing = 0.0;      ///< 0 = use the cell spacing
  std::vector<bool> seed_axes;    ///< empty = full lattice ball; otherwise offsets only along marked axes
};

struct StrategyOptions {
  SeededOptions seeded;
  std::size_t budget = 10'000'000;
};

/// One (n, delta, R) count. Counts are stored as doubles because the coded
/// bounds overflow 64-bit integers.
struct CountRecord {
  int n = 0;
  double delta = 0.0;
  double R = 0.0;
  Strategy strategy = Strategy::FinalTerm;
  std::optional<double> separated_lower;
  std::optional<double> spanning_upper;
};

/// Counts for every n in [n_lo, n_hi] and every R, ordered by n then R.
/// Lower strategies fill separated_lower (FullEnum also fills spanning_upper
/// for its own grid family); upper strategies fill spanning_upper.
std::vector<CountRecord> count_series(const Map& f, const Point& x0, double delta, const std::vector<double>& R_list,
                                      int n_lo, int n_hi, Strategy strategy, double spacing,
                                      const StrategyOptions& opts = {});

CountRecord count_separated(const Map& f, const Point& x0, int n, double R, double delta, Strategy strategy,
                            double spacing, const StrategyOptions& opts = {});
CountRecord count_spanning(const Map& f, const Point& x0, int n, double R, double delta, Strategy strategy,
                           double spacing, const StrategyOptions& opts = {});

/// Closed forms of the upper strategies.
double shadow_hull_count(const Map& f, const Point& x0, int n, double R, double delta);
double coded_count(std::size_t q, double lipschitz, int n, double R, double delta);

/// Members of the Seeded family of length n (for audits and tests).
std::vector<PseudoOrbit> seeded_family(const Map& f, const Point& x0, int n, double delta, double spacing,
                                       const SeededOptions& opts);

/// Explicit pseudoorbit realizing a SpiderAxes item.
PseudoOrbit spider_axis_orbit(const Space& spider, int n, double delta, double R, std::size_t level,
                              std::size_t axis, bool negative);

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS deviation of log counts
  int n_lo = 0, n_hi = 0;
};

/// Least-squares slope of log(count) against n over the window.
GrowthFit fit_growth_rate(const std::vector<std::pair<int, double>>& counts, int n_lo, int n_hi);

/// The limsup rule: single-window fit, or, when the residual exceeds 0.1,
/// the largest slope over trailing windows of length >= 5.
GrowthFit fit_limsup(const std::vector<std::pair<int, double>>& counts, int n_lo, int n_hi);

struct ScheduleCell {
  double delta = 1.0;
  std::vector<double> R_list;
  int n_lo = 1, n_hi = 1;
  Strategy lower = Strategy::FinalTerm;
  std::optional<Strategy> upper;
  double spacing = 1.0;
};

struct Schedule {
  std::vector<ScheduleCell> cells;  ///< deltas strictly increasing
  double stabilization_tol = 0.02;
  StrategyOptions options;
};

void validate_schedule(const Schedule& s);

struct GridEntry {
  double delta = 0.0, R = 0.0;
  std::optional<GrowthFit> lower, upper;
};

struct DeltaSummary {
  double delta = 0.0;
  std::optional<double> lower, upper;
  double R_lower = 0.0, R_upper = 0.0;
  bool stabilized_lower = false, stabilized_upper = false;
};

enum class BoundProvenance { LowerOnly, UpperOnly, Bracketed };
const char* provenance_name(BoundProvenance p);

struct EntropyEstimate {
  std::vector<GridEntry> grid;
  std::vector<DeltaSummary> per_delta;
  std::vector<CountRecord> records;
  std::optional<double> extrapolated_lower, extrapolated_upper;
  bool infinite = false;
  BoundProvenance provenance = BoundProvenance::LowerOnly;
  bool budget_exhausted = false;
  std::vector<std::string> errors;

  /// Lower value when present, else the upper one; +inf when flagged infinite.
  double value() const;
};

/// Triple-limit emulation: n-slope per (delta, R), then R-stabilization per
/// delta, then the largest delta. Budget failures are recorded per cell.
EntropyEstimate estimate_entropy(const Map& f, const Point& x0, const Schedule& schedule);

/// Infinity rule: at least three deltas with stabilized slope >= 0.5 * delta * log 2.
bool infinity_flag(const std::vector<DeltaSummary>& per_delta);

// ---------------------------------------------------------------------------
// products

struct ProductCounts {
  double left_separated = 0, left_spanning = 0;
  double right_separated = 0, right_spanning = 0;
  /// Raw first-fit counts on the product family.
  double raw_separated = 0, raw_spanning = 0;
  /// Best certified counts: separated from first-fit seeded with E_left x E_right,
  /// spanning the smaller of the raw count and |S_left x S_right| when that set spans.
  double separated_lower = 0, spanning_upper = 0;
  bool product_of_separated_is_separated = false;
  bool product_of_spanning_is_spanning = false;
};

/// Both families must share n and delta.
ProductCounts count_product(const Space& left_space, const std::vector<PseudoOrbit>& left, const Space& right_space,
                            const std::vector<PseudoOrbit>& right, double R);

/// Lift of an f^k pseudoorbit to an f pseudoorbit: (y_0, f y_0, ..., f^{k-1} y_0, y_1, ...).
PseudoOrbit lift_iterate_orbit(const Map& f, const PseudoOrbit& orbit, int k);

/// First-fit separated count over a family under orbit distance, optionally
/// scanning `priority` members first.
std::vector<std::size_t> separated_orbits(const Space& space, const std::vector<PseudoOrbit>& family, double R,
                                          const std::vector<std::size_t>& priority = {});

}  // namespace coarsent
