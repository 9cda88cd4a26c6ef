#include "coarsent/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace coarsent {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "+INFINITY" : (v < 0 ? "-INFINITY" : "NAN");
}

}  // namespace

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
    return std::string(buf, p);
  }
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void write_csv(std::ostream& os, const std::vector<CountRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.n << ',' << format_number(r.delta) << ',' << format_number(r.R) << ',' << strategy_name(r.strategy) << ',';
    if (r.separated_lower) os << format_number(*r.separated_lower);
    os << ',';
    if (r.spanning_upper) os << format_number(*r.spanning_upper);
    os << '\n';
  }
}

std::string to_csv(const std::vector<CountRecord>& records) {
  std::ostringstream os;
  write_csv(os, records);
  return os.str();
}

json point_json(const Point& p) {
  json row = json::array();
  row.push_back(p.chart);
  for (double v : p.coords) row.push_back(v);
  return row;
}

json to_json(const GrowthFit& g) {
  return {{"slope", g.slope}, {"intercept", g.intercept}, {"residual", g.residual}, {"fit_window", {g.n_lo, g.n_hi}}};
}

json to_json(const EntropyEstimate& e) {
  json j;
  j["grid"] = json::array();
  for (const auto& g : e.grid) {
    json c = {{"delta", g.delta}, {"R", g.R}};
    c["slope_lower"] = g.lower ? json(g.lower->slope) : json(nullptr);
    c["slope_upper"] = g.upper ? json(g.upper->slope) : json(nullptr);
    c["lower_fit"] = g.lower ? to_json(*g.lower) : json(nullptr);
    c["upper_fit"] = g.upper ? to_json(*g.upper) : json(nullptr);
    j["grid"].push_back(std::move(c));
  }
  j["stabilization"] = json::array();
  for (const auto& d : e.per_delta)
    j["stabilization"].push_back({{"delta", d.delta},
                                  {"lower", opt(d.lower)},
                                  {"upper", opt(d.upper)},
                                  {"R_lower", d.R_lower},
                                  {"R_upper", d.R_upper},
                                  {"stabilized_lower", d.stabilized_lower},
                                  {"stabilized_upper", d.stabilized_upper}});
  j["extrapolated_value"] = finite_or_string(e.value());
  j["extrapolated_lower"] = opt(e.extrapolated_lower);
  j["extrapolated_upper"] = opt(e.extrapolated_upper);
  j["infinity_flag"] = e.infinite;
  j["provenance"] = provenance_name(e.provenance);
  j["budget_exhausted"] = e.budget_exhausted;
  j["errors"] = e.errors;
  return j;
}

json to_json(const DimensionEstimate& d) {
  json j;
  j["scales"] = json::array();
  for (const auto& [eps, c] : d.scales) j["scales"].push_back({eps, c});
  j["fitted_dimension"] = d.fitted_dimension;
  j["fit_residual"] = d.fit_residual;
  return j;
}

json defect_json(const DefectCurve& c) { return json::parse(to_json(c)); }

json to_json(const ConjugacyReport& r) {
  return {{"K_phi", defect_json(r.K_phi)},
          {"K_psi", defect_json(r.K_psi)},
          {"inverse_defects", {{"psi_phi", defect_json(r.psi_phi)}, {"phi_psi", defect_json(r.phi_psi)}}}};
}

json to_json(const ProductCounts& p) {
  return {{"left_separated", p.left_separated},
          {"left_spanning", p.left_spanning},
          {"right_separated", p.right_separated},
          {"right_spanning", p.right_spanning},
          {"raw_separated", p.raw_separated},
          {"raw_spanning", p.raw_spanning},
          {"separated_lower", p.separated_lower},
          {"spanning_upper", p.spanning_upper},
          {"product_of_separated_is_separated", p.product_of_separated_is_separated},
          {"product_of_spanning_is_spanning", p.product_of_spanning_is_spanning}};
}

json to_json(const EmbeddingReport& r) {
  auto pairs = [](const std::vector<std::pair<Point, Point>>& w) {
    json a = json::array();
    for (const auto& [x, y] : w) a.push_back({point_json(x), point_json(y)});
    return a;
  };
  return {{"samples", r.samples},
          {"upper_violations", r.upper_violations},
          {"lower_violations", r.lower_violations},
          {"upper_witnesses", pairs(r.upper_witnesses)},
          {"lower_witnesses", pairs(r.lower_witnesses)},
          {"passed", r.passed()}};
}

json to_json(const DensityReport& r) {
  return {{"max_gap", r.max_gap}, {"argmax", point_json(r.argmax)}, {"slack", r.slack}, {"flagged", r.flagged}};
}

}  // namespace coarsent
