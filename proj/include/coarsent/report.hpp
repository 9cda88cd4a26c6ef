#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "coarsent/coarse.hpp"
#include "coarsent/dimension.hpp"
#include "coarsent/entropy.hpp"

namespace coarsent {

inline constexpr const char* kCsvHeader = "n,delta,R,strategy,separated_lower,spanning_upper";

/// Shortest decimal that round-trips; integral counts print without exponent.
std::string format_number(double v);

void write_csv(std::ostream& os, const std::vector<CountRecord>& records);
std::string to_csv(const std::vector<CountRecord>& records);

nlohmann::json point_json(const Point& p);
nlohmann::json to_json(const GrowthFit& g);
nlohmann::json to_json(const EntropyEstimate& e);
nlohmann::json to_json(const DimensionEstimate& d);
nlohmann::json defect_json(const DefectCurve& c);
nlohmann::json to_json(const ConjugacyReport& r);
nlohmann::json to_json(const ProductCounts& p);
nlohmann::json to_json(const EmbeddingReport& r);
nlohmann::json to_json(const DensityReport& r);

}  // namespace coarsent
