#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "coarsent/coarse.hpp"
#include "coarsent/dimension.hpp"
#include "coarsent/entropy.hpp"
#include "coarsent/map.hpp"
#include "coarsent/space.hpp"

namespace coarsent {

using Json = nlohmann::json;

inline constexpr const char* kConfigSchema = "coarsent.experiment/1";

/// A number given either as a JSON number or as a decimal string.
double parse_number(const Json& j);
Space parse_space(const Json& j);
/// Builds a map whose domain is `domain` (the codomain may be overridden in the description).
Map parse_map(const Json& j, const Space& domain);
ControlFunction parse_control(const Json& j);
/// [c0, c1, ...] (chart 0), {"chart": k, "coords": [...]}, or "origin".
Point parse_point(const Json& j, const Space& space);

struct EntropyJob {
  Space space;
  Map map;
  Point x0;
  Schedule schedule;
};

struct BcdJob {
  Space space;
  Region region;
  std::vector<double> epsilons;
  double spacing_factor = 0.25;
};

struct ConjugacyJob {
  Map f, g;
  CoarseMapCert phi, psi;
  std::vector<double> radii;
  double spacing = 1.0;
};

struct DefectJob {
  Map f1, f2;
  std::vector<double> radii;
  double spacing = 1.0;
};

/// Exhaustive families of f and g from their base points, then product counts.
struct ProductJob {
  Map left, right;
  Point left_x0, right_x0;
  int n = 1;
  double delta = 1.0;
  double spacing = 1.0;
  std::vector<double> R_list;
};

struct EmbeddingJob {
  CoarseMapCert cert;
  double radius = 1.0;
  std::size_t samples = 1000;
  std::optional<double> density_radius;
  double density_spacing = 1.0;
};

using JobTask = std::variant<EntropyJob, BcdJob, ConjugacyJob, DefectJob, ProductJob, EmbeddingJob>;

struct Job {
  std::string label;
  JobTask task;
};

const char* job_type_name(const JobTask& t);

struct ExperimentConfig {
  std::string name;
  std::optional<std::string> preset;
  std::vector<Job> jobs;
  std::size_t budget = 10'000'000;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  Json source;  ///< document as given, used for hashing and export
};

/// Throws InvalidInput on any schema or validation error.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::string& path);

/// ORBIT_BUDGET, when set to a positive integer, replaces every configured budget.
std::optional<std::size_t> budget_from_env();
void apply_budget(ExperimentConfig& cfg, std::size_t budget);

/// FNV-1a 64 of the canonical dump of the config document, as 16 hex digits.
std::string config_hash(const Json& doc);

}  // namespace coarsent
