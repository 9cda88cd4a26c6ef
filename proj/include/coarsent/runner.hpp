#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarsent/config.hpp"

namespace coarsent {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitBudget = 3, kExitAssertion = 4 };

/// Which job types a command executes.
enum class Pipeline { All, Estimate, Bcd, CheckMap };

bool pipeline_accepts(Pipeline p, const JobTask& t);

struct JobResult {
  std::string label;
  std::string type;
  Json report;
  std::optional<EntropyEstimate> entropy;
  std::optional<DimensionEstimate> dimension;
  std::optional<ConjugacyReport> conjugacy;
  std::optional<DefectCurve> defect;
  std::vector<std::pair<double, ProductCounts>> product;  ///< per R
  std::optional<EmbeddingReport> embedding;
  std::optional<DensityReport> density;
  bool budget_exhausted = false;
  std::vector<std::string> errors;
  std::string summary;
};

struct RunResult {
  std::vector<JobResult> jobs;
  bool budget_exhausted = false;
  std::string config_hash;
  Json report;
  std::vector<std::string> files;
  int exit_code = kExitOk;

  const JobResult* find(const std::string& label) const;
};

struct RunOptions {
  Pipeline pipeline = Pipeline::All;
  bool write_files = true;
  std::optional<std::string> output_dir;  ///< overrides the config
};

/// Executes the matching jobs in order. Budget failures are recorded per job
/// (exit code 3) and the remaining jobs still run; partial results are written.
/// Throws InvalidInput when no job matches the pipeline.
RunResult run(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// CSV file name of an entropy job.
std::string csv_file_name(const ExperimentConfig& cfg, const std::string& label);

}  // namespace coarsent
