#include "coarsent/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coarsent/error.hpp"
#include "coarsent/orbit.hpp"
#include "coarsent/report.hpp"

namespace coarsent {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string fixed(double v, int digits = 4) {
  if (!std::isfinite(v)) return v > 0 ? "+INFINITY" : "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void run_entropy(const EntropyJob& job, JobResult& r) {
  auto est = estimate_entropy(job.map, job.x0, job.schedule);
  r.budget_exhausted = est.budget_exhausted;
  r.errors = est.errors;
  r.report = to_json(est);
  r.summary = "h_inf ~ " + fixed(est.value()) + " (" + provenance_name(est.provenance) + ")";
  if (est.extrapolated_upper && est.extrapolated_lower) r.summary += " upper " + fixed(*est.extrapolated_upper);
  r.entropy = std::move(est);
}

void run_bcd(const BcdJob& job, std::size_t budget, JobResult& r) {
  auto d = bcd_estimate(job.space, job.region, job.epsilons, job.spacing_factor, budget);
  r.report = to_json(d);
  r.summary = "bcd ~ " + fixed(d.fitted_dimension);
  r.dimension = std::move(d);
}

void run_conjugacy(const ConjugacyJob& job, std::size_t budget, JobResult& r) {
  auto c = check_conjugacy(job.f, job.g, job.phi, job.psi, job.radii, job.spacing, budget);
  r.report = to_json(c);
  auto tail = [](const DefectCurve& d) { return d.points.empty() ? 0.0 : d.points.back().second; };
  r.summary = "defects K_phi " + fixed(tail(c.K_phi)) + " " + trend_name(c.K_phi.classification) + ", K_psi " +
              fixed(tail(c.K_psi)) + " " + trend_name(c.K_psi.classification) + ", psi.phi " + fixed(tail(c.psi_phi)) +
              ", phi.psi " + fixed(tail(c.phi_psi));
  r.conjugacy = std::move(c);
}

void run_defect(const DefectJob& job, std::size_t budget, JobResult& r) {
  auto c = defect_curve(job.f1, job.f2, job.radii, job.spacing, budget);
  r.report = defect_json(c);
  r.summary = "sup defect " + fixed(c.points.back().second) + " " + trend_name(c.classification);
  r.defect = std::move(c);
}

void run_product(const ProductJob& job, std::size_t budget, JobResult& r) {
  const auto left = enumerate(job.left, job.left_x0, job.n, job.delta, job.spacing, budget);
  const auto right = enumerate(job.right, job.right_x0, job.n, job.delta, job.spacing, budget);
  r.report = Json::object();
  r.report["n"] = job.n;
  r.report["delta"] = job.delta;
  r.report["left_family"] = left.size();
  r.report["right_family"] = right.size();
  r.report["counts"] = Json::array();
  bool span_ok = true, sep_ok = true;
  for (double R : job.R_list) {
    const auto pc = count_product(job.left.domain(), left, job.right.domain(), right, R);
    Json row = to_json(pc);
    row["R"] = R;
    row["spanning_product_bound"] = pc.spanning_upper <= pc.left_spanning * pc.right_spanning;
    row["separated_product_bound"] = pc.separated_lower >= pc.left_separated * pc.right_separated;
    span_ok = span_ok && row["spanning_product_bound"].get<bool>();
    sep_ok = sep_ok && row["separated_product_bound"].get<bool>();
    r.report["counts"].push_back(std::move(row));
    r.product.emplace_back(R, pc);
  }
  r.summary = std::string("product counts: spanning bound ") + (span_ok ? "holds" : "FAILS") + ", separated bound " +
              (sep_ok ? "holds" : "FAILS");
}

void run_embedding(const EmbeddingJob& job, std::uint64_t seed, std::size_t budget, JobResult& r) {
  auto e = check_embedding(job.cert, job.radius, job.samples, seed);
  r.report = Json::object();
  r.report["embedding"] = to_json(e);
  r.summary = "embedding violations upper " + std::to_string(e.upper_violations) + " lower " +
              std::to_string(e.lower_violations);
  if (job.density_radius) {
    auto d = check_density(job.cert, *job.density_radius, job.density_spacing, budget);
    r.report["density"] = to_json(d);
    r.summary += ", density gap " + fixed(d.max_gap) + (d.flagged ? " FLAGGED" : "");
    r.density = std::move(d);
  }
  r.embedding = std::move(e);
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + p.string() + "'");
  out << content;
}

}  // namespace

bool pipeline_accepts(Pipeline p, const JobTask& t) {
  switch (p) {
    case Pipeline::All: return true;
    case Pipeline::Estimate:
      return std::holds_alternative<EntropyJob>(t) || std::holds_alternative<ProductJob>(t);
    case Pipeline::Bcd: return std::holds_alternative<BcdJob>(t);
    case Pipeline::CheckMap:
      return std::holds_alternative<ConjugacyJob>(t) || std::holds_alternative<DefectJob>(t) ||
             std::holds_alternative<EmbeddingJob>(t);
  }
  return false;
}

const JobResult* RunResult::find(const std::string& label) const {
  for (const auto& j : jobs)
    if (j.label == label) return &j;
  return nullptr;
}

std::string csv_file_name(const ExperimentConfig& cfg, const std::string& label) {
  return cfg.name + "-" + label + ".csv";
}

RunResult run(const ExperimentConfig& cfg, const RunOptions& opts) {
  RunResult res;
  res.config_hash = config_hash(cfg.source);
  bool any = false;
  for (const auto& job : cfg.jobs) {
    if (!pipeline_accepts(opts.pipeline, job.task)) continue;
    any = true;
    JobResult r;
    r.label = job.label;
    r.type = job_type_name(job.task);
    try {
      std::visit(overloaded{[&](const EntropyJob& j) { run_entropy(j, r); },
                            [&](const BcdJob& j) { run_bcd(j, cfg.budget, r); },
                            [&](const ConjugacyJob& j) { run_conjugacy(j, cfg.budget, r); },
                            [&](const DefectJob& j) { run_defect(j, cfg.budget, r); },
                            [&](const ProductJob& j) { run_product(j, cfg.budget, r); },
                            [&](const EmbeddingJob& j) { run_embedding(j, cfg.seed, cfg.budget, r); }},
                 job.task);
    } catch (const BudgetExceeded& e) {
      r.budget_exhausted = true;
      r.errors.push_back(e.what());
      r.summary = std::string("budget exceeded: ") + e.what();
    }
    if (r.report.is_null()) r.report = Json::object();
    res.budget_exhausted = res.budget_exhausted || r.budget_exhausted;
    res.jobs.push_back(std::move(r));
  }
  if (!any) throw InvalidInput("config has no job for this command");

  res.report = Json::object();
  res.report["schema"] = kConfigSchema;
  res.report["name"] = cfg.name;
  if (cfg.preset) res.report["preset"] = *cfg.preset;
  res.report["config_hash"] = res.config_hash;
  res.report["seed"] = cfg.seed;
  res.report["budget"] = cfg.budget;
  res.report["budget_exhausted"] = res.budget_exhausted;
  res.report["jobs"] = Json::array();
  for (const auto& r : res.jobs)
    res.report["jobs"].push_back(
        {{"label", r.label}, {"type", r.type}, {"summary", r.summary}, {"errors", r.errors}, {"result", r.report}});
  res.exit_code = res.budget_exhausted ? kExitBudget : kExitOk;

  if (opts.write_files) {
    const std::filesystem::path dir = opts.output_dir ? *opts.output_dir : cfg.output_dir;
    std::filesystem::create_directories(dir);
    for (const auto& r : res.jobs)
      if (r.entropy || (r.type == "entropy" && r.budget_exhausted)) {
        const auto p = dir / csv_file_name(cfg, r.label);
        write_file(p, to_csv(r.entropy ? r.entropy->records : std::vector<CountRecord>{}));
        res.files.push_back(p.string());
      }
    const auto p = dir / (cfg.name + ".json");
    write_file(p, res.report.dump(2) + "\n");
    res.files.push_back(p.string());
  }
  return res;
}

}  // namespace coarsent
