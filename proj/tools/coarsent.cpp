#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "coarsent/config.hpp"
#include "coarsent/error.hpp"
#include "coarsent/presets.hpp"
#include "coarsent/runner.hpp"

using namespace coarsent;

namespace {

void print_summary(const ExperimentConfig& cfg, const RunResult& res, const std::string& suffix = "") {
  for (const auto& j : res.jobs) std::cout << cfg.name << '/' << j.label << ": " << j.summary << suffix << '\n';
  for (const auto& f : res.files) std::cerr << "wrote " << f << '\n';
}

ExperimentConfig prepare(ExperimentConfig cfg) {
  if (const auto b = budget_from_env()) apply_budget(cfg, *b);
  return cfg;
}

int run_config(const std::string& path, Pipeline p, const std::string& out) {
  const auto cfg = prepare(load_config(path));
  RunOptions opts;
  opts.pipeline = p;
  if (!out.empty()) opts.output_dir = out;
  const auto res = run(cfg, opts);
  print_summary(cfg, res);
  return res.exit_code;
}

int reproduce(const std::string& id, const std::string& out) {
  const auto cfg = prepare(parse_config(preset_config(id)));
  RunOptions opts;
  if (!out.empty()) opts.output_dir = out;
  const auto res = run(cfg, opts);
  print_summary(cfg, res, " (" + preset_expectation(id) + ")");
  const auto verdict = check_preset(id, res);
  for (const auto& line : verdict.checks) std::cout << "  " << line << '\n';
  if (res.budget_exhausted) {
    std::cout << id << ": INCOMPLETE (budget exceeded)\n";
    return kExitBudget;
  }
  std::cout << id << ": " << (verdict.passed ? "PASS" : "FAIL") << '\n';
  return verdict.passed ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarse entropy estimation and coarse-map checks"};
  app.require_subcommand(1);

  std::string config_path, out_dir, preset, export_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
  };
  auto* estimate = app.add_subcommand("estimate", "run the entropy and product jobs of a config");
  add_config(estimate);
  auto* bcd = app.add_subcommand("bcd", "run the box-counting dimension jobs of a config");
  add_config(bcd);
  auto* check = app.add_subcommand("check-map", "run the coarse-map checks of a config");
  add_config(check);
  auto* all = app.add_subcommand("run", "run every job of a config");
  add_config(all);
  auto* repro = app.add_subcommand("reproduce", "run a preset and check its expected outcome");
  repro->add_option("preset", preset, "preset id")->required();
  repro->add_option("--out", out_dir, "output directory");
  auto* list = app.add_subcommand("list-presets", "list preset ids");
  auto* exp = app.add_subcommand("export-config", "print the config of a preset");
  exp->add_option("preset", preset, "preset id")->required();
  exp->add_option("-o,--output", export_path, "write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*estimate) return run_config(config_path, Pipeline::Estimate, out_dir);
    if (*bcd) return run_config(config_path, Pipeline::Bcd, out_dir);
    if (*check) return run_config(config_path, Pipeline::CheckMap, out_dir);
    if (*all) return run_config(config_path, Pipeline::All, out_dir);
    if (*repro) return reproduce(preset, out_dir);
    if (*list) {
      for (const auto& id : preset_ids()) std::cout << id << "  " << preset_description(id) << '\n';
      return kExitOk;
    }
    if (*exp) {
      const std::string text = preset_config(preset).dump(2) + "\n";
      if (export_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(export_path);
        if (!out) throw InvalidInput("cannot write '" + export_path + "'");
        out << text;
      }
      return kExitOk;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
