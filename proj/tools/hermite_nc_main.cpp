#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hermite_nc/experiment.hpp"

namespace {

/// Fast built-in battery for `hermite-nc verify`: one probe per module,
/// sized to finish in seconds. The exhaustive battery lives in the
/// acceptance test binary.
std::vector<hermite_nc::ProbeReport> builtin_battery(std::uint64_t seed) {
  using namespace hermite_nc;
  std::vector<ProbeReport> reports;
  {
    ExperimentConfig cfg;
    cfg.kind = "riesz-convergence";
    cfg.r_sweep = {4, 16, 64, 256};
    cfg.degree_cap = 24;
    cfg.seed = seed;
    cfg.output_dir = "/tmp/hermite-nc-verify";
    auto res = run(cfg);
    reports.insert(reports.end(), res.reports.begin(), res.reports.end());
  }
  {
    ExperimentConfig cfg;
    cfg.kind = "mehler-probe";
    cfg.seed = seed;
    cfg.output_dir = "/tmp/hermite-nc-verify";
    auto res = run(cfg);
    reports.insert(reports.end(), res.reports.begin(), res.reports.end());
  }
  {
    ExperimentConfig cfg;
    cfg.kind = "marcinkiewicz";
    cfg.multiplier = "power";
    cfg.gamma = 1.0;
    cfg.seed = seed;
    cfg.output_dir = "/tmp/hermite-nc-verify";
    auto res = run(cfg);
    reports.insert(reports.end(), res.reports.begin(), res.reports.end());
  }
  {
    ExperimentConfig cfg;
    cfg.kind = "oscillating-probe";
    cfg.alpha = 0.5;
    cfg.t_values = {0.4, 0.6};
    cfg.x_values = {-1.0, 0.5, 1.5};
    cfg.seed = seed;
    cfg.output_dir = "/tmp/hermite-nc-verify";
    auto res = run(cfg);
    reports.insert(reports.end(), res.reports.begin(), res.reports.end());
  }
  return reports;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-valued Hermite analysis experiment runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir, seed_str;
  int jobs = 1;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config_path, "path to the config file")
      ->required();
  run_cmd->add_option("--jobs", jobs, "worker threads for independent tuples");
  run_cmd->add_option("--out", out_dir, "override the output directory");
  run_cmd->add_option("--seed", seed_str, "override the seed");

  auto* verify_cmd =
      app.add_subcommand("verify", "run the built-in probe battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) {
      hermite_nc::ExperimentConfig cfg =
          hermite_nc::ExperimentConfig::load(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!seed_str.empty()) cfg.seed = std::stoull(seed_str);
      const auto result = hermite_nc::run(cfg, jobs);
      const int summary_rc = hermite_nc::emit_summary(result.reports, std::cout);
      return result.exit_code != 0 ? result.exit_code : summary_rc;
    }
    if (verify_cmd->parsed()) {
      const auto reports = builtin_battery(1);
      return hermite_nc::emit_summary(reports, std::cout);
    }
  } catch (const hermite_nc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
