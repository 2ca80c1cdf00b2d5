// SPDX-License-Identifier: Apache-2.0
//
// hardening CLI: reproduces the CV^2 and ray-correlation experiment tables
// and runs the self-validation suite.
//
// Exit codes: 0 success, 1 config error, 2 validation failure,
// 3 numerical abort.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hardening/experiments.hpp"
#include "hardening/validate.hpp"
#include "hardening/version.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::string out_dir = ".";
  bool plot = false;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path,
                  "Flat key-value config file for this experiment");
  cmd->add_option("--seed", opts.seed, "Master seed override");
  cmd->add_option("--trials", opts.trials, "Trial-count override");
  cmd->add_option("--out", opts.out_dir, "Output directory (default: .)");
  cmd->add_flag("--plot", opts.plot, "Also write an SVG plot");
}

int run_figure(hardening::ExperimentKind kind, const CommonOptions& opts) {
  hardening::SweepConfig cfg =
      opts.config_path.empty()
          ? hardening::default_config(kind)
          : hardening::parse_config_file(opts.config_path);
  if (cfg.experiment != kind) {
    throw hardening::ConfigError(
        "config declares experiment '" + hardening::to_string(cfg.experiment) +
        "' but this subcommand runs '" + hardening::to_string(kind) + "'");
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.trials) cfg.trials = *opts.trials;
  hardening::finalize_config(cfg);

  const auto csv_path = hardening::run_experiment_to_files(
      cfg, opts.out_dir, opts.plot, hardening::default_worker_count());
  std::cout << "wrote " << csv_path.string() << '\n';
  return 0;
}

int run_validate_command(const CommonOptions& opts) {
  hardening::ValidateOptions vopts;
  if (opts.seed) vopts.seed = *opts.seed;
  if (opts.trials) vopts.trials = *opts.trials;
  vopts.workers = hardening::default_worker_count();

  // A rayleigh-baseline sweep config additionally writes its CSV table.
  if (!opts.config_path.empty()) {
    hardening::SweepConfig cfg = hardening::parse_config_file(opts.config_path);
    if (cfg.experiment != hardening::ExperimentKind::RayleighBaseline) {
      throw hardening::ConfigError(
          "validate accepts only rayleigh-baseline configs, got '" +
          hardening::to_string(cfg.experiment) + "'");
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.trials) cfg.trials = *opts.trials;
    hardening::finalize_config(cfg);
    const auto csv_path = hardening::run_experiment_to_files(
        cfg, opts.out_dir, opts.plot, vopts.workers);
    std::cout << "wrote " << csv_path.string() << '\n';
  }

  const hardening::ValidationReport report = hardening::run_validate(vopts);
  for (const auto& check : report.checks) {
    if (check.passed) {
      std::cout << "PASS " << check.name << ": " << check.detail << '\n';
    } else {
      std::cout << "FAIL " << check.name << " (replay with --seed "
                << check.seed << "): " << check.detail << '\n';
    }
  }

  std::filesystem::create_directories(opts.out_dir);
  const std::filesystem::path report_path =
      std::filesystem::path(opts.out_dir) / "validate_report.json";
  std::ofstream out(report_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + report_path.string());
  }
  out << report.to_json();
  std::cout << (report.all_passed() ? "all checks passed"
                                    : "validation FAILED")
            << " (report: " << report_path.string() << ")\n";
  return report.all_passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ray-based MIMO channel hardening experiments"};
  app.set_version_flag("--version", hardening::kVersion);
  app.require_subcommand(1);

  struct Subcommand {
    const char* name;
    const char* help;
    hardening::ExperimentKind kind;
  };
  const Subcommand figures[] = {
      {"fig1", "Simulated CV^2 vs antenna count (asymptotes at 1/P)",
       hardening::ExperimentKind::Cv2VsAntennas},
      {"fig2", "Normalized ray correlation N*E2 vs antenna spacing",
       hardening::ExperimentKind::E2VsSpacing},
      {"fig3", "Ray correlation E2 vs antenna count at fixed spacing",
       hardening::ExperimentKind::E2VsAntennas},
      {"fig4", "Simulated CV^2 against the closed-form prediction",
       hardening::ExperimentKind::Cv2VsFormula},
  };

  CommonOptions options[5];
  for (std::size_t i = 0; i < 4; ++i) {
    CLI::App* cmd = app.add_subcommand(figures[i].name, figures[i].help);
    add_common_options(cmd, options[i]);
  }
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Run the self-validation suite");
  add_common_options(validate_cmd, options[4]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }

  try {
    for (std::size_t i = 0; i < 4; ++i) {
      if (app.get_subcommand(figures[i].name)->parsed()) {
        return run_figure(figures[i].kind, options[i]);
      }
    }
    return run_validate_command(options[4]);
  } catch (const hardening::NumericalError& err) {
    std::cerr << "numerical abort: " << err.what() << '\n';
    return 3;
  } catch (const hardening::ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
