#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "pdflow/cli/runner.hpp"

namespace {

using namespace pdflow::cli;

std::optional<RunConfig> load_or_report(const std::string& path) {
  try {
    return load_config(path);
  } catch (const ConfigError& e) {
    std::cerr << "pdflow: " << path << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "pdflow: " << path << ": " << e.what() << '\n';
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized primal-dual dynamics for convex programs"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--out-dir", out_dir, "Directory for relative output paths");
  app.add_option("--seed", seed, "Noise seed, overrides the config");
  app.add_flag("--quiet", quiet, "Suppress informational output");

  auto* run_cmd = app.add_subcommand("run", "Integrate one config and write its outputs");
  std::string run_config;
  run_cmd->add_option("--config,config", run_config, "Run configuration (JSON)")->required();

  auto* verify_cmd = app.add_subcommand("verify", "Certification suite over every builtin problem");
  bool serial = false;
  verify_cmd->add_flag("--serial", serial, "Run checks one after another");

  auto* compare_cmd = app.add_subcommand("compare", "Sup gap between two runs on a shared grid");
  std::string first, second;
  compare_cmd->add_option("first", first, "First configuration")->required();
  compare_cmd->add_option("second", second, "Second configuration")->required();

  for (auto* sub : {run_cmd, verify_cmd, compare_cmd}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config_error;
  }

  const RunOptions options{out_dir, seed, quiet};

  if (*run_cmd) {
    const auto config = load_or_report(run_config);
    if (!config) return exit_config_error;
    const RunOutcome outcome = run(*config, options);
    if (outcome.exit_code != exit_ok) {
      std::cerr << "pdflow: " << outcome.message << '\n';
    } else if (!quiet) {
      std::cout << outcome.message << '\n';
    }
    return outcome.exit_code;
  }

  if (*verify_cmd) {
    const auto checks = verify(!serial);
    int failed = 0;
    for (const auto& c : checks) {
      if (!c.passed) ++failed;
      if (!quiet || !c.passed) {
        std::cout << fmt::format("[{}] {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
      }
    }
    if (!quiet) std::cout << fmt::format("{} of {} checks passed\n", checks.size() - failed, checks.size());
    return failed == 0 ? exit_ok : exit_numerical_failure;
  }

  const auto a = load_or_report(first);
  const auto b = load_or_report(second);
  if (!a || !b) return exit_config_error;
  try {
    const double gap = compare(*a, *b, options);
    std::cout << fmt::format("sup gap {:.6e}\n", gap);
  } catch (const pdflow::IntegrationError& e) {
    std::cerr << "pdflow: " << e.what() << '\n';
    return exit_numerical_failure;
  } catch (const ConfigError& e) {
    std::cerr << "pdflow: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "pdflow: " << e.what() << '\n';
    return exit_config_error;
  }
  return exit_ok;
}
