#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdflow/cli/config.hpp"
#include "pdflow/export.hpp"

namespace pdflow::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_io_error = 1,
  exit_config_error = 2,
  exit_numerical_failure = 3,
};

struct RunOptions {
  /// Relative output paths are resolved against this directory.
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

/// Result of simulating one config.
struct Simulation {
  Trajectory trajectory;
  BlockLayout layout;
  /// Generalized system matching the run (also for the direct engine, whose
  /// states map one-to-one onto it); used for certification.
  std::optional<DynamicsSystem> system;
};

/// Integrates the configured dynamics. Throws IntegrationError on failure.
Simulation simulate(const RunConfig& config, const RunOptions& options = {});

/// Convergence report always; Lyapunov and passivity audits when a reference
/// point is known and the run is noise-free.
RunReport certify(const RunConfig& config, Simulation& simulation);

struct RunOutcome {
  int exit_code = exit_ok;
  std::string message;
  std::optional<Simulation> simulation;
  std::optional<RunReport> report;
};

/// Simulates, certifies and writes the requested outputs. Never throws;
/// failures are reported through exit_code and message.
RunOutcome run(const RunConfig& config, const RunOptions& options = {});

/// Sup gap over x, mu, lambda between two runs on a shared time grid.
double compare(const RunConfig& a, const RunConfig& b, const RunOptions& options = {});

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Certification and invariant suite over every builtin problem. Independent
/// runs execute concurrently when `parallel` is set.
std::vector<VerifyCheck> verify(bool parallel = true);

/// Self-contained SVG line plot with one polyline per named column.
void write_svg(std::ostream& out, const Trajectory& trajectory, const BlockLayout& layout,
               const std::vector<std::string>& columns);

}  // namespace pdflow::cli
