#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdflow/bundled.hpp"
#include "pdflow/engine.hpp"
#include "pdflow/special_cases.hpp"

namespace pdflow::cli {

/// Schema violation. `pointer()` is the JSON pointer of the offending node.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& message)
      : std::runtime_error(pointer.empty() ? message : pointer + ": " + message),
        pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

enum class EngineKind { generalized, direct };

struct OutputPaths {
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> json;
  std::optional<std::filesystem::path> svg;
  std::optional<std::filesystem::path> report;
  /// Column names drawn in the SVG; defaults to every x_* column.
  std::vector<std::string> plot;
};

struct InitialOverrides {
  std::optional<Vec> xi;
  std::optional<Vec> zeta;
  std::optional<Vec> rho;
};

/// A validated run description with every default filled in.
struct RunConfig {
  RunConfig(std::string name, ConvexProblem problem_)
      : problem_name(std::move(name)), problem(std::move(problem_)) {}

  /// Builtin name, or "inline".
  std::string problem_name;
  ConvexProblem problem;
  /// Present when the problem is a pure LP (needed by the direct
  /// richert-cortes engine).
  std::optional<LpData> lp;
  std::optional<KktPoint> reference;

  FilterBank filters;
  /// Case shorthand used for the filters, if any.
  std::optional<std::string> filter_case;
  EngineKind engine = EngineKind::generalized;
  std::optional<Variant> variant;

  IntegratorConfig integrator;
  std::optional<NoiseModel> noise;
  InitialOverrides initial;
  double convergence_tol = 1e-2;
  OutputPaths outputs;
};

/// Case shorthands: case1, case2, case3, integrator, aug-lagrangian,
/// richert-cortes.
FilterBank expand_case(std::string_view name, const ConvexProblem& problem);
std::vector<std::string> case_names();

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace pdflow::cli
