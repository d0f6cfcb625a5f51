#include "pdflow/cli/runner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>

#include "pdflow/certification.hpp"

namespace pdflow::cli {

namespace {

Vec override_or_zero(const std::optional<Vec>& value, Index size, const char* what) {
  if (!value) return Vec::Zero(size);
  if (value->size() != size) {
    throw ConfigError(std::string("/initial/") + what,
                      fmt::format("expected length {}, got {}", size, value->size()));
  }
  return *value;
}

NoiseModel effective_noise(const NoiseModel& model, const RunOptions& options) {
  NoiseModel out = model;
  if (options.seed) out.seed = *options.seed;
  return out;
}

std::filesystem::path resolve(const RunOptions& options, const std::filesystem::path& path) {
  return path.is_absolute() ? path : options.out_dir / path;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  body(out);
  out.flush();
  if (!out) throw std::ios_base::failure("failed writing " + path.string());
}

void write_outputs(const RunConfig& config, const RunOptions& options, const Simulation& sim,
                   const std::optional<RunReport>& report) {
  const auto& outputs = config.outputs;
  if (outputs.csv) {
    write_file(resolve(options, *outputs.csv),
               [&](std::ostream& out) { write_csv(out, sim.trajectory, sim.layout); });
  }
  if (outputs.json) {
    write_file(resolve(options, *outputs.json), [&](std::ostream& out) {
      out << trajectory_json(sim.trajectory, sim.layout) << '\n';
    });
  }
  if (outputs.svg) {
    std::vector<std::string> columns = outputs.plot;
    if (columns.empty()) {
      for (Index i = 0; i < config.problem.dim(); ++i) columns.push_back(fmt::format("x_{}", i + 1));
    }
    write_file(resolve(options, *outputs.svg),
               [&](std::ostream& out) { write_svg(out, sim.trajectory, sim.layout, columns); });
  }
  if (outputs.report && report) {
    write_file(resolve(options, *outputs.report),
               [&](std::ostream& out) { out << report_json(*report) << '\n'; });
  }
}

}  // namespace

Simulation simulate(const RunConfig& config, const RunOptions& options) {
  const ConvexProblem& problem = config.problem;
  Simulation sim;

  if (config.engine == EngineKind::direct) {
    const Variant variant = config.variant.value();
    sim.system.emplace(problem, as_generalized(variant, problem));
    sim.layout = layout_of(*sim.system);
    if (variant == Variant::aug_lagrangian) {
      AugLagrangianState initial{override_or_zero(config.initial.xi, problem.dim(), "xi"),
                                 override_or_zero(config.initial.zeta, problem.num_eq(), "zeta"),
                                 override_or_zero(config.initial.rho, problem.num_ineq(), "rho")};
      sim.trajectory = integrate_aug_lagrangian(problem, initial, config.integrator);
    } else {
      RichertCortesState initial{override_or_zero(config.initial.xi, problem.dim(), "xi"),
                                 override_or_zero(config.initial.rho, problem.num_ineq(), "rho")};
      sim.trajectory = integrate_richert_cortes(config.lp.value(), initial, config.integrator);
    }
    return sim;
  }

  try {
    sim.system.emplace(problem, config.filters);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("/filters", e.what());
  }
  const DynamicsSystem& system = *sim.system;
  sim.layout = layout_of(system);
  const SolverState initial{override_or_zero(config.initial.xi, system.primal_states(), "xi"),
                            override_or_zero(config.initial.zeta, system.dual_eq_states(), "zeta"),
                            override_or_zero(config.initial.rho, system.dual_ineq_states(), "rho")};
  std::optional<NoiseModel> noise;
  if (config.noise) noise = effective_noise(*config.noise, options);
  sim.trajectory = integrate(system, initial, config.integrator, noise);
  return sim;
}

RunReport certify(const RunConfig& config, Simulation& sim) {
  RunReport report;
  report.convergence_tol = config.convergence_tol;
  report.convergence = convergence_report(sim.trajectory, config.problem, config.convergence_tol);
  if (!config.reference || config.noise || !sim.system || sim.trajectory.size() < 2) {
    return report;
  }
  // Difference quotients are compared against a tolerance of 10h, so the
  // audit needs one sample per step.
  if (config.integrator.record_every != 1) {
    RunConfig fine = config;
    fine.integrator.record_every = 1;
    fine.outputs = {};
    Simulation dense = simulate(fine);
    RunReport dense_report = certify(fine, dense);
    dense_report.convergence_tol = report.convergence_tol;
    dense_report.convergence = report.convergence;
    return dense_report;
  }
  ReferencePoint ref = [&] {
    try {
      return ReferencePoint(config.problem, *config.reference);
    } catch (const std::exception& e) {
      throw ConfigError("/reference", e.what());
    }
  }();
  attach_storage(sim.trajectory, *sim.system, ref);
  report.lyapunov_max_increase = lyapunov_monotone(sim.trajectory);
  report.lyapunov_tolerance = lyapunov_tolerance(sim.trajectory);
  report.audit = passivity_audit(sim.trajectory, ref);
  return report;
}

RunOutcome run(const RunConfig& config, const RunOptions& options) {
  RunOutcome outcome;
  try {
    Simulation sim = simulate(config, options);
    outcome.report = certify(config, sim);
    write_outputs(config, options, sim, outcome.report);
    outcome.simulation = std::move(sim);
    const auto& conv = outcome.report->convergence;
    outcome.message = fmt::format("converged={} settle_time={} final_residual={:.3e}",
                                  conv.converged,
                                  conv.settle_time ? fmt::format("{:.6g}", *conv.settle_time)
                                                   : std::string("none"),
                                  conv.final_residual.total);
  } catch (const ConfigError& e) {
    outcome.exit_code = exit_config_error;
    outcome.message = e.what();
  } catch (const IntegrationError& e) {
    outcome.exit_code = exit_numerical_failure;
    outcome.message = e.what();
    Simulation partial;
    partial.trajectory = e.partial();
    try {
      partial.system.emplace(config.problem, config.filters);
      partial.layout = layout_of(*partial.system);
      write_outputs(config, options, partial, std::nullopt);
    } catch (const std::exception&) {
      // best effort: the numerical failure is the reported error
    }
    outcome.simulation = std::move(partial);
  } catch (const NumericalError& e) {
    outcome.exit_code = exit_numerical_failure;
    outcome.message = e.what();
  } catch (const std::ios_base::failure& e) {
    outcome.exit_code = exit_io_error;
    outcome.message = e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    outcome.exit_code = exit_io_error;
    outcome.message = e.what();
  } catch (const std::invalid_argument& e) {
    outcome.exit_code = exit_config_error;
    outcome.message = e.what();
  }
  return outcome;
}

double compare(const RunConfig& a, const RunConfig& b, const RunOptions& options) {
  const Simulation sa = simulate(a, options);
  const Simulation sb = simulate(b, options);
  return trajectory_divergence(sa.trajectory, sb.trajectory, signal_all);
}

namespace {

using Checks = std::vector<VerifyCheck>;

VerifyCheck check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

RunConfig builtin_config(const std::string& problem, const std::string& filter_case,
                         double horizon = 100.0) {
  const std::string text = fmt::format(
      R"({{"problem":{{"builtin":"{}"}},"filters":{{"case":"{}"}},"integrator":{{"horizon":{}}}}})",
      problem, filter_case, horizon);
  RunConfig config = parse_config(text);
  // The toy problem's optimum is the zero state, so start it off the optimum.
  if (problem == "toy") config.initial.xi = Vec::Ones(config.filters.primal.front().order());
  return config;
}

Checks certify_run(const std::string& problem, const std::string& filter_case,
                   bool expect_convergence) {
  Checks out;
  const std::string label = problem + "/" + filter_case;
  RunConfig config = builtin_config(problem, filter_case);
  Simulation sim = simulate(config);
  const RunReport report = certify(config, sim);
  const auto& conv = report.convergence;
  out.push_back(check(label + " convergence", conv.converged == expect_convergence,
                      fmt::format("converged={} final_residual={:.3e}", conv.converged,
                                  conv.final_residual.total)));
  if (report.lyapunov_max_increase) {
    out.push_back(check(label + " lyapunov", *report.lyapunov_max_increase <= *report.lyapunov_tolerance,
                        fmt::format("max dV={:.3e} tol={:.3e}", *report.lyapunov_max_increase,
                                    *report.lyapunov_tolerance)));
  }
  if (report.audit) {
    const auto& a = *report.audit;
    out.push_back(check(label + " passivity", a.passed(),
                        fmt::format("margins primal={:.3e} eq={:.3e} ineq={:.3e} tol={:.3e}",
                                    a.primal, a.dual_eq, a.dual_ineq, a.tolerance)));
  }
  return out;
}

Checks problem_checks() {
  Checks out;
  for (const auto& name : bundled_names()) {
    const BundledProblem bundled = bundled_problem(name);
    const Index n = bundled.problem.dim();
    const double worst = monotone_gradient_check(
        bundled.problem, 200, {Vec::Constant(n, -5.0), Vec::Constant(n, 5.0)}, 7);
    out.push_back(check(name + " monotone gradient", worst >= -1e-9,
                        fmt::format("worst inner product {:.3e}", worst)));
    if (bundled.reference) {
      const double residual = kkt_residual(bundled.problem, *bundled.reference).total;
      out.push_back(check(name + " reference KKT residual", residual <= 1e-12,
                          fmt::format("{:.3e}", residual)));
    }
  }
  for (const char* filter_case : {"case1", "case2", "case3"}) {
    const FilterBank bank = expand_case(filter_case, make_toy());
    const ZeroReport zeros = has_stable_zero(bank.primal.front());
    out.push_back(check(std::string(filter_case) + " primal stable zero", zeros.stable,
                        fmt::format("{} zero(s)", zeros.zeros.size())));
  }
  return out;
}

Checks equivalence_checks() {
  Checks out;
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"lp_example", "richert-cortes"}, {"toy", "aug-lagrangian"}, {"lp_example", "aug-lagrangian"}};
  for (const auto& [problem, variant] : pairs) {
    RunConfig generalized = builtin_config(problem, variant, 50.0);
    RunConfig direct = builtin_config(problem, variant, 50.0);
    direct.engine = EngineKind::direct;
    const double gap = compare(direct, generalized);
    out.push_back(check(problem + "/" + variant + " direct vs generalized", gap <= 1e-8,
                        fmt::format("sup gap {:.3e}", gap)));
  }
  return out;
}

}  // namespace

std::vector<VerifyCheck> verify(bool parallel) {
  std::vector<std::function<Checks()>> jobs{
      problem_checks,
      equivalence_checks,
      [] { return certify_run("toy", "case1", true); },
      [] { return certify_run("toy", "integrator", false); },
      [] { return certify_run("lp_example", "case1", true); },
      [] { return certify_run("lp_example", "case2", true); },
      [] { return certify_run("lp_example", "case3", true); },
      [] { return certify_run("lp_strict", "integrator", true); },
      [] { return certify_run("distributed_demo", "case2", true); },
  };

  auto guarded = [](const std::function<Checks()>& job) -> Checks {
    try {
      return job();
    } catch (const std::exception& e) {
      return {check("job", false, e.what())};
    }
  };

  Checks all;
  if (parallel) {
    std::vector<std::future<Checks>> futures;
    for (const auto& job : jobs) futures.push_back(std::async(std::launch::async, guarded, job));
    for (auto& f : futures) {
      auto part = f.get();
      all.insert(all.end(), part.begin(), part.end());
    }
  } else {
    for (const auto& job : jobs) {
      auto part = guarded(job);
      all.insert(all.end(), part.begin(), part.end());
    }
  }
  return all;
}

}  // namespace pdflow::cli
