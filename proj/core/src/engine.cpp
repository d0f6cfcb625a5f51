#include "pdflow/engine.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace pdflow {

namespace {

std::vector<Index> offsets_of(const std::vector<FilterSpec>& specs) {
  std::vector<Index> offsets{0};
  for (const auto& spec : specs) offsets.push_back(offsets.back() + spec.order());
  return offsets;
}

void check_bank(const std::vector<FilterSpec>& specs, Index expected,
                FilterKind kind, const char* label) {
  if (static_cast<Index>(specs.size()) != expected) {
    throw DimensionError(std::string(label) + ": expected " + std::to_string(expected) +
                         " filters, got " + std::to_string(specs.size()));
  }
  for (size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].kind != kind) {
      throw std::invalid_argument(std::string(label) + "[" + std::to_string(i) +
                                  "]: filter kind must be " + to_string(kind));
    }
    const auto violations = validate(specs[i]);
    if (!violations.empty()) {
      std::string message = std::string(label) + "[" + std::to_string(i) + "]: ";
      for (size_t k = 0; k < violations.size(); ++k) {
        message += (k ? "; " : "") + violations[k];
      }
      throw std::invalid_argument(message);
    }
  }
}

std::span<const double> block(const Vec& v, const std::vector<Index>& offsets, size_t i) {
  return {v.data() + offsets[i], static_cast<size_t>(offsets[i + 1] - offsets[i])};
}

std::span<double> block(Vec& v, const std::vector<Index>& offsets, size_t i) {
  return {v.data() + offsets[i], static_cast<size_t>(offsets[i + 1] - offsets[i])};
}

double block_sum(const Vec& v, const std::vector<Index>& offsets, size_t i) {
  return v.segment(offsets[i], offsets[i + 1] - offsets[i]).sum();
}

// Fills every signal that follows from a given x; returns the primal filter
// output sum(xi_i) + d_i v_i that x must equal.
Vec signals_at(const DynamicsSystem& system, const SolverState& state, const Vec& x,
               const Vec& gradient_offset, ResolvedSignals& out) {
  const auto& problem = system.problem();
  const auto& bank = system.filters();
  out.x = x;

  out.h = problem.num_eq() > 0 ? Vec(problem.eq_matrix() * x - problem.eq_vector()) : Vec(0);
  out.mu.resize(problem.num_eq());
  for (size_t j = 0; j < bank.dual_eq.size(); ++j) {
    out.mu[static_cast<Index>(j)] = filter_output(
        bank.dual_eq[j], block(state.zeta, system.dual_eq_offsets(), j), out.h[static_cast<Index>(j)]);
  }

  out.w = problem.constraints(x);
  out.lambda.resize(problem.num_ineq());
  for (size_t l = 0; l < bank.dual_ineq.size(); ++l) {
    out.lambda[static_cast<Index>(l)] = filter_output(
        bank.dual_ineq[l], block(state.rho, system.dual_ineq_offsets(), l), out.w[static_cast<Index>(l)]);
  }

  out.v = -problem.gradient(x);
  if (gradient_offset.size() > 0) out.v -= gradient_offset;
  if (problem.num_ineq() > 0) out.v -= problem.constraint_jacobian_t(x) * out.lambda;
  if (problem.num_eq() > 0) out.v -= problem.eq_matrix().transpose() * out.mu;

  Vec target(problem.dim());
  for (size_t i = 0; i < bank.primal.size(); ++i) {
    const auto ii = static_cast<Index>(i);
    target[ii] = block_sum(state.xi, system.primal_offsets(), i) +
                 bank.primal[i].feedthrough * out.v[ii];
  }
  return target;
}

}  // namespace

DynamicsSystem::DynamicsSystem(ConvexProblem problem, FilterBank filters)
    : problem_(std::move(problem)), filters_(std::move(filters)) {
  check_bank(filters_.primal, problem_.dim(), FilterKind::primal, "primal filters");
  check_bank(filters_.dual_eq, problem_.num_eq(), FilterKind::dual_eq, "equality filters");
  check_bank(filters_.dual_ineq, problem_.num_ineq(), FilterKind::dual_ineq,
             "inequality filters");
  primal_offsets_ = offsets_of(filters_.primal);
  dual_eq_offsets_ = offsets_of(filters_.dual_eq);
  dual_ineq_offsets_ = offsets_of(filters_.dual_ineq);
  primal_feedthrough_ = std::any_of(filters_.primal.begin(), filters_.primal.end(),
                                    [](const FilterSpec& s) { return s.feedthrough > 0.0; });
}

DynamicsSystem assemble(ConvexProblem problem, FilterBank filters) {
  return DynamicsSystem(std::move(problem), std::move(filters));
}

SolverState DynamicsSystem::zero_state() const {
  return {Vec::Zero(primal_states()), Vec::Zero(dual_eq_states()),
          Vec::Zero(dual_ineq_states())};
}

void DynamicsSystem::check_state(const SolverState& state) const {
  require_size(state.xi, primal_states(), "xi");
  require_size(state.zeta, dual_eq_states(), "zeta");
  require_size(state.rho, dual_ineq_states(), "rho");
}

Vec DynamicsSystem::pack(const SolverState& state) const {
  check_state(state);
  Vec flat(state_size());
  flat << state.xi, state.zeta, state.rho;
  return flat;
}

SolverState DynamicsSystem::unpack(const Vec& flat) const {
  require_size(flat, state_size(), "packed state");
  return {flat.head(primal_states()), flat.segment(primal_states(), dual_eq_states()),
          flat.tail(dual_ineq_states())};
}

ResolvedSignals resolve_outputs(const DynamicsSystem& system, const SolverState& state,
                                const Vec& hint, const Vec& gradient_offset,
                                const LoopSettings& loop) {
  system.check_state(state);
  const Index n = system.problem().dim();
  if (gradient_offset.size() != 0) require_size(gradient_offset, n, "gradient offset");

  Vec x(n);
  for (size_t i = 0; i < system.filters().primal.size(); ++i) {
    x[static_cast<Index>(i)] = block_sum(state.xi, system.primal_offsets(), i);
  }

  ResolvedSignals out;
  if (!system.has_primal_feedthrough()) {
    signals_at(system, state, x, gradient_offset, out);
    out.iterations = 1;
    return out;
  }

  if (hint.size() == n && hint.allFinite()) x = hint;
  for (int it = 1; it <= loop.max_iterations; ++it) {
    const Vec target = signals_at(system, state, x, gradient_offset, out);
    const double gap = (target - x).cwiseAbs().maxCoeff();
    if (gap <= loop.tolerance * (1.0 + target.cwiseAbs().maxCoeff())) {
      out.iterations = it;
      return out;
    }
    if (!target.allFinite()) break;
    // A plain substitution first: when v does not depend on x it is exact.
    x = it == 1 ? target : Vec((1.0 - loop.damping) * x + loop.damping * target);
  }
  throw LoopDivergenceError("algebraic loop through the primal feedthrough did not converge in " +
                            std::to_string(loop.max_iterations) + " iterations");
}

Evaluation evaluate(const DynamicsSystem& system, const SolverState& state, const Vec& hint,
                    const Vec& gradient_offset) {
  Evaluation eval;
  eval.signals = resolve_outputs(system, state, hint, gradient_offset);
  const auto& bank = system.filters();
  const auto& s = eval.signals;

  eval.derivative = {Vec(state.xi.size()), Vec(state.zeta.size()), Vec(state.rho.size())};
  for (size_t i = 0; i < bank.primal.size(); ++i) {
    filter_derivative(bank.primal[i], block(state.xi, system.primal_offsets(), i),
                      s.v[static_cast<Index>(i)],
                      block(eval.derivative.xi, system.primal_offsets(), i));
  }
  for (size_t j = 0; j < bank.dual_eq.size(); ++j) {
    filter_derivative(bank.dual_eq[j], block(state.zeta, system.dual_eq_offsets(), j),
                      s.h[static_cast<Index>(j)],
                      block(eval.derivative.zeta, system.dual_eq_offsets(), j));
  }
  for (size_t l = 0; l < bank.dual_ineq.size(); ++l) {
    filter_derivative(bank.dual_ineq[l], block(state.rho, system.dual_ineq_offsets(), l),
                      s.w[static_cast<Index>(l)],
                      block(eval.derivative.rho, system.dual_ineq_offsets(), l));
  }
  return eval;
}

SolverState rhs(const DynamicsSystem& system, const SolverState& state,
                const Vec& gradient_offset) {
  return evaluate(system, state, Vec(), gradient_offset).derivative;
}

Trajectory integrate(const DynamicsSystem& system, const SolverState& initial,
                     const IntegratorConfig& config, const std::optional<NoiseModel>& noise) {
  validate(config);
  system.check_state(initial);
  if (initial.rho.size() > 0 && initial.rho.minCoeff() < 0.0) {
    throw std::invalid_argument("initial rho must be nonnegative");
  }

  const Index n = system.problem().dim();
  const Index rho_begin = system.primal_states() + system.dual_eq_states();
  const Index rho_size = system.dual_ineq_states();
  const double h = config.step;
  const long long steps = step_count(config);

  std::optional<NoiseGenerator> generator;
  if (noise) generator.emplace(*noise, n);

  Trajectory traj;
  traj.step = h;
  traj.samples.reserve(static_cast<size_t>(steps / config.record_every + 2));

  Vec y = system.pack(initial);
  Vec hint;
  Vec offset = Vec::Zero(n);

  auto record = [&](double t) {
    ResolvedSignals signals = resolve_outputs(system, system.unpack(y), hint, offset);
    traj.max_loop_iterations = std::max(traj.max_loop_iterations, signals.iterations);
    hint = signals.x;
    traj.samples.push_back({t, system.unpack(y), std::move(signals)});
  };

  auto f = [&](const Vec& stage) -> Vec {
    Vec clamped = stage;
    clamped.segment(rho_begin, rho_size) = clamped.segment(rho_begin, rho_size).cwiseMax(0.0);
    Evaluation eval = evaluate(system, system.unpack(clamped), hint, offset);
    traj.max_loop_iterations = std::max(traj.max_loop_iterations, eval.signals.iterations);
    hint = std::move(eval.signals.x);
    return system.pack(eval.derivative);
  };

  try {
    record(0.0);
    for (long long k = 1; k <= steps; ++k) {
      if (generator) offset = generator->next(h);
      y = explicit_step(config.method, f, y, h);
      if (!y.allFinite()) {
        throw IntegrationError(IntegrationError::Reason::blow_up,
                               "state became non-finite at t = " +
                                   std::to_string(static_cast<double>(k) * h),
                               std::move(traj));
      }
      if (rho_size > 0) {
        auto rho = y.segment(rho_begin, rho_size);
        traj.max_clamp_undershoot = std::max(traj.max_clamp_undershoot, -rho.minCoeff());
        rho = rho.cwiseMax(0.0);
      }
      if (k % config.record_every == 0 || k == steps) record(static_cast<double>(k) * h);
    }
  } catch (const LoopDivergenceError& e) {
    throw IntegrationError(IntegrationError::Reason::loop_divergence, e.what(), std::move(traj));
  } catch (const OracleError& e) {
    throw IntegrationError(IntegrationError::Reason::blow_up, e.what(), std::move(traj));
  }
  return traj;
}

}  // namespace pdflow
