#include "pdflow/special_cases.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pdflow {

const char* to_string(Variant variant) {
  return variant == Variant::aug_lagrangian ? "aug-lagrangian" : "richert-cortes";
}

Variant parse_variant(std::string_view name) {
  if (name == "aug-lagrangian" || name == "aug_lagrangian") return Variant::aug_lagrangian;
  if (name == "richert-cortes" || name == "richert_cortes" || name == "lp_richert_cortes") {
    return Variant::richert_cortes;
  }
  throw std::invalid_argument("unsupported variant '" + std::string(name) + "'");
}

AugLagrangianEval aug_lagrangian_rhs(const ConvexProblem& problem,
                                     const AugLagrangianState& state) {
  require_size(state.x, problem.dim(), "x");
  require_size(state.zeta, problem.num_eq(), "zeta");
  require_size(state.rho, problem.num_ineq(), "rho");

  AugLagrangianEval out;
  out.x = state.x;
  const Vec residual = problem.eq_matrix() * state.x - problem.eq_vector();
  out.mu = state.zeta + residual;
  const Vec g = problem.constraints(state.x);
  out.lambda = state.rho + g.cwiseMax(0.0);

  Vec force = problem.gradient(state.x);
  if (problem.num_ineq() > 0) force += problem.constraint_jacobian_t(state.x) * out.lambda;
  if (problem.num_eq() > 0) force += problem.eq_matrix().transpose() * out.mu;

  out.derivative.x = -force;
  out.derivative.zeta = residual;
  out.derivative.rho = project_rhs(g, state.rho);
  return out;
}

RichertCortesEval richert_cortes_rhs(const LpData& lp, const RichertCortesState& state) {
  const Index n = lp.theta.size();
  const Index m = lp.phi.size();
  if (lp.Phi.rows() != m || (m > 0 && lp.Phi.cols() != n)) {
    throw DimensionError("LP data shapes do not agree");
  }
  require_size(state.xi, n, "xi");
  require_size(state.lambda, m, "lambda");

  RichertCortesEval out;
  const Vec drift = -lp.theta - lp.Phi.transpose() * state.lambda;
  out.x = state.xi + drift;
  out.derivative.xi = drift;
  out.derivative.lambda = project_rhs(lp.Phi * out.x - lp.phi, state.lambda);
  return out;
}

FilterBank as_generalized(Variant variant, const ConvexProblem& problem) {
  FilterBank bank;
  FilterSpec primal = FilterSpec::integrator(FilterKind::primal);
  FilterSpec dual_eq = FilterSpec::integrator(FilterKind::dual_eq);
  FilterSpec dual_ineq = FilterSpec::integrator(FilterKind::dual_ineq);
  switch (variant) {
    case Variant::aug_lagrangian:
      dual_eq.feedthrough = 1.0;
      dual_ineq.feedthrough = 1.0;
      break;
    case Variant::richert_cortes:
      if (problem.num_eq() > 0) {
        throw std::invalid_argument("richert-cortes mapping has no equality filters");
      }
      primal.feedthrough = 1.0;
      break;
  }
  bank.primal.assign(static_cast<size_t>(problem.dim()), primal);
  bank.dual_eq.assign(static_cast<size_t>(problem.num_eq()), dual_eq);
  bank.dual_ineq.assign(static_cast<size_t>(problem.num_ineq()), dual_ineq);
  return bank;
}

namespace {

// Shared fixed-step loop for the direct variants. `layout` splits the flat
// state into (x-like, zeta, rho-like) block sizes; `eval` maps a flat state to
// its derivative and fills a sample's signals.
template <typename Eval>
Trajectory run_direct(Index primal, Index eq, Index ineq, const Vec& initial,
                      const IntegratorConfig& config, Eval eval) {
  validate(config);
  const double h = config.step;
  const long long steps = step_count(config);
  const Index rho_begin = primal + eq;

  auto clamp = [&](Vec y) {
    y.segment(rho_begin, ineq) = y.segment(rho_begin, ineq).cwiseMax(0.0);
    return y;
  };
  auto sample_at = [&](const Vec& y, double t) {
    Sample s;
    s.t = t;
    s.state = {y.head(primal), y.segment(primal, eq), y.tail(ineq)};
    eval(y, &s.signals);
    s.signals.iterations = 1;
    return s;
  };

  Trajectory traj;
  traj.step = h;
  traj.max_loop_iterations = 1;
  Vec y = initial;
  traj.samples.push_back(sample_at(y, 0.0));
  auto f = [&](const Vec& stage) -> Vec { return eval(clamp(stage), nullptr); };
  for (long long k = 1; k <= steps; ++k) {
    y = explicit_step(config.method, f, y, h);
    if (!y.allFinite()) {
      throw IntegrationError(IntegrationError::Reason::blow_up,
                             "direct dynamics became non-finite", std::move(traj));
    }
    if (ineq > 0) {
      traj.max_clamp_undershoot =
          std::max(traj.max_clamp_undershoot, -y.segment(rho_begin, ineq).minCoeff());
    }
    y = clamp(std::move(y));
    if (k % config.record_every == 0 || k == steps) {
      traj.samples.push_back(sample_at(y, static_cast<double>(k) * h));
    }
  }
  return traj;
}

}  // namespace

Trajectory integrate_aug_lagrangian(const ConvexProblem& problem,
                                    const AugLagrangianState& initial,
                                    const IntegratorConfig& config) {
  const Index n = problem.dim();
  const Index r = problem.num_eq();
  const Index m = problem.num_ineq();
  require_size(initial.x, n, "x");
  require_size(initial.zeta, r, "zeta");
  require_size(initial.rho, m, "rho");
  if (m > 0 && initial.rho.minCoeff() < 0.0) {
    throw std::invalid_argument("initial rho must be nonnegative");
  }
  Vec y(n + r + m);
  y << initial.x, initial.zeta, initial.rho;

  return run_direct(n, r, m, y, config, [&](const Vec& flat, ResolvedSignals* signals) {
    const AugLagrangianState state{flat.head(n), flat.segment(n, r), flat.tail(m)};
    AugLagrangianEval e = aug_lagrangian_rhs(problem, state);
    if (signals) {
      signals->x = e.x;
      signals->mu = e.mu;
      signals->lambda = e.lambda;
      signals->v = e.derivative.x;
      signals->h = e.derivative.zeta;
      signals->w = problem.constraints(state.x);
    }
    Vec d(n + r + m);
    d << e.derivative.x, e.derivative.zeta, e.derivative.rho;
    return d;
  });
}

Trajectory integrate_richert_cortes(const LpData& lp, const RichertCortesState& initial,
                                    const IntegratorConfig& config) {
  const Index n = lp.theta.size();
  const Index m = lp.phi.size();
  require_size(initial.xi, n, "xi");
  require_size(initial.lambda, m, "lambda");
  if (m > 0 && initial.lambda.minCoeff() < 0.0) {
    throw std::invalid_argument("initial lambda must be nonnegative");
  }
  Vec y(n + m);
  y << initial.xi, initial.lambda;

  return run_direct(n, 0, m, y, config, [&](const Vec& flat, ResolvedSignals* signals) {
    const RichertCortesState state{flat.head(n), flat.tail(m)};
    RichertCortesEval e = richert_cortes_rhs(lp, state);
    if (signals) {
      signals->x = e.x;
      signals->mu = Vec(0);
      signals->lambda = state.lambda;
      signals->v = e.derivative.xi;
      signals->h = Vec(0);
      signals->w = lp.Phi * e.x - lp.phi;
    }
    Vec d(n + m);
    d << e.derivative.xi, e.derivative.lambda;
    return d;
  });
}

double trajectory_divergence(const Trajectory& a, const Trajectory& b, unsigned signals) {
  if (a.samples.size() != b.samples.size()) {
    throw std::invalid_argument("trajectories have different sample counts");
  }
  double gap = 0.0;
  auto diff = [](const Vec& p, const Vec& q) {
    if (p.size() != q.size()) throw DimensionError("signal dimensions differ");
    return p.size() == 0 ? 0.0 : (p - q).cwiseAbs().maxCoeff();
  };
  for (size_t k = 0; k < a.samples.size(); ++k) {
    const auto& sa = a.samples[k];
    const auto& sb = b.samples[k];
    if (std::abs(sa.t - sb.t) > 1e-12 * (1.0 + std::abs(sa.t))) {
      throw std::invalid_argument("trajectories are sampled on different time grids");
    }
    if (signals & signal_x) gap = std::max(gap, diff(sa.signals.x, sb.signals.x));
    if (signals & signal_mu) gap = std::max(gap, diff(sa.signals.mu, sb.signals.mu));
    if (signals & signal_lambda) gap = std::max(gap, diff(sa.signals.lambda, sb.signals.lambda));
  }
  return gap;
}

}  // namespace pdflow
