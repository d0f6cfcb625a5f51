#pragma once

#include <optional>

#include "pdflow/engine.hpp"
#include "pdflow/problem.hpp"

namespace pdflow {

/// A KKT point (x*, mu*, lambda*) of a problem, used as the origin of the
/// storage functions and supply rates. Construction rejects points whose KKT
/// residual exceeds `gate`.
class ReferencePoint {
 public:
  ReferencePoint(ConvexProblem problem, KktPoint point, double gate = 1e-9);

  const ConvexProblem& problem() const { return problem_; }
  const KktPoint& point() const { return point_; }
  /// grad f(x*)
  const Vec& cost_gradient() const { return cost_gradient_; }
  /// A^T mu*
  const Vec& eq_force() const { return eq_force_; }
  /// grad g(x*) lambda*
  const Vec& ineq_force() const { return ineq_force_; }

 private:
  ConvexProblem problem_;
  KktPoint point_;
  Vec cost_gradient_;
  Vec eq_force_;
  Vec ineq_force_;
};

/// Quadratic storage functions
///   S_i = (xi_i1 - x*_i)^2 / (2 c_i1) + sum_{k>=2} xi_ik^2 / (2 c_ik)
/// and the analogous W_j (zeta, mu*) and U_l (rho, lambda*).
StorageBreakdown storage_values(const DynamicsSystem& system, const SolverState& state,
                                const ReferencePoint& ref);

/// Fills trajectory.storage with one breakdown per sample.
void attach_storage(Trajectory& trajectory, const DynamicsSystem& system,
                    const ReferencePoint& ref);

/// Supply rates x~^T u~, x~^T psi~ and x~^T eta~ at one set of signals.
struct SupplyRates {
  double primal = 0.0;
  double dual_eq = 0.0;
  double dual_ineq = 0.0;
};

SupplyRates supply_rates(const ResolvedSignals& signals, const ReferencePoint& ref);

/// Worst (largest) value over consecutive samples of
///   (storage(t_{k+1}) - storage(t_k)) / dt - mean supply over the interval
/// per subsystem. The dissipation inequalities hold when each margin is at
/// most `tolerance` (10 h).
struct AuditReport {
  double primal = 0.0;
  double dual_eq = 0.0;
  double dual_ineq = 0.0;
  double tolerance = 0.0;

  bool passed() const {
    return primal <= tolerance && dual_eq <= tolerance && dual_ineq <= tolerance;
  }
};

/// Requires attached storage and at least two samples.
AuditReport passivity_audit(const Trajectory& trajectory, const ReferencePoint& ref);

/// Largest V(t_{k+1}) - V(t_k). Requires attached storage and two samples.
double lyapunov_monotone(const Trajectory& trajectory);

/// 10 h (1 + max V): increases above this flag a violation.
double lyapunov_tolerance(const Trajectory& trajectory);

struct ConvergenceReport {
  bool converged = false;
  std::optional<double> settle_time;
  KktResidual final_residual;
};

/// settle_time is the first sample time after which the KKT residual of the
/// resolved (x, mu, lambda) stays at or below tol until the horizon.
ConvergenceReport convergence_report(const Trajectory& trajectory,
                                     const ConvexProblem& problem, double tol);

/// First sample time after which |x - target|_inf stays at or below tol.
std::optional<double> settle_time_to_point(const Trajectory& trajectory, const Vec& target,
                                           double tol);

}  // namespace pdflow
