#include "pdflow/certification.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <utility>

namespace pdflow {

ReferencePoint::ReferencePoint(ConvexProblem problem, KktPoint point, double gate)
    : problem_(std::move(problem)), point_(std::move(point)) {
  const KktResidual residual = kkt_residual(problem_, point_);
  if (!(residual.total <= gate)) {
    throw std::invalid_argument("reference point is not a KKT point (residual " +
                                std::to_string(residual.total) + ")");
  }
  cost_gradient_ = problem_.gradient(point_.x);
  eq_force_ = problem_.num_eq() > 0 ? Vec(problem_.eq_matrix().transpose() * point_.mu)
                                    : Vec::Zero(problem_.dim());
  ineq_force_ = problem_.num_ineq() > 0
                    ? Vec(problem_.constraint_jacobian_t(point_.x) * point_.lambda)
                    : Vec::Zero(problem_.dim());
}

namespace {

// Storage of one filter bank around the reference outputs `target`.
double bank_storage(const std::vector<FilterSpec>& specs, const std::vector<Index>& offsets,
                    const Vec& state, const Vec& target, Vec& per_block) {
  per_block.resize(static_cast<Index>(specs.size()));
  for (size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    const Index off = offsets[i];
    const double first = state[off] - target[static_cast<Index>(i)];
    double value = first * first / (2.0 * spec.residues[0]);
    for (Index k = 1; k < spec.order(); ++k) {
      const double s = state[off + k];
      value += s * s / (2.0 * spec.residues[static_cast<size_t>(k)]);
    }
    per_block[static_cast<Index>(i)] = value;
  }
  return per_block.sum();
}

const std::vector<StorageBreakdown>& require_storage(const Trajectory& trajectory) {
  if (trajectory.samples.size() < 2) {
    throw std::invalid_argument("trajectory needs at least two samples");
  }
  if (trajectory.storage.size() != trajectory.samples.size()) {
    throw std::invalid_argument("trajectory has no storage values attached");
  }
  return trajectory.storage;
}

}  // namespace

StorageBreakdown storage_values(const DynamicsSystem& system, const SolverState& state,
                                const ReferencePoint& ref) {
  system.check_state(state);
  const auto& p = ref.point();
  require_size(p.x, system.problem().dim(), "reference x");
  require_size(p.mu, system.problem().num_eq(), "reference mu");
  require_size(p.lambda, system.problem().num_ineq(), "reference lambda");

  const auto& bank = system.filters();
  StorageBreakdown out;
  out.S = bank_storage(bank.primal, system.primal_offsets(), state.xi, p.x, out.primal);
  out.W = bank_storage(bank.dual_eq, system.dual_eq_offsets(), state.zeta, p.mu, out.dual_eq);
  out.U = bank_storage(bank.dual_ineq, system.dual_ineq_offsets(), state.rho, p.lambda,
                       out.dual_ineq);
  out.V = out.S + out.W + out.U;
  return out;
}

void attach_storage(Trajectory& trajectory, const DynamicsSystem& system,
                    const ReferencePoint& ref) {
  trajectory.storage.clear();
  trajectory.storage.reserve(trajectory.samples.size());
  for (const auto& sample : trajectory.samples) {
    trajectory.storage.push_back(storage_values(system, sample.state, ref));
  }
}

SupplyRates supply_rates(const ResolvedSignals& signals, const ReferencePoint& ref) {
  const auto& problem = ref.problem();
  const Vec x_dev = signals.x - ref.point().x;
  const Vec psi = problem.num_eq() > 0 ? Vec(problem.eq_matrix().transpose() * signals.mu)
                                       : Vec::Zero(problem.dim());
  const Vec eta = problem.num_ineq() > 0
                      ? Vec(problem.constraint_jacobian_t(signals.x) * signals.lambda)
                      : Vec::Zero(problem.dim());
  const Vec u = -eta - psi;

  SupplyRates rates;
  rates.primal = x_dev.dot(u - ref.cost_gradient());
  rates.dual_eq = x_dev.dot(psi - ref.eq_force());
  rates.dual_ineq = x_dev.dot(eta - ref.ineq_force());
  return rates;
}

AuditReport passivity_audit(const Trajectory& trajectory, const ReferencePoint& ref) {
  const auto& storage = require_storage(trajectory);
  AuditReport report;
  report.primal = report.dual_eq = report.dual_ineq = -std::numeric_limits<double>::infinity();
  report.tolerance = 10.0 * trajectory.step;

  SupplyRates previous = supply_rates(trajectory.samples.front().signals, ref);
  for (size_t k = 0; k + 1 < trajectory.samples.size(); ++k) {
    const double dt = trajectory.samples[k + 1].t - trajectory.samples[k].t;
    const SupplyRates next = supply_rates(trajectory.samples[k + 1].signals, ref);
    const auto& s0 = storage[k];
    const auto& s1 = storage[k + 1];
    report.primal = std::max(report.primal,
                             (s1.S - s0.S) / dt - 0.5 * (previous.primal + next.primal));
    report.dual_eq = std::max(report.dual_eq,
                              (s1.W - s0.W) / dt - 0.5 * (previous.dual_eq + next.dual_eq));
    report.dual_ineq = std::max(
        report.dual_ineq, (s1.U - s0.U) / dt - 0.5 * (previous.dual_ineq + next.dual_ineq));
    previous = next;
  }
  return report;
}

double lyapunov_monotone(const Trajectory& trajectory) {
  const auto& storage = require_storage(trajectory);
  double worst = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k + 1 < storage.size(); ++k) {
    worst = std::max(worst, storage[k + 1].V - storage[k].V);
  }
  return worst;
}

double lyapunov_tolerance(const Trajectory& trajectory) {
  const auto& storage = require_storage(trajectory);
  double max_v = 0.0;
  for (const auto& s : storage) max_v = std::max(max_v, s.V);
  return 10.0 * trajectory.step * (1.0 + max_v);
}

namespace {

template <typename Within>
std::optional<double> settle_time(const Trajectory& trajectory, Within within) {
  std::optional<double> settle;
  for (const auto& sample : trajectory.samples) {
    if (within(sample)) {
      if (!settle) settle = sample.t;
    } else {
      settle.reset();
    }
  }
  return settle;
}

}  // namespace

ConvergenceReport convergence_report(const Trajectory& trajectory,
                                     const ConvexProblem& problem, double tol) {
  ConvergenceReport report;
  if (trajectory.empty()) return report;
  report.settle_time = settle_time(trajectory, [&](const Sample& s) {
    return kkt_residual(problem, {s.signals.x, s.signals.mu, s.signals.lambda}).total <= tol;
  });
  const auto& last = trajectory.samples.back().signals;
  report.final_residual = kkt_residual(problem, {last.x, last.mu, last.lambda});
  report.converged = report.settle_time.has_value();
  return report;
}

std::optional<double> settle_time_to_point(const Trajectory& trajectory, const Vec& target,
                                           double tol) {
  return settle_time(trajectory, [&](const Sample& s) {
    return (s.signals.x - target).cwiseAbs().maxCoeff() <= tol;
  });
}

}  // namespace pdflow
