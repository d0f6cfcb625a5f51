#pragma once

#include <optional>
#include <vector>

#include "pdflow/filter.hpp"
#include "pdflow/noise.hpp"
#include "pdflow/ode.hpp"
#include "pdflow/problem.hpp"

namespace pdflow {

/// Diagonal filter banks: one primal filter per decision variable, one dual
/// filter per equality row and one projected filter per inequality.
struct FilterBank {
  std::vector<FilterSpec> primal;
  std::vector<FilterSpec> dual_eq;
  std::vector<FilterSpec> dual_ineq;
};

/// Stacked filter states. rho stays in the nonnegative orthant.
struct SolverState {
  Vec xi;
  Vec zeta;
  Vec rho;
};

/// Signals of the closed loop at one state:
///   v = -grad f(x) - grad g(x) lambda - A^T mu,  h = A x - b,  w = g(x),
/// with x, mu, lambda the outputs of the three filter banks.
struct ResolvedSignals {
  Vec x;
  Vec mu;
  Vec lambda;
  Vec v;
  Vec h;
  Vec w;
  int iterations = 0;
};

/// Closed-loop generalized primal-dual dynamics for one problem.
class DynamicsSystem {
 public:
  DynamicsSystem(ConvexProblem problem, FilterBank filters);

  const ConvexProblem& problem() const { return problem_; }
  const FilterBank& filters() const { return filters_; }

  Index primal_states() const { return primal_offsets_.back(); }
  Index dual_eq_states() const { return dual_eq_offsets_.back(); }
  Index dual_ineq_states() const { return dual_ineq_offsets_.back(); }
  Index state_size() const {
    return primal_states() + dual_eq_states() + dual_ineq_states();
  }

  /// Offsets of block i inside xi / zeta / rho; entry i+1 minus entry i is
  /// the order of filter i.
  const std::vector<Index>& primal_offsets() const { return primal_offsets_; }
  const std::vector<Index>& dual_eq_offsets() const { return dual_eq_offsets_; }
  const std::vector<Index>& dual_ineq_offsets() const { return dual_ineq_offsets_; }

  /// True when some primal filter has d_i > 0, which closes an algebraic loop
  /// x -> v -> x that resolve_outputs must iterate.
  bool has_primal_feedthrough() const { return primal_feedthrough_; }

  SolverState zero_state() const;
  void check_state(const SolverState& state) const;

  Vec pack(const SolverState& state) const;
  SolverState unpack(const Vec& flat) const;

 private:
  ConvexProblem problem_;
  FilterBank filters_;
  std::vector<Index> primal_offsets_;
  std::vector<Index> dual_eq_offsets_;
  std::vector<Index> dual_ineq_offsets_;
  bool primal_feedthrough_ = false;
};

DynamicsSystem assemble(ConvexProblem problem, FilterBank filters);

/// The algebraic loop did not settle within the iteration budget.
class LoopDivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct LoopSettings {
  double damping = 0.5;
  double tolerance = 1e-12;
  int max_iterations = 200;
};

/// Resolves (x, mu, lambda, v, h, w) from the filter states. `gradient_offset`
/// (empty or length n) is added to grad f, which is how a perturbation of the
/// linear cost term enters.
ResolvedSignals resolve_outputs(const DynamicsSystem& system, const SolverState& state,
                                const Vec& hint, const Vec& gradient_offset = Vec(),
                                const LoopSettings& loop = {});

struct Evaluation {
  SolverState derivative;
  ResolvedSignals signals;
};

Evaluation evaluate(const DynamicsSystem& system, const SolverState& state,
                    const Vec& hint, const Vec& gradient_offset = Vec());

/// Time derivative of the stacked state; rho blocks use the projected rates.
SolverState rhs(const DynamicsSystem& system, const SolverState& state,
                const Vec& gradient_offset = Vec());

struct StorageBreakdown {
  double S = 0.0;
  double W = 0.0;
  double U = 0.0;
  double V = 0.0;
  Vec primal;
  Vec dual_eq;
  Vec dual_ineq;
};

struct Sample {
  double t = 0.0;
  SolverState state;
  ResolvedSignals signals;
};

struct Trajectory {
  double step = 0.0;
  std::vector<Sample> samples;
  /// Empty, or one entry per sample (see certification).
  std::vector<StorageBreakdown> storage;
  /// Largest amount by which an rho entry fell below zero before the
  /// post-step clamp.
  double max_clamp_undershoot = 0.0;
  /// Largest algebraic-loop iteration count used by a recorded or stage
  /// evaluation.
  int max_loop_iterations = 0;

  bool empty() const { return samples.empty(); }
  size_t size() const { return samples.size(); }
};

/// Integration aborted; `partial` holds everything recorded so far.
class IntegrationError : public NumericalError {
 public:
  enum class Reason { loop_divergence, blow_up };
  IntegrationError(Reason reason, const std::string& what, Trajectory partial)
      : NumericalError(what), reason_(reason), partial_(std::move(partial)) {}
  Reason reason() const { return reason_; }
  const Trajectory& partial() const { return partial_; }

 private:
  Reason reason_;
  Trajectory partial_;
};

/// Fixed-step integration with post-step clamping of rho. Stage states of the
/// Runge-Kutta scheme are clamped to the orthant before they are evaluated.
Trajectory integrate(const DynamicsSystem& system, const SolverState& initial,
                     const IntegratorConfig& config,
                     const std::optional<NoiseModel>& noise = std::nullopt);

}  // namespace pdflow
