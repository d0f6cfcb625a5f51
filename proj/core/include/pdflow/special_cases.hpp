#pragma once

#include <string_view>

#include "pdflow/bundled.hpp"
#include "pdflow/engine.hpp"

namespace pdflow {

/// Augmented-Lagrangian and linear-programming primal-dual flows written out
/// directly, independent of the filter-bank engine, so that the two can be
/// cross-checked.
enum class Variant { aug_lagrangian, richert_cortes };

const char* to_string(Variant variant);
Variant parse_variant(std::string_view name);

/// State (x, zeta, rho) of
///   mu = zeta + (A x - b),       lambda = rho + max(0, g(x)),
///   x' = -(grad f + grad g lambda + A^T mu),
///   zeta' = A x - b,             rho' = [g(x)]^+_rho.
struct AugLagrangianState {
  Vec x;
  Vec zeta;
  Vec rho;
};

struct AugLagrangianEval {
  AugLagrangianState derivative;
  Vec x;
  Vec mu;
  Vec lambda;
};

AugLagrangianEval aug_lagrangian_rhs(const ConvexProblem& problem,
                                     const AugLagrangianState& state);

/// State (xi, lambda) of
///   x = xi - theta - Phi^T lambda,  xi' = -theta - Phi^T lambda,
///   lambda' = [Phi x - phi]^+_lambda.
struct RichertCortesState {
  Vec xi;
  Vec lambda;
};

struct RichertCortesEval {
  RichertCortesState derivative;
  Vec x;
};

RichertCortesEval richert_cortes_rhs(const LpData& lp, const RichertCortesState& state);

/// Filter banks under which the generalized dynamics reproduce a variant:
///   aug_lagrangian:  M_i = 1/s,        H_j = (s+1)/s,  G_l = (1/s)^+ + (1)^+
///   richert_cortes:  M_i = (s+1)/s,    G_l = (1/s)^+,  no H
FilterBank as_generalized(Variant variant, const ConvexProblem& problem);

/// Fixed-step integration of the direct variants with the same stepping and
/// clamping policy as the engine. Samples are laid out like engine samples:
/// xi carries x (aug_lagrangian) or xi (richert_cortes), rho carries rho or
/// lambda, and the signals hold x, mu, lambda, v, h, w.
Trajectory integrate_aug_lagrangian(const ConvexProblem& problem,
                                    const AugLagrangianState& initial,
                                    const IntegratorConfig& config);
Trajectory integrate_richert_cortes(const LpData& lp, const RichertCortesState& initial,
                                    const IntegratorConfig& config);

enum SignalMask : unsigned {
  signal_x = 1u << 0,
  signal_mu = 1u << 1,
  signal_lambda = 1u << 2,
  signal_all = signal_x | signal_mu | signal_lambda,
};

/// Supremum over samples and selected signals of the infinity-norm gap.
/// Throws when the two time grids differ.
double trajectory_divergence(const Trajectory& a, const Trajectory& b, unsigned signals);

}  // namespace pdflow
