#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pdflow/certification.hpp"
#include "pdflow/engine.hpp"

namespace pdflow {

/// Block offsets used to name filter sub-states (xi_i_k, zeta_j_q, rho_l_p).
struct BlockLayout {
  std::vector<Index> primal;
  std::vector<Index> dual_eq;
  std::vector<Index> dual_ineq;
};

BlockLayout layout_of(const DynamicsSystem& system);
/// Every block of order one.
BlockLayout unit_layout(Index n, Index r, Index m);

/// Column names: t, xi_*, zeta_*, rho_*, x_*, mu_*, lambda_*, v_*, h_*, w_*
/// (1-based block and sub-state indices).
std::vector<std::string> column_names(const BlockLayout& layout);

/// One row of values in column_names order.
std::vector<double> row_values(const Sample& sample);

/// Comma-separated, header first, numbers in shortest round-trip form.
void write_csv(std::ostream& out, const Trajectory& trajectory, const BlockLayout& layout);

/// {"columns": [...], "data": {"t": [...], "xi_1_1": [...], ...}}
std::string trajectory_json(const Trajectory& trajectory, const BlockLayout& layout);

struct RunReport {
  double convergence_tol = 1e-2;
  ConvergenceReport convergence;
  std::optional<AuditReport> audit;
  std::optional<double> lyapunov_max_increase;
  std::optional<double> lyapunov_tolerance;
};

std::string report_json(const RunReport& report);

}  // namespace pdflow
