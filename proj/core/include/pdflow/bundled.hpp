#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdflow/problem.hpp"

namespace pdflow {

/// Linear program  minimize theta^T x  subject to  Phi x - phi <= 0.
struct LpData {
  Mat Phi;
  Vec phi;
  Vec theta;
};

ConvexProblem make_lp(const LpData& lp);

/// The two-variable, four-constraint benchmark LP with optimum x* = [1, 2].
LpData lp_example_data();

/// Same constraints as lp_example_data() with cost 1/2 |x|^2 + theta^T x.
QuadraticData lp_strict_data();

/// Three agents on R, costs theta_i x with theta = [1, -2, 1], private
/// constraints x <= 1, complete-graph Laplacian.
ConvexProblem make_distributed_demo();
Mat distributed_demo_laplacian();
Vec distributed_demo_costs();

/// A named problem shipped with the library together with a KKT point that
/// can serve as the storage-function reference.
struct BundledProblem {
  std::string name;
  ConvexProblem problem;
  std::optional<KktPoint> reference;
};

/// Known names: "toy", "lp_example", "lp_strict", "distributed_demo".
BundledProblem bundled_problem(std::string_view name);
std::vector<std::string> bundled_names();

}  // namespace pdflow
