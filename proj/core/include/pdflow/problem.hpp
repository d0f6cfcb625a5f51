#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pdflow/common.hpp"

namespace pdflow {

/// Oracle closures describing cost and inequality constraints. They must be
/// re-entrant: one problem may back several concurrent simulations.
struct ProblemOracles {
  std::function<double(const Vec&)> cost;
  std::function<Vec(const Vec&)> gradient;
  /// g(x) in R^m. May be empty when m = 0.
  std::function<Vec(const Vec&)> constraints;
  /// Jacobian transpose of g, an n x m matrix whose column l is grad g_l(x).
  std::function<Mat(const Vec&)> constraint_jacobian_t;
};

/// Convex program
///
///   minimize f(x)  subject to  g(x) <= 0,  A x - b = 0
///
/// with x in R^n, g : R^n -> R^m and A in R^{r x n}. Either m or r may be
/// zero. Immutable after construction; every oracle evaluation checks the
/// returned shape and rejects non-finite values.
class ConvexProblem {
 public:
  ConvexProblem(Index n, Index m, ProblemOracles oracles, Mat eq_matrix,
                Vec eq_vector);

  Index dim() const { return n_; }
  Index num_ineq() const { return m_; }
  Index num_eq() const { return eq_matrix_.rows(); }

  double cost(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Vec constraints(const Vec& x) const;
  Mat constraint_jacobian_t(const Vec& x) const;

  const Mat& eq_matrix() const { return eq_matrix_; }
  const Vec& eq_vector() const { return eq_vector_; }

 private:
  void check_point(const Vec& x) const;

  Index n_;
  Index m_;
  ProblemOracles oracles_;
  Mat eq_matrix_;
  Vec eq_vector_;
};

/// Data of the quadratic/linear family  theta^T x + 1/2 x^T Q x  subject to
/// Phi x - phi <= 0 and A x - b = 0. Empty matrices mean "absent".
struct QuadraticData {
  Mat Q;
  Vec theta;
  Mat Phi;
  Vec phi;
  Mat A;
  Vec b;
};

/// Requires Q symmetric positive semidefinite (or empty).
ConvexProblem make_quadratic(const QuadraticData& data);

/// minimize theta^T x subject to Phi x - phi <= 0 (no equality rows).
ConvexProblem make_lp(const Mat& Phi, const Vec& phi, const Vec& theta);

/// The scalar counterexample: f = 0, A = [1], b = [0], no inequalities.
ConvexProblem make_toy();

/// Lift per-agent problems over R^n to a problem over R^{nN} with cost
/// sum_i f_i(x_i) + 1/2 x^T (L kron I_n) x, block-diagonal private
/// constraints, and the extra equality rows (L kron I_n) x = 0.
ConvexProblem distributed_lift(std::span<const ConvexProblem> agents,
                               const Mat& laplacian);

struct KktPoint {
  Vec x;
  Vec mu;
  Vec lambda;
};

struct KktResidual {
  double stationarity = 0.0;
  double eq_violation = 0.0;
  double ineq_violation = 0.0;
  double dual_violation = 0.0;
  double complementarity = 0.0;
  double total = 0.0;
};

KktResidual kkt_residual(const ConvexProblem& problem, const KktPoint& point);

struct Box {
  Vec lower;
  Vec upper;
};

/// Sampled monotonicity smoke test: the minimum of
/// (grad f(x) - grad f(y))^T (x - y) over random pairs in the box, also taken
/// over every grad g_l. Values below about -1e-9 indicate non-convexity.
double monotone_gradient_check(const ConvexProblem& problem, int sample_count,
                               const Box& box, std::uint64_t seed);

}  // namespace pdflow
