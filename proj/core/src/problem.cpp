#include "pdflow/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

namespace pdflow {

namespace {

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) {
    throw OracleError(std::string(what) + " returned a non-finite value");
  }
}

}  // namespace

ConvexProblem::ConvexProblem(Index n, Index m, ProblemOracles oracles,
                             Mat eq_matrix, Vec eq_vector)
    : n_(n),
      m_(m),
      oracles_(std::move(oracles)),
      eq_matrix_(std::move(eq_matrix)),
      eq_vector_(std::move(eq_vector)) {
  if (n_ <= 0) throw DimensionError("problem dimension must be positive");
  if (m_ < 0) throw DimensionError("negative inequality count");
  if (!oracles_.cost || !oracles_.gradient) {
    throw std::invalid_argument("cost and gradient oracles are required");
  }
  if (m_ > 0 && (!oracles_.constraints || !oracles_.constraint_jacobian_t)) {
    throw std::invalid_argument(
        "inequality oracles are required when m > 0");
  }
  if (eq_matrix_.rows() == 0) eq_matrix_.resize(0, n_);
  if (eq_matrix_.cols() != n_) {
    throw DimensionError("equality matrix must have n columns");
  }
  if (eq_vector_.size() != eq_matrix_.rows()) {
    throw DimensionError("equality vector length must equal row count of A");
  }
}

void ConvexProblem::check_point(const Vec& x) const {
  require_size(x, n_, "decision vector");
}

double ConvexProblem::cost(const Vec& x) const {
  check_point(x);
  const double value = oracles_.cost(x);
  if (!std::isfinite(value)) throw OracleError("cost returned a non-finite value");
  return value;
}

Vec ConvexProblem::gradient(const Vec& x) const {
  check_point(x);
  Vec grad = oracles_.gradient(x);
  require_size(grad, n_, "cost gradient");
  require_finite(grad, "cost gradient");
  return grad;
}

Vec ConvexProblem::constraints(const Vec& x) const {
  check_point(x);
  if (m_ == 0) return Vec(0);
  Vec g = oracles_.constraints(x);
  require_size(g, m_, "inequality map");
  require_finite(g, "inequality map");
  return g;
}

Mat ConvexProblem::constraint_jacobian_t(const Vec& x) const {
  check_point(x);
  if (m_ == 0) return Mat(n_, 0);
  Mat jac = oracles_.constraint_jacobian_t(x);
  if (jac.rows() != n_ || jac.cols() != m_) {
    throw DimensionError("inequality Jacobian must be n x m");
  }
  if (!jac.allFinite()) {
    throw OracleError("inequality Jacobian returned a non-finite value");
  }
  return jac;
}

ConvexProblem make_quadratic(const QuadraticData& data) {
  const Index n = data.theta.size();
  if (n == 0) throw DimensionError("theta must be non-empty");

  Mat Q = data.Q.size() == 0 ? Mat::Zero(n, n) : data.Q;
  if (Q.rows() != n || Q.cols() != n) throw DimensionError("Q must be n x n");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("Q must be symmetric");
  }
  if (Q.norm() > 0.0) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(Q);
    if (eig.eigenvalues().minCoeff() < -1e-9) {
      throw std::invalid_argument("Q must be positive semidefinite");
    }
  }

  const Index m = data.Phi.rows();
  if (m > 0 && data.Phi.cols() != n) throw DimensionError("Phi must have n columns");
  if (data.phi.size() != m) throw DimensionError("phi length must equal rows of Phi");

  Mat A = data.A.size() == 0 ? Mat(0, n) : data.A;
  Vec b = data.b.size() == 0 ? Vec(0) : data.b;
  if (A.cols() != n) throw DimensionError("A must have n columns");
  if (b.size() != A.rows()) throw DimensionError("b length must equal rows of A");

  const Vec theta = data.theta;
  ProblemOracles oracles;
  oracles.cost = [Q, theta](const Vec& x) {
    return theta.dot(x) + 0.5 * x.dot(Q * x);
  };
  oracles.gradient = [Q, theta](const Vec& x) -> Vec { return theta + Q * x; };
  if (m > 0) {
    const Mat Phi = data.Phi;
    const Vec phi = data.phi;
    const Mat PhiT = Phi.transpose();
    oracles.constraints = [Phi, phi](const Vec& x) -> Vec { return Phi * x - phi; };
    oracles.constraint_jacobian_t = [PhiT](const Vec&) -> Mat { return PhiT; };
  }
  return ConvexProblem(n, m, std::move(oracles), std::move(A), std::move(b));
}

ConvexProblem make_lp(const Mat& Phi, const Vec& phi, const Vec& theta) {
  QuadraticData data;
  data.theta = theta;
  data.Phi = Phi.size() == 0 ? Mat(0, theta.size()) : Phi;
  data.phi = phi;
  return make_quadratic(data);
}

ConvexProblem make_toy() {
  ProblemOracles oracles;
  oracles.cost = [](const Vec&) { return 0.0; };
  oracles.gradient = [](const Vec& x) -> Vec { return Vec::Zero(x.size()); };
  Mat A(1, 1);
  A << 1.0;
  Vec b = Vec::Zero(1);
  return ConvexProblem(1, 0, std::move(oracles), std::move(A), std::move(b));
}

namespace {

// Number of connected components of the graph whose edges are the nonzero
// off-diagonal entries of the Laplacian.
int component_count(const Mat& laplacian) {
  const Index N = laplacian.rows();
  std::vector<Index> parent(static_cast<size_t>(N));
  for (Index i = 0; i < N; ++i) parent[i] = i;
  auto find = [&](Index i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (Index i = 0; i < N; ++i) {
    for (Index j = i + 1; j < N; ++j) {
      if (laplacian(i, j) != 0.0) parent[find(i)] = find(j);
    }
  }
  int count = 0;
  for (Index i = 0; i < N; ++i) count += find(i) == i ? 1 : 0;
  return count;
}

Mat kron_identity(const Mat& L, Index n) {
  Mat out = Mat::Zero(L.rows() * n, L.cols() * n);
  for (Index i = 0; i < L.rows(); ++i) {
    for (Index j = 0; j < L.cols(); ++j) {
      out.block(i * n, j * n, n, n).diagonal().setConstant(L(i, j));
    }
  }
  return out;
}

void check_laplacian(const Mat& L) {
  if (L.rows() != L.cols() || L.rows() == 0) {
    throw DimensionError("Laplacian must be a non-empty square matrix");
  }
  if ((L - L.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("Laplacian must be symmetric");
  }
  if (L.rowwise().sum().cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("Laplacian rows must sum to zero");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(L);
  const Vec& ev = eig.eigenvalues();
  if (ev.minCoeff() < -1e-9) {
    throw std::invalid_argument("Laplacian has a negative eigenvalue");
  }
  const int zeros = static_cast<int>((ev.array().abs() <= 1e-9).count());
  if (zeros != component_count(L)) {
    throw std::invalid_argument(
        "Laplacian null space does not match its connected components");
  }
}

}  // namespace

ConvexProblem distributed_lift(std::span<const ConvexProblem> agents,
                               const Mat& laplacian) {
  check_laplacian(laplacian);
  const Index N = laplacian.rows();
  if (static_cast<Index>(agents.size()) != N) {
    throw DimensionError("agent count must equal Laplacian size");
  }
  const Index n = agents.front().dim();
  Index m_total = 0;
  Index r_total = 0;
  for (const auto& agent : agents) {
    if (agent.dim() != n) throw DimensionError("agents must share a dimension");
    m_total += agent.num_ineq();
    r_total += agent.num_eq();
  }

  const Mat big_l = kron_identity(laplacian, n);
  std::vector<ConvexProblem> local(agents.begin(), agents.end());

  ProblemOracles oracles;
  oracles.cost = [local, big_l, n](const Vec& x) {
    double total = 0.5 * x.dot(big_l * x);
    for (size_t i = 0; i < local.size(); ++i) {
      total += local[i].cost(x.segment(static_cast<Index>(i) * n, n));
    }
    return total;
  };
  oracles.gradient = [local, big_l, n](const Vec& x) -> Vec {
    Vec grad = big_l * x;
    for (size_t i = 0; i < local.size(); ++i) {
      const Index off = static_cast<Index>(i) * n;
      grad.segment(off, n) += local[i].gradient(x.segment(off, n));
    }
    return grad;
  };
  if (m_total > 0) {
    oracles.constraints = [local, n, m_total](const Vec& x) -> Vec {
      Vec g(m_total);
      Index row = 0;
      for (size_t i = 0; i < local.size(); ++i) {
        const Index mi = local[i].num_ineq();
        if (mi == 0) continue;
        g.segment(row, mi) = local[i].constraints(x.segment(static_cast<Index>(i) * n, n));
        row += mi;
      }
      return g;
    };
    oracles.constraint_jacobian_t = [local, n, m_total](const Vec& x) -> Mat {
      Mat jac = Mat::Zero(x.size(), m_total);
      Index col = 0;
      for (size_t i = 0; i < local.size(); ++i) {
        const Index mi = local[i].num_ineq();
        if (mi == 0) continue;
        const Index off = static_cast<Index>(i) * n;
        jac.block(off, col, n, mi) = local[i].constraint_jacobian_t(x.segment(off, n));
        col += mi;
      }
      return jac;
    };
  }

  Mat A = Mat::Zero(r_total + N * n, N * n);
  Vec b = Vec::Zero(r_total + N * n);
  Index row = 0;
  for (Index i = 0; i < N; ++i) {
    const auto& agent = local[static_cast<size_t>(i)];
    const Index ri = agent.num_eq();
    if (ri == 0) continue;
    A.block(row, i * n, ri, n) = agent.eq_matrix();
    b.segment(row, ri) = agent.eq_vector();
    row += ri;
  }
  A.bottomRows(N * n) = big_l;

  return ConvexProblem(N * n, m_total, std::move(oracles), std::move(A), std::move(b));
}

KktResidual kkt_residual(const ConvexProblem& problem, const KktPoint& point) {
  require_size(point.x, problem.dim(), "KKT point x");
  require_size(point.mu, problem.num_eq(), "KKT point mu");
  require_size(point.lambda, problem.num_ineq(), "KKT point lambda");

  KktResidual r;
  Vec stationarity = problem.gradient(point.x);
  if (problem.num_ineq() > 0) {
    stationarity += problem.constraint_jacobian_t(point.x) * point.lambda;
  }
  if (problem.num_eq() > 0) {
    stationarity += problem.eq_matrix().transpose() * point.mu;
    r.eq_violation =
        (problem.eq_matrix() * point.x - problem.eq_vector()).cwiseAbs().maxCoeff();
  }
  r.stationarity = stationarity.cwiseAbs().maxCoeff();
  if (problem.num_ineq() > 0) {
    const Vec g = problem.constraints(point.x);
    r.ineq_violation = g.cwiseMax(0.0).maxCoeff();
    r.dual_violation = (-point.lambda).cwiseMax(0.0).maxCoeff();
    r.complementarity = point.lambda.cwiseProduct(g).cwiseAbs().maxCoeff();
  }
  r.total = r.stationarity + r.eq_violation + r.ineq_violation +
            r.dual_violation + r.complementarity;
  return r;
}

double monotone_gradient_check(const ConvexProblem& problem, int sample_count,
                               const Box& box, std::uint64_t seed) {
  const Index n = problem.dim();
  require_size(box.lower, n, "box lower corner");
  require_size(box.upper, n, "box upper corner");
  if (sample_count <= 0) throw std::invalid_argument("sample_count must be positive");
  if ((box.upper - box.lower).minCoeff() <= 0.0) {
    throw std::invalid_argument("box must be nondegenerate");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    Vec p(n);
    for (Index i = 0; i < n; ++i) {
      p[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * unit(rng);
    }
    return p;
  };

  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < sample_count; ++k) {
    const Vec x = draw();
    const Vec y = draw();
    const Vec dx = x - y;
    worst = std::min(worst, (problem.gradient(x) - problem.gradient(y)).dot(dx));
    if (problem.num_ineq() > 0) {
      const Mat gx = problem.constraint_jacobian_t(x);
      const Mat gy = problem.constraint_jacobian_t(y);
      for (Index l = 0; l < problem.num_ineq(); ++l) {
        worst = std::min(worst, (gx.col(l) - gy.col(l)).dot(dx));
      }
    }
  }
  return worst;
}

}  // namespace pdflow
