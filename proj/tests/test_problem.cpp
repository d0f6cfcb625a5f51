#include <doctest.h>

#include <Eigen/Dense>

#include "pdflow/bundled.hpp"
#include "pdflow/problem.hpp"

using namespace pdflow;

namespace {

Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

ConvexProblem concave_quadratic() {
  ProblemOracles o;
  o.cost = [](const Vec& x) { return -x.squaredNorm(); };
  o.gradient = [](const Vec& x) -> Vec { return -2.0 * x; };
  return ConvexProblem(2, 0, o, Mat(0, 2), Vec(0));
}

}  // namespace

TEST_CASE("lp_example data matches the published LP") {
  const LpData lp = lp_example_data();
  Mat Phi(4, 2);
  Phi << -1, 0, 0, -1, 4, 3, 1, 2;
  CHECK(lp.Phi == Phi);
  CHECK(lp.phi == vec({0, 0, 10, 5}));
  CHECK(lp.theta == vec({-2, -3}));
  const ConvexProblem p = make_lp(lp);
  CHECK(p.dim() == 2);
  CHECK(p.num_ineq() == 4);
  CHECK(p.num_eq() == 0);
}

TEST_CASE("make_lp shape errors and the unconstrained case") {
  CHECK_THROWS_AS(make_lp(Mat::Ones(4, 3), Vec::Zero(4), vec({1, 1})), DimensionError);
  const ConvexProblem free = make_lp(Mat(0, 2), Vec(0), vec({1, -1}));
  CHECK(free.num_ineq() == 0);
  CHECK(free.gradient(vec({3, 4})) == vec({1, -1}));
}

TEST_CASE("KKT residual at the active-set point of the LP") {
  // Stationarity with lambda_1 = lambda_2 = 0 leaves a 2x2 system for the two
  // active rows.
  Eigen::Matrix2d active;
  active << 4, 1, 3, 2;
  const Eigen::Vector2d l34 = active.lu().solve(Eigen::Vector2d(2, 3));
  CHECK(l34(0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(l34(1) == doctest::Approx(1.2).epsilon(1e-14));

  const ConvexProblem p = make_lp(lp_example_data());
  const KktResidual r = kkt_residual(p, {vec({1, 2}), Vec(0), vec({0, 0, l34(0), l34(1)})});
  CHECK(r.total <= 1e-12);

  const auto bundled = bundled_problem("lp_example");
  REQUIRE(bundled.reference);
  CHECK((bundled.reference->lambda - vec({0, 0, l34(0), l34(1)})).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("KKT residual at the origin of the LP") {
  const ConvexProblem p = make_lp(lp_example_data());
  const KktResidual r = kkt_residual(p, {vec({0, 0}), Vec(0), Vec::Zero(4)});
  CHECK(r.stationarity == doctest::Approx(3.0));
  CHECK(r.eq_violation == 0.0);
  CHECK(r.ineq_violation == 0.0);
  CHECK(r.dual_violation == 0.0);
  CHECK(r.complementarity == 0.0);
  CHECK(r.total == doctest::Approx(3.0));
}

TEST_CASE("toy problem") {
  const ConvexProblem toy = make_toy();
  CHECK(kkt_residual(toy, {vec({0}), vec({0}), Vec(0)}).total == 0.0);
  CHECK(toy.cost(vec({5})) == 0.0);
  CHECK(toy.gradient(vec({5})) == vec({0}));
  CHECK((toy.eq_matrix() * vec({3}) - toy.eq_vector())(0) == 3.0);
  CHECK(monotone_gradient_check(toy, 50, {vec({-1}), vec({1})}, 3) == 0.0);
}

TEST_CASE("monotone gradient check") {
  QuadraticData q;
  q.Q = Mat::Identity(2, 2);
  q.theta = Vec::Zero(2);
  const ConvexProblem bowl = make_quadratic(q);
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    CHECK(monotone_gradient_check(bowl, 100, {vec({-3, -3}), vec({2, 5})}, seed) >= 0.0);
  }
  CHECK(monotone_gradient_check(concave_quadratic(), 100, {vec({-1, -1}), vec({1, 1})}, 5) < 0.0);
  CHECK_THROWS(monotone_gradient_check(bowl, 0, {vec({-1, -1}), vec({1, 1})}, 5));
}

TEST_CASE("make_quadratic rejects indefinite or asymmetric Q") {
  QuadraticData q;
  q.theta = Vec::Zero(2);
  q.Q = Mat::Identity(2, 2);
  q.Q(0, 0) = -1;
  CHECK_THROWS_AS(make_quadratic(q), std::invalid_argument);
  q.Q = Mat::Identity(2, 2);
  q.Q(0, 1) = 0.5;
  CHECK_THROWS_AS(make_quadratic(q), std::invalid_argument);
}

TEST_CASE("oracles reject non-finite values and wrong shapes") {
  ProblemOracles o;
  o.cost = [](const Vec&) { return std::numeric_limits<double>::quiet_NaN(); };
  o.gradient = [](const Vec& x) -> Vec { return x; };
  const ConvexProblem p(2, 0, o, Mat(0, 2), Vec(0));
  CHECK_THROWS_AS(p.cost(vec({1, 1})), OracleError);
  CHECK_THROWS_AS(p.gradient(vec({1})), DimensionError);
}

TEST_CASE("distributed lift of two agents on a path") {
  const ConvexProblem agent = make_lp(Mat(0, 1), Vec(0), vec({1}));
  const std::vector<ConvexProblem> agents{agent, agent};
  Mat L(2, 2);
  L << 1, -1, -1, 1;
  const ConvexProblem lifted = distributed_lift(agents, L);
  CHECK(lifted.dim() == 2);
  REQUIRE(lifted.num_eq() == 2);
  CHECK(lifted.eq_matrix().row(0) == vec({1, -1}).transpose());
  CHECK(lifted.eq_matrix().row(1) == vec({-1, 1}).transpose());
  // cost = sum theta_i x_i + 1/2 x^T L x
  const Vec x = vec({2, -1});
  CHECK(lifted.cost(x) == doctest::Approx(1.0 + 0.5 * x.dot(L * x)));
}

TEST_CASE("distributed lift of one agent adds a zero row") {
  const ConvexProblem agent = make_lp(lp_example_data());
  const std::vector<ConvexProblem> agents{agent};
  const ConvexProblem lifted = distributed_lift(agents, Mat::Zero(1, 1));
  CHECK(lifted.dim() == 2);
  CHECK(lifted.num_ineq() == 4);
  REQUIRE(lifted.num_eq() == 2);
  CHECK(lifted.eq_matrix().isZero());
  const Vec x = vec({0.3, 0.7});
  CHECK(lifted.cost(x) == doctest::Approx(agent.cost(x)));
  CHECK(lifted.constraints(x) == agent.constraints(x));
}

TEST_CASE("distributed lift validates the Laplacian") {
  const ConvexProblem agent = make_lp(Mat(0, 1), Vec(0), vec({1}));
  const std::vector<ConvexProblem> agents{agent, agent};
  Mat bad(2, 2);
  bad << 1, -1, -1, 2;
  CHECK_THROWS(distributed_lift(agents, bad));
  Mat asym(2, 2);
  asym << 1, -1, 0, 0;
  CHECK_THROWS(distributed_lift(agents, asym));
  CHECK_THROWS_AS(distributed_lift(agents, Mat::Zero(3, 3)), DimensionError);
}

TEST_CASE("distributed demo reference is a KKT point") {
  const auto demo = bundled_problem("distributed_demo");
  REQUIRE(demo.reference);
  CHECK(kkt_residual(demo.problem, *demo.reference).total <= 1e-12);
  CHECK(demo.problem.dim() == 3);
  CHECK(demo.problem.num_ineq() == 3);
}

TEST_CASE("bundled problem names") {
  for (const auto& name : bundled_names()) CHECK(bundled_problem(name).name == name);
  CHECK_THROWS(bundled_problem("nope"));
}
