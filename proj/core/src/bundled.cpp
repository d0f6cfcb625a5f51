#include "pdflow/bundled.hpp"

#include <stdexcept>

namespace pdflow {

ConvexProblem make_lp(const LpData& lp) { return make_lp(lp.Phi, lp.phi, lp.theta); }

LpData lp_example_data() {
  LpData lp;
  lp.Phi.resize(4, 2);
  lp.Phi << -1, 0,
             0, -1,
             4, 3,
             1, 2;
  lp.phi.resize(4);
  lp.phi << 0, 0, 10, 5;
  lp.theta.resize(2);
  lp.theta << -2, -3;
  return lp;
}

QuadraticData lp_strict_data() {
  const LpData lp = lp_example_data();
  QuadraticData data;
  data.Q = Mat::Identity(2, 2);
  data.theta = lp.theta;
  data.Phi = lp.Phi;
  data.phi = lp.phi;
  return data;
}

Mat distributed_demo_laplacian() {
  Mat L(3, 3);
  L << 2, -1, -1,
       -1, 2, -1,
       -1, -1, 2;
  return L;
}

Vec distributed_demo_costs() {
  Vec theta(3);
  theta << 1, -2, 1;
  return theta;
}

ConvexProblem make_distributed_demo() {
  const Vec theta = distributed_demo_costs();
  std::vector<ConvexProblem> agents;
  for (Index i = 0; i < theta.size(); ++i) {
    Mat Phi(1, 1);
    Phi << 1.0;
    Vec phi(1);
    phi << 1.0;
    Vec t(1);
    t << theta[i];
    agents.push_back(make_lp(Phi, phi, t));
  }
  return distributed_lift(agents, distributed_demo_laplacian());
}

namespace {

Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double value : values) v[i++] = value;
  return v;
}

}  // namespace

BundledProblem bundled_problem(std::string_view name) {
  if (name == "toy") {
    return {"toy", make_toy(), KktPoint{vec({0.0}), vec({0.0}), Vec(0)}};
  }
  if (name == "lp_example") {
    // Active set {3, 4}: 4 l3 + l4 = 2 and 3 l3 + 2 l4 = 3.
    return {"lp_example", make_lp(lp_example_data()),
            KktPoint{vec({1.0, 2.0}), Vec(0), vec({0.0, 0.0, 0.2, 1.2})}};
  }
  if (name == "lp_strict") {
    // grad f(x*) = x* + theta = [-1, -1]; 4 l3 + l4 = 1 and 3 l3 + 2 l4 = 1.
    return {"lp_strict", make_quadratic(lp_strict_data()),
            KktPoint{vec({1.0, 2.0}), Vec(0), vec({0.0, 0.0, 0.2, 0.2})}};
  }
  if (name == "distributed_demo") {
    // Any consensus value c <= 1 is optimal because the costs sum to zero.
    // At c = 0 the private constraints are inactive and L mu = -theta.
    return {"distributed_demo", make_distributed_demo(),
            KktPoint{Vec::Zero(3), vec({-1.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0}),
                     Vec::Zero(3)}};
  }
  throw std::invalid_argument("unknown builtin problem '" + std::string(name) + "'");
}

std::vector<std::string> bundled_names() {
  return {"toy", "lp_example", "lp_strict", "distributed_demo"};
}

}  // namespace pdflow
