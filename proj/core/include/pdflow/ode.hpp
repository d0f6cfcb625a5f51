#pragma once

#include <string_view>

#include "pdflow/common.hpp"

namespace pdflow {

enum class Method { euler, rk4 };

const char* to_string(Method method);
Method parse_method(std::string_view name);

struct IntegratorConfig {
  Method method = Method::rk4;
  double step = 1e-3;
  double horizon = 100.0;
  int record_every = 10;
};

void validate(const IntegratorConfig& config);

/// Number of fixed steps covering the horizon.
long long step_count(const IntegratorConfig& config);

/// One explicit step of y' = f(y). `f` is called with the stage state and must
/// return the derivative.
template <typename Rhs>
Vec explicit_step(Method method, const Rhs& f, const Vec& y, double h) {
  if (method == Method::euler) return y + h * f(y);
  const Vec k1 = f(y);
  const Vec k2 = f(y + 0.5 * h * k1);
  const Vec k3 = f(y + 0.5 * h * k2);
  const Vec k4 = f(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace pdflow
