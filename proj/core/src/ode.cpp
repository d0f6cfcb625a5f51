#include "pdflow/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pdflow {

const char* to_string(Method method) {
  return method == Method::euler ? "euler" : "rk4";
}

Method parse_method(std::string_view name) {
  if (name == "euler") return Method::euler;
  if (name == "rk4") return Method::rk4;
  throw std::invalid_argument("unknown integration method '" + std::string(name) + "'");
}

void validate(const IntegratorConfig& config) {
  if (!(config.step > 0.0) || !std::isfinite(config.step)) {
    throw std::invalid_argument("integrator step must be positive");
  }
  if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
    throw std::invalid_argument("integrator horizon must be positive");
  }
  if (config.record_every < 1) {
    throw std::invalid_argument("record_every must be at least 1");
  }
}

long long step_count(const IntegratorConfig& config) {
  return std::max(1LL, std::llround(config.horizon / config.step));
}

}  // namespace pdflow
