#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pdflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Shapes of vectors, matrices or filter banks do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A user-supplied oracle returned NaN or infinity.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base for failures that happen while the dynamics are being evaluated
/// (algebraic-loop divergence, blow-up, corrupted orthant states).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_size(const Vec& v, Index expected, const char* what) {
  if (v.size() != expected) {
    throw DimensionError(std::string(what) + ": expected length " +
                         std::to_string(expected) + ", got " +
                         std::to_string(v.size()));
  }
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace pdflow
