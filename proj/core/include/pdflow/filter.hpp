#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "pdflow/common.hpp"

namespace pdflow {

enum class FilterKind { primal, dual_eq, dual_ineq };

const char* to_string(FilterKind kind);

/// One diagonal entry of a filter bank in partial-fraction form
///
///   F(s) = c_1 / s + sum_{k>=2} c_k / (s + a_k) + d
///
/// with poles [0, a_2, ..., a_K] (a_k strictly increasing), residues c_k > 0
/// and feedthrough d >= 0. The realization keeps one state per pole. For
/// FilterKind::dual_ineq every state lives in the nonnegative orthant and the
/// feedthrough only acts on the positive part of the input.
struct FilterSpec {
  std::vector<double> poles{0.0};
  std::vector<double> residues{1.0};
  double feedthrough = 0.0;
  FilterKind kind = FilterKind::primal;

  Index order() const { return static_cast<Index>(poles.size()); }

  static FilterSpec integrator(FilterKind kind = FilterKind::primal);
};

/// Returns every violated invariant; an empty list means the spec is valid.
std::vector<std::string> validate(const FilterSpec& spec);

/// Polynomial coefficients in ascending powers of s.
struct RationalForm {
  std::vector<double> numerator;
  std::vector<double> denominator;
};

/// Recombines the partial fractions over the common denominator
/// s * prod_k (s + a_k).
RationalForm recombine(const FilterSpec& spec);

std::complex<double> evaluate_polynomial(const std::vector<double>& coeffs,
                                         std::complex<double> s);

/// F(j omega) evaluated from the partial-fraction form.
std::complex<double> frequency_response(const FilterSpec& spec, double omega);

/// Roots of a real polynomial (ascending coefficients) via the eigenvalues of
/// its companion matrix. Leading zero coefficients are trimmed.
std::vector<std::complex<double>> polynomial_roots(std::vector<double> coeffs);

struct ZeroReport {
  bool stable = false;
  std::vector<std::complex<double>> zeros;
};

/// True iff the spec has at least one zero and every zero has real part below
/// -1e-12.
ZeroReport has_stable_zero(const FilterSpec& spec);

/// Projection [sigma]^+_epsilon: 0 when epsilon == 0 and sigma < 0, otherwise
/// sigma. Throws NumericalError for epsilon < 0.
double project_rhs(double sigma, double epsilon);
Vec project_rhs(const Vec& sigma, const Vec& epsilon);

/// State derivative of one filter realization driven by a scalar input.
void filter_derivative(const FilterSpec& spec, std::span<const double> state,
                       double input, std::span<double> out);
Vec filter_derivative(const FilterSpec& spec, const Vec& state, double input);

double filter_output(const FilterSpec& spec, std::span<const double> state,
                     double input);
double filter_output(const FilterSpec& spec, const Vec& state, double input);

}  // namespace pdflow
