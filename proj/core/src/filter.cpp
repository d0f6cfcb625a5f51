#include "pdflow/filter.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace pdflow {

const char* to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::primal:
      return "primal";
    case FilterKind::dual_eq:
      return "dual_eq";
    case FilterKind::dual_ineq:
      return "dual_ineq";
  }
  return "unknown";
}

FilterSpec FilterSpec::integrator(FilterKind kind) {
  FilterSpec spec;
  spec.kind = kind;
  return spec;
}

std::vector<std::string> validate(const FilterSpec& spec) {
  std::vector<std::string> violations;
  if (spec.poles.empty()) {
    violations.emplace_back("order must be at least 1");
  }
  if (spec.poles.size() != spec.residues.size()) {
    violations.emplace_back("poles and residues differ in length");
  }
  if (!spec.poles.empty() && spec.poles.front() != 0.0) {
    violations.emplace_back("first pole must be the integrator at 0");
  }
  for (size_t k = 1; k < spec.poles.size(); ++k) {
    if (!(spec.poles[k] > spec.poles[k - 1])) {
      violations.emplace_back("poles not increasing");
      break;
    }
  }
  for (double pole : spec.poles) {
    if (!std::isfinite(pole)) {
      violations.emplace_back("non-finite pole");
      break;
    }
  }
  for (double residue : spec.residues) {
    if (!(residue > 0.0) || !std::isfinite(residue)) {
      violations.emplace_back("nonpositive residue");
      break;
    }
  }
  if (!(spec.feedthrough >= 0.0) || !std::isfinite(spec.feedthrough)) {
    violations.emplace_back("negative feedthrough");
  }
  return violations;
}

namespace {

// Multiplies an ascending-coefficient polynomial by (s + a).
std::vector<double> times_linear(const std::vector<double>& p, double a) {
  std::vector<double> out(p.size() + 1, 0.0);
  for (size_t i = 0; i < p.size(); ++i) {
    out[i] += a * p[i];
    out[i + 1] += p[i];
  }
  return out;
}

}  // namespace

RationalForm recombine(const FilterSpec& spec) {
  const size_t K = spec.poles.size();
  RationalForm form;
  form.denominator = {1.0};
  for (double a : spec.poles) form.denominator = times_linear(form.denominator, a);

  form.numerator.assign(K + 1, 0.0);
  for (size_t k = 0; k < K; ++k) {
    std::vector<double> term{spec.residues[k]};
    for (size_t j = 0; j < K; ++j) {
      if (j != k) term = times_linear(term, spec.poles[j]);
    }
    for (size_t i = 0; i < term.size(); ++i) form.numerator[i] += term[i];
  }
  for (size_t i = 0; i < form.denominator.size(); ++i) {
    form.numerator[i] += spec.feedthrough * form.denominator[i];
  }
  while (form.numerator.size() > 1 && form.numerator.back() == 0.0) {
    form.numerator.pop_back();
  }
  return form;
}

std::complex<double> evaluate_polynomial(const std::vector<double>& coeffs,
                                         std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::complex<double> frequency_response(const FilterSpec& spec, double omega) {
  const std::complex<double> s(0.0, omega);
  std::complex<double> value = spec.feedthrough;
  for (size_t k = 0; k < spec.poles.size(); ++k) {
    value += spec.residues[k] / (s + spec.poles[k]);
  }
  return value;
}

std::vector<std::complex<double>> polynomial_roots(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() <= 1) return {};
  const Index degree = static_cast<Index>(coeffs.size()) - 1;
  const double lead = coeffs.back();
  Mat companion = Mat::Zero(degree, degree);
  companion.block(1, 0, degree - 1, degree - 1).setIdentity();
  for (Index i = 0; i < degree; ++i) {
    companion(i, degree - 1) = -coeffs[static_cast<size_t>(i)] / lead;
  }
  Eigen::EigenSolver<Mat> solver(companion, false);
  std::vector<std::complex<double>> roots;
  for (Index i = 0; i < degree; ++i) roots.push_back(solver.eigenvalues()[i]);
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

ZeroReport has_stable_zero(const FilterSpec& spec) {
  ZeroReport report;
  report.zeros = polynomial_roots(recombine(spec).numerator);
  report.stable = !report.zeros.empty() &&
                  std::all_of(report.zeros.begin(), report.zeros.end(),
                              [](auto z) { return z.real() < -1e-12; });
  return report;
}

double project_rhs(double sigma, double epsilon) {
  if (epsilon < 0.0) {
    throw NumericalError("projection applied to a negative orthant state");
  }
  return (epsilon == 0.0 && sigma < 0.0) ? 0.0 : sigma;
}

Vec project_rhs(const Vec& sigma, const Vec& epsilon) {
  require_size(epsilon, sigma.size(), "projection state");
  Vec out(sigma.size());
  for (Index i = 0; i < sigma.size(); ++i) out[i] = project_rhs(sigma[i], epsilon[i]);
  return out;
}

void filter_derivative(const FilterSpec& spec, std::span<const double> state,
                       double input, std::span<double> out) {
  const size_t K = spec.poles.size();
  if (state.size() != K || out.size() != K) {
    throw DimensionError("filter state length must equal the filter order");
  }
  for (size_t k = 0; k < K; ++k) {
    double rate = spec.residues[k] * input;
    if (k > 0) rate -= spec.poles[k] * state[k];
    out[k] = spec.kind == FilterKind::dual_ineq ? project_rhs(rate, state[k]) : rate;
  }
}

Vec filter_derivative(const FilterSpec& spec, const Vec& state, double input) {
  Vec out(state.size());
  filter_derivative(spec, std::span<const double>(state.data(), static_cast<size_t>(state.size())),
                    input, std::span<double>(out.data(), static_cast<size_t>(out.size())));
  return out;
}

double filter_output(const FilterSpec& spec, std::span<const double> state,
                     double input) {
  if (state.size() != spec.poles.size()) {
    throw DimensionError("filter state length must equal the filter order");
  }
  double sum = 0.0;
  for (double value : state) sum += value;
  const double through =
      spec.kind == FilterKind::dual_ineq ? std::max(0.0, input) : input;
  return sum + spec.feedthrough * through;
}

double filter_output(const FilterSpec& spec, const Vec& state, double input) {
  return filter_output(
      spec, std::span<const double>(state.data(), static_cast<size_t>(state.size())), input);
}

}  // namespace pdflow
