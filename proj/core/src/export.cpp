#include "pdflow/export.hpp"

#include <fmt/format.h>

#include <json.hpp>
#include <ostream>

namespace pdflow {

namespace {

std::vector<Index> unit_offsets(Index count) {
  std::vector<Index> offsets(static_cast<size_t>(count) + 1);
  for (Index i = 0; i <= count; ++i) offsets[static_cast<size_t>(i)] = i;
  return offsets;
}

void block_names(std::vector<std::string>& out, const char* prefix,
                 const std::vector<Index>& offsets) {
  for (size_t i = 0; i + 1 < offsets.size(); ++i) {
    for (Index k = 0; k < offsets[i + 1] - offsets[i]; ++k) {
      out.push_back(fmt::format("{}_{}_{}", prefix, i + 1, k + 1));
    }
  }
}

void signal_names(std::vector<std::string>& out, const char* prefix, size_t count) {
  for (size_t i = 0; i < count; ++i) out.push_back(fmt::format("{}_{}", prefix, i + 1));
}

void append(std::vector<double>& out, const Vec& v) {
  out.insert(out.end(), v.data(), v.data() + v.size());
}

}  // namespace

BlockLayout layout_of(const DynamicsSystem& system) {
  return {system.primal_offsets(), system.dual_eq_offsets(), system.dual_ineq_offsets()};
}

BlockLayout unit_layout(Index n, Index r, Index m) {
  return {unit_offsets(n), unit_offsets(r), unit_offsets(m)};
}

std::vector<std::string> column_names(const BlockLayout& layout) {
  std::vector<std::string> names{"t"};
  block_names(names, "xi", layout.primal);
  block_names(names, "zeta", layout.dual_eq);
  block_names(names, "rho", layout.dual_ineq);
  const size_t n = layout.primal.size() - 1;
  const size_t r = layout.dual_eq.size() - 1;
  const size_t m = layout.dual_ineq.size() - 1;
  signal_names(names, "x", n);
  signal_names(names, "mu", r);
  signal_names(names, "lambda", m);
  signal_names(names, "v", n);
  signal_names(names, "h", r);
  signal_names(names, "w", m);
  return names;
}

std::vector<double> row_values(const Sample& sample) {
  std::vector<double> row{sample.t};
  append(row, sample.state.xi);
  append(row, sample.state.zeta);
  append(row, sample.state.rho);
  const auto& s = sample.signals;
  append(row, s.x);
  append(row, s.mu);
  append(row, s.lambda);
  append(row, s.v);
  append(row, s.h);
  append(row, s.w);
  return row;
}

void write_csv(std::ostream& out, const Trajectory& trajectory, const BlockLayout& layout) {
  const auto names = column_names(layout);
  out << fmt::format("{}\n", fmt::join(names, ","));
  for (const auto& sample : trajectory.samples) {
    const auto row = row_values(sample);
    if (row.size() != names.size()) {
      throw DimensionError("sample does not match the CSV layout");
    }
    out << fmt::format("{}\n", fmt::join(row, ","));
  }
}

std::string trajectory_json(const Trajectory& trajectory, const BlockLayout& layout) {
  const auto names = column_names(layout);
  std::vector<std::vector<double>> columns(names.size());
  for (const auto& sample : trajectory.samples) {
    const auto row = row_values(sample);
    if (row.size() != names.size()) {
      throw DimensionError("sample does not match the JSON layout");
    }
    for (size_t c = 0; c < row.size(); ++c) columns[c].push_back(row[c]);
  }
  nlohmann::ordered_json doc;
  doc["columns"] = names;
  auto& data = doc["data"];
  data = nlohmann::ordered_json::object();
  for (size_t c = 0; c < names.size(); ++c) data[names[c]] = columns[c];
  return doc.dump();
}

std::string report_json(const RunReport& report) {
  nlohmann::ordered_json doc;
  const auto& conv = report.convergence;
  const auto& r = conv.final_residual;
  doc["convergence"] = {
      {"tol", report.convergence_tol},
      {"converged", conv.converged},
      {"settle_time", conv.settle_time ? nlohmann::ordered_json(*conv.settle_time) : nlohmann::ordered_json(nullptr)},
      {"final_residual",
       {{"stationarity", r.stationarity},
        {"eq_violation", r.eq_violation},
        {"ineq_violation", r.ineq_violation},
        {"dual_violation", r.dual_violation},
        {"complementarity", r.complementarity},
        {"total", r.total}}}};
  if (report.lyapunov_max_increase) {
    doc["lyapunov"] = {{"max_increase", *report.lyapunov_max_increase},
                       {"tolerance", report.lyapunov_tolerance.value_or(0.0)}};
  }
  if (report.audit) {
    const auto& a = *report.audit;
    doc["passivity"] = {{"primal", a.primal},
                        {"dual_eq", a.dual_eq},
                        {"dual_ineq", a.dual_ineq},
                        {"tolerance", a.tolerance},
                        {"passed", a.passed()}};
  }
  return doc.dump(2);
}

}  // namespace pdflow
