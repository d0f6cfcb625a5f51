#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "pdflow/cli/runner.hpp"

namespace pdflow::cli {

namespace {

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_svg(std::ostream& out, const Trajectory& trajectory, const BlockLayout& layout,
               const std::vector<std::string>& columns) {
  const auto names = column_names(layout);
  std::vector<size_t> index;
  for (const auto& column : columns) {
    const auto it = std::find(names.begin(), names.end(), column);
    if (it == names.end()) throw std::invalid_argument("unknown plot column '" + column + "'");
    index.push_back(static_cast<size_t>(it - names.begin()));
  }

  std::vector<std::vector<double>> rows;
  rows.reserve(trajectory.size());
  for (const auto& sample : trajectory.samples) rows.push_back(row_values(sample));

  double t0 = 0.0, t1 = 1.0;
  if (!rows.empty()) {
    t0 = rows.front()[0];
    t1 = rows.back()[0];
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& row : rows) {
    for (size_t c : index) {
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
    }
  }
  if (!(lo <= hi)) lo = hi = 0.0;
  const double t_span = t1 > t0 ? t1 - t0 : 1.0;
  const double v_span = hi > lo ? hi - lo : 1.0;

  constexpr double width = 800, height = 480;
  constexpr double left = 70, right = 150, top = 30, bottom = 50;
  constexpr double plot_w = width - left - right, plot_h = height - top - bottom;
  auto px = [&](double t) { return left + (t - t0) / t_span * plot_w; };
  auto py = [&](double v) { return top + plot_h - (v - lo) / v_span * plot_h; };

  out << fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      width, height);
  out << fmt::format(
      "<g stroke=\"black\" stroke-width=\"1\">\n"
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n"
      "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\"/>\n"
      "</g>\n",
      left, top + plot_h, left + plot_w, top);
  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"start\">{:.6g}</text>\n", left,
                     top + plot_h + 18, t0);
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.6g}</text>\n", left + plot_w,
                     top + plot_h + 18, t1);
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">t</text>\n",
                     left + plot_w / 2, top + plot_h + 36);
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.6g}</text>\n", left - 6,
                     top + plot_h, lo);
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.6g}</text>\n", left - 6,
                     top + 10, hi);
  out << "</g>\n";

  for (size_t s = 0; s < index.size(); ++s) {
    const char* color = kPalette[s % kPalette.size()];
    out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"", color);
    for (size_t k = 0; k < rows.size(); ++k) {
      out << fmt::format("{}{:.2f},{:.2f}", k ? " " : "", px(rows[k][0]), py(rows[k][index[s]]));
    }
    out << "\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(s);
    out << fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n"
        "<text x=\"{4}\" y=\"{5}\" font-family=\"sans-serif\" font-size=\"12\">{6}</text>\n",
        left + plot_w + 12, ly, left + plot_w + 36, color, left + plot_w + 42, ly + 4,
        escape(columns[s]));
  }
  out << "</svg>\n";
}

}  // namespace pdflow::cli
