#include "rigidsim/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rigidsim/io.hpp"

namespace rigidsim {

namespace {

constexpr double kWidth = 720, kHeight = 400, kLeft = 70, kRight = 160, kTop = 40, kBottom = 50;

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                               "#bcbd22", "#17becf"};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::vector<Series>& series) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    svg << "<text x=\"" << sx(fx) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << sy(fy) + 4 << "\" text-anchor=\"end\">"
        << num(fy) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % kPalette.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (const auto& [x, y] : series[k].points) svg << sx(x) << ',' << sy(y) << ' ';
    svg << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(k) + 8;
    svg << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kRight + 32 << "\" y2=\"" << ly << "\" stroke=\"" << color << "\"/>\n";
    svg << "<text x=\"" << kWidth - kRight + 36 << "\" y=\"" << ly + 4 << "\">"
        << series[k].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string svg_event_raster(const std::string& title, const EventLog& log, std::size_t agents,
                             double t_end) {
  bool global = false;
  for (const auto& e : log.events) global = global || e.scope == kGlobalScope;
  const std::size_t rows = global ? 1 : agents;
  const double pw = kWidth - kLeft - kRight;
  const double row_h = 28;
  const double height = kTop + kBottom + row_h * static_cast<double>(rows);
  const double span = t_end > 0 ? t_end : 1.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << title << "</text>\n";
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = kTop + row_h * static_cast<double>(r) + row_h / 2;
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << (global ? std::string("global") : "agent " + std::to_string(r + 1)) << "</text>\n";
  }
  for (const auto& e : log.events) {
    const std::size_t r = e.scope == kGlobalScope ? 0 : e.scope;
    const double x = kLeft + e.time / span * pw;
    const double y = kTop + row_h * static_cast<double>(r);
    svg << "<line x1=\"" << x << "\" y1=\"" << y + 4 << "\" x2=\"" << x << "\" y2=\""
        << y + row_h - 4 << "\" stroke=\"black\" stroke-width=\"0.6\"/>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">time [s] (0 to " << num(span) << ")</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_plots(const std::filesystem::path& dir, const Scenario& scenario,
                 const SimulationTrace& trace, const EventLog& log) {
  std::vector<Series> errors(trace.edges);
  for (std::size_t k = 0; k < trace.edges; ++k) {
    const Edge& e = scenario.graph.edge(k);
    errors[k].label = "e" + std::to_string(k + 1) + " (" + std::to_string(e.i + 1) + "," +
                      std::to_string(e.j + 1) + ")";
  }
  std::vector<Series> deltas;
  if (trace.controller == ControllerKind::CentralizedEvent) {
    deltas = {{"|delta|", {}}, {"gamma |R^T e|", {}}};
  } else if (is_distributed(trace.controller)) {
    for (std::size_t i = 0; i < trace.agents; ++i) {
      deltas.push_back({"|delta_" + std::to_string(i + 1) + "|", {}});
    }
  }
  for (const auto& s : trace.samples) {
    for (std::size_t k = 0; k < trace.edges; ++k) {
      errors[k].points.emplace_back(s.time, s.errors(static_cast<Eigen::Index>(k)));
    }
    if (trace.controller == ControllerKind::CentralizedEvent) {
      deltas[0].points.emplace_back(s.time, s.delta_norms(0));
      deltas[1].points.emplace_back(s.time, scenario.trigger.gamma * s.block_norms.norm());
    } else if (is_distributed(trace.controller)) {
      for (std::size_t i = 0; i < trace.agents; ++i) {
        deltas[i].points.emplace_back(s.time, s.delta_norms(static_cast<Eigen::Index>(i)));
      }
    }
  }
  const double t_end = trace.samples.empty() ? 0.0 : trace.samples.back().time;
  write_file(dir / "errors.svg", svg_line_chart("Distance errors e_k(t)", "time [s]", errors));
  write_file(dir / "delta.svg",
             svg_line_chart("Measurement deviation vs trigger threshold", "time [s]", deltas));
  write_file(dir / "events.svg", svg_event_raster("Event instants", log, trace.agents, t_end));
}

}  // namespace rigidsim
