#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rigidsim/engine.hpp"

namespace rigidsim {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Minimal SVG line chart with linear axes.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::vector<Series>& series);

/// One row of tick marks per scope.
std::string svg_event_raster(const std::string& title, const EventLog& log, std::size_t agents,
                             double t_end);

/// Writes errors.svg, delta.svg and events.svg into `dir`.
void write_plots(const std::filesystem::path& dir, const Scenario& scenario,
                 const SimulationTrace& trace, const EventLog& log);

}  // namespace rigidsim
