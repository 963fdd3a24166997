#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rigidsim/engine.hpp"

namespace rigidsim::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kOutputError = 2,
  kDiverged = 3,
  kCheckFailed = 4,
};

/// Runs a scenario and writes trace.csv, events.json, report.json and
/// plot_data.csv into `out` (plus SVG charts when `plot` is set).
int run_command(const Scenario& scenario, const std::filesystem::path& out, bool plot,
                std::ostream& msg);

struct GridAxis {
  std::string parameter;
  std::vector<double> values;
};

/// Parses "name=v1,v2,...". Throws ScenarioError on malformed input.
GridAxis parse_grid_axis(const std::string& spec);

struct SweepRow {
  std::vector<double> parameters;  ///< one value per grid axis
  std::optional<double> kappa_hat;
  std::size_t event_count = 0;
  std::optional<double> min_gap;
  double final_error_norm = 0.0;
  std::string status;  ///< "ok" or "diverged"
};

/// Every value is checked against the base scenario before anything runs, so
/// an out-of-range value rejects the whole sweep. Rows follow the cartesian
/// order of the axes (last axis fastest) regardless of `workers`.
std::vector<SweepRow> sweep(const Scenario& base, const std::vector<GridAxis>& grid,
                            const std::filesystem::path& out, std::size_t workers);

int sweep_command(const Scenario& base, const std::vector<GridAxis>& grid,
                  const std::filesystem::path& out, std::size_t workers, std::ostream& msg);

/// Re-verifies trace.csv and events.json found in `dir`.
int check_command(const Scenario& scenario, const std::filesystem::path& dir, std::ostream& msg);

/// Lists presets, or prints one in scenario-file form.
int presets_command(const std::optional<std::string>& name, std::ostream& msg);

/// RIGIDSIM_WORKERS if set to a positive integer, else the hardware thread count.
std::size_t default_workers();

int main(int argc, char** argv);

}  // namespace rigidsim::cli
