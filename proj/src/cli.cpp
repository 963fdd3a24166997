#include "rigidsim/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rigidsim/analysis.hpp"
#include "rigidsim/io.hpp"
#include "rigidsim/plot.hpp"
#include "rigidsim/scenario.hpp"

namespace rigidsim::cli {

namespace {

bool write_text(const std::filesystem::path& path, const auto& writer, std::ostream& msg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    msg << "error: cannot write " << path.string() << "\n";
    return false;
  }
  writer(out);
  return static_cast<bool>(out);
}

bool prepare_dir(const std::filesystem::path& dir, std::ostream& msg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    msg << "error: cannot create output directory " << dir.string() << ": " << ec.message()
        << "\n";
    return false;
  }
  return true;
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

int run_command(const Scenario& scenario, const std::filesystem::path& out, bool plot,
                std::ostream& msg) {
  if (!prepare_dir(out, msg)) return kOutputError;
  RunResult result;
  try {
    result = run(scenario);
  } catch (const DivergenceError& e) {
    msg << "error: " << e.what() << "\n";
    return kDiverged;
  }
  const VerificationReport report = [&] {
    VerificationReport r = verify(scenario, result.trace, result.log);
    r.warnings.insert(r.warnings.begin(), result.warnings.begin(), result.warnings.end());
    return r;
  }();
  const bool ok =
      write_text(out / "trace.csv", [&](std::ostream& o) { write_trace_csv(o, result.trace); }, msg) &&
      write_text(out / "events.json", [&](std::ostream& o) { write_events_json(o, result.log); }, msg) &&
      write_text(out / "report.json", [&](std::ostream& o) { write_report_json(o, report); }, msg) &&
      write_text(out / "plot_data.csv",
                 [&](std::ostream& o) { write_plot_data(o, scenario, result.trace, result.log); }, msg);
  if (!ok) return kOutputError;
  if (plot) {
    try {
      write_plots(out, scenario, result.trace, result.log);
    } catch (const std::exception& e) {
      msg << "error: " << e.what() << "\n";
      return kOutputError;
    }
  }
  for (const auto& w : result.warnings) msg << "warning: " << w << "\n";
  msg << (scenario.name.empty() ? std::string("scenario") : scenario.name) << ": "
      << result.trace.samples.size() << " samples, " << result.log.events.size()
      << " events, final |e| = " << format_double(report.final_error_norm)
      << ", lyapunov monotone = " << (report.lyapunov_monotone ? "true" : "false") << "\n";
  return kOk;
}

GridAxis parse_grid_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ScenarioError("grid axis '" + spec + "' must look like name=v1,v2,...");
  }
  GridAxis axis{spec.substr(0, eq), {}};
  std::stringstream values(spec.substr(eq + 1));
  for (std::string tok; std::getline(values, tok, ',');) {
    try {
      std::size_t used = 0;
      axis.values.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ScenarioError("grid axis " + axis.parameter + ": bad value '" + tok + "'");
    }
  }
  if (axis.values.empty()) throw ScenarioError("grid axis " + axis.parameter + " has no values");
  return axis;
}

std::vector<SweepRow> sweep(const Scenario& base, const std::vector<GridAxis>& grid,
                            const std::filesystem::path& out, std::size_t workers) {
  if (grid.empty()) throw ScenarioError("sweep grid is empty");
  std::size_t cells = 1;
  for (const auto& axis : grid) {
    if (axis.values.empty()) throw ScenarioError("grid axis " + axis.parameter + " has no values");
    for (double v : axis.values) {
      Scenario probe = base;
      apply_parameter(probe, axis.parameter, v);
    }
    cells *= axis.values.size();
  }

  std::vector<Scenario> scenarios;
  std::vector<SweepRow> rows(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    Scenario s = base;
    std::size_t rest = c;
    rows[c].parameters.resize(grid.size());
    for (std::size_t a = grid.size(); a-- > 0;) {
      const double v = grid[a].values[rest % grid[a].values.size()];
      rest /= grid[a].values.size();
      apply_parameter(s, grid[a].parameter, v);
      rows[c].parameters[a] = v;
    }
    scenarios.push_back(std::move(s));
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c; (c = next.fetch_add(1)) < cells;) {
      std::ostringstream cell_name;
      cell_name << "cell_" << std::setw(3) << std::setfill('0') << c;
      const auto dir = out / cell_name.str();
      std::ostringstream quiet;
      SweepRow& row = rows[c];
      const int code = run_command(scenarios[c], dir, false, quiet);
      if (code == kDiverged) {
        row.status = "diverged";
        continue;
      }
      if (code != kOk) {
        row.status = "error";
        continue;
      }
      std::ifstream ev(dir / "events.json");
      const EventLog log = read_events_json(ev);
      std::ifstream tr(dir / "trace.csv");
      const SimulationTrace trace = read_trace_csv(tr, scenarios[c], log);
      const VerificationReport r = verify(scenarios[c], trace, log);
      row.kappa_hat = r.kappa_hat;
      row.event_count = r.total_events;
      row.min_gap = r.min_gap;
      row.final_error_norm = r.final_error_norm;
      row.status = "ok";
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(workers, cells));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

int sweep_command(const Scenario& base, const std::vector<GridAxis>& grid,
                  const std::filesystem::path& out, std::size_t workers, std::ostream& msg) {
  if (!prepare_dir(out, msg)) return kOutputError;
  std::vector<SweepRow> rows;
  try {
    rows = sweep(base, grid, out, workers);
  } catch (const ScenarioError& e) {
    msg << "error: " << e.what() << "\n";
    return kUsage;
  }
  std::ostringstream table;
  table << "cell";
  for (const auto& axis : grid) table << ',' << axis.parameter;
  table << ",kappa_hat,event_count,min_gap,final_error_norm,status\n";
  for (std::size_t c = 0; c < rows.size(); ++c) {
    table << c;
    for (double v : rows[c].parameters) table << ',' << format_double(v);
    table << ',' << opt(rows[c].kappa_hat) << ',' << rows[c].event_count << ','
          << opt(rows[c].min_gap) << ',' << format_double(rows[c].final_error_norm) << ','
          << rows[c].status << '\n';
  }
  if (!write_text(out / "summary.csv", [&](std::ostream& o) { o << table.str(); }, msg)) {
    return kOutputError;
  }
  msg << table.str();
  return kOk;
}

int check_command(const Scenario& scenario, const std::filesystem::path& dir, std::ostream& msg) {
  std::ifstream ev(dir / "events.json");
  std::ifstream tr(dir / "trace.csv");
  if (!ev || !tr) {
    msg << "error: " << dir.string() << " must contain trace.csv and events.json\n";
    return kUsage;
  }
  EventLog log;
  SimulationTrace trace;
  try {
    log = read_events_json(ev);
    trace = read_trace_csv(tr, scenario, log);
  } catch (const std::exception& e) {
    msg << "error: " << e.what() << "\n";
    return kUsage;
  }
  const VerificationReport r = verify(scenario, trace, log);
  write_report_json(msg, r);
  // The modified trigger tolerates a decaying Lyapunov increase by design.
  const bool needs_monotone = scenario.controller != ControllerKind::ModifiedDistributedEvent;
  bool ok = (r.lyapunov_monotone || !needs_monotone) && r.max_trigger_value <= 1e-9 &&
            r.zeno_respected.value_or(true);
  if (scenario.controller == ControllerKind::CentralizedEvent) ok = ok && r.centroid_drift < 1e-9;
  return ok ? kOk : kCheckFailed;
}

int presets_command(const std::optional<std::string>& name, std::ostream& msg) {
  if (!name) {
    for (const auto& n : preset_names()) msg << n << "\n";
    return kOk;
  }
  const auto s = preset(*name);
  if (!s) {
    msg << "error: unknown preset '" << *name << "'\n";
    return kUsage;
  }
  msg << serialize_scenario(*s);
  return kOk;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("RIGIDSIM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered rigid formation simulator"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string out_dir;
  std::optional<double> step;
  std::optional<double> duration;
  bool no_bisection = false;
  bool plot = false;
  std::size_t workers = default_workers();
  std::vector<std::string> grid_specs;
  std::string preset_name;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_arg, "Scenario file or preset name")->required();
    cmd->add_option("--out", out_dir, "Output directory")->required();
    cmd->add_option("--step", step, "Integration step [s]");
    cmd->add_option("--duration", duration, "Simulated duration [s]");
    cmd->add_flag("--no-bisection", no_bisection, "Fire events at step ends without refinement");
  };

  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  add_common(run_cmd);
  run_cmd->add_flag("--plot", plot, "Also write SVG charts");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--grid", grid_specs, "Axis as name=v1,v2,... (repeatable)")->required();
  sweep_cmd->add_option("--workers", workers, "Concurrent cells")->check(CLI::PositiveNumber);

  auto* check_cmd = app.add_subcommand("check", "Verify an existing trace and event log");
  check_cmd->add_option("--scenario", scenario_arg, "Scenario file or preset name")->required();
  check_cmd->add_option("--out", out_dir, "Directory holding trace.csv and events.json")->required();

  auto* presets_cmd = app.add_subcommand("presets", "List presets or print one");
  presets_cmd->add_option("name", preset_name, "Preset to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (presets_cmd->parsed()) {
    return presets_command(preset_name.empty() ? std::nullopt : std::optional(preset_name),
                           std::cout);
  }

  std::optional<Scenario> resolved;
  try {
    resolved = resolve_scenario(scenario_arg);
    if (step) resolved->step = *step;
    if (duration) resolved->duration = *duration;
    if (no_bisection) resolved->bisection = false;
    resolved->validate();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  const Scenario& scenario = *resolved;

  if (run_cmd->parsed()) return run_command(scenario, out_dir, plot, std::cerr);
  if (check_cmd->parsed()) return check_command(scenario, out_dir, std::cout);

  std::vector<GridAxis> grid;
  try {
    for (const auto& g : grid_specs) grid.push_back(parse_grid_axis(g));
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return sweep_command(scenario, grid, out_dir, workers, std::cout);
}

}  // namespace rigidsim::cli
