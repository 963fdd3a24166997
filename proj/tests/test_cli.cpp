#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rigidsim/cli.hpp"
#include "rigidsim/io.hpp"
#include "rigidsim/scenario.hpp"

using namespace rigidsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rigidsim_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "rigidsim");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

Scenario short_preset(const char* name, double duration) {
  Scenario s = *preset(name);
  s.duration = duration;
  return s;
}

}  // namespace

TEST_CASE("run writes the trace, event log and report") {
  const fs::path out = scratch("run");
  std::ostringstream msg;
  REQUIRE(cli::run_command(short_preset("paper-centralized", 0.5), out, true, msg) == cli::kOk);
  for (const char* f : {"trace.csv", "events.json", "report.json", "plot_data.csv", "errors.svg",
                        "delta.svg", "events.svg"}) {
    CAPTURE(f);
    CHECK(fs::file_size(out / f) > 0);
  }
  const std::string csv = slurp(out / "trace.csv");
  CHECK(csv.rfind("time,p1_x,p1_y,p1_z,", 0) == 0);
  CHECK(csv.find(",e9,V,c_x,c_y,c_z,b1,b2,b3,b4,b5,delta\n") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("minimal one-step run through the command line") {
  const fs::path out = scratch("minimal");
  CHECK(invoke({"run", "--scenario", "paper-centralized", "--duration", "0.001", "--step", "0.001",
                "--out", out.string()}) == cli::kOk);
  CHECK(fs::exists(out / "trace.csv"));
  CHECK(fs::exists(out / "events.json"));
  CHECK(fs::exists(out / "report.json"));
  fs::remove_all(out);
}

TEST_CASE("far initial positions exit with the divergence code") {
  const fs::path dir = scratch("far");
  fs::create_directories(dir);
  Scenario s = *preset("paper-continuous");
  s.initial.positions *= 100.0;
  {
    std::ofstream f(dir / "far.txt");
    f << serialize_scenario(s);
  }
  CHECK(invoke({"run", "--scenario", (dir / "far.txt").string(), "--out", (dir / "out").string()}) ==
        cli::kDiverged);
  CHECK(invoke({"run", "--scenario", "paper-centralized", "--no-bisection", "--duration", "0.01",
                "--out", (dir / "ok").string()}) == cli::kOk);
  s.controller = ControllerKind::CentralizedEvent;
  s.bisection = false;
  std::ostringstream msg;
  CHECK(cli::run_command(s, dir / "out2", false, msg) == cli::kDiverged);
  CHECK(msg.str().find("step") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("usage errors") {
  CHECK(invoke({"run", "--scenario", "no-such-preset", "--out", scratch("usage").string()}) == cli::kUsage);
  CHECK(invoke({"run", "--scenario", "paper-centralized", "--step", "-1", "--out",
                scratch("usage").string()}) == cli::kUsage);
  CHECK(invoke({"bogus"}) != cli::kOk);
  CHECK(invoke({"sweep", "--scenario", "paper-centralized", "--grid", "gamma=1.0", "--out",
                scratch("usage").string()}) == cli::kUsage);
}

TEST_CASE("unwritable output directory") {
  const fs::path file = scratch("blocker");
  {
    std::ofstream f(file);
    f << "x";
  }
  std::ostringstream msg;
  CHECK(cli::run_command(short_preset("paper-centralized", 0.01), file / "sub", false, msg) ==
        cli::kOutputError);
  fs::remove(file);
}

TEST_CASE("grid axis parsing") {
  const auto axis = cli::parse_grid_axis("gamma=0.2,0.6,0.9");
  CHECK(axis.parameter == "gamma");
  CHECK(axis.values == std::vector<double>{0.2, 0.6, 0.9});
  CHECK_THROWS_AS(cli::parse_grid_axis("gamma"), ScenarioError);
  CHECK_THROWS_AS(cli::parse_grid_axis("gamma="), ScenarioError);
  CHECK_THROWS_AS(cli::parse_grid_axis("gamma=0.2,x"), ScenarioError);
}

TEST_CASE("sweep over gamma gives one row per value in grid order") {
  const fs::path out = scratch("sweep");
  fs::create_directories(out);
  const auto rows =
      cli::sweep(short_preset("paper-centralized", 2.0), {cli::parse_grid_axis("gamma=0.2,0.6,0.9")}, out, 3);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].parameters[0] == 0.2);
  CHECK(rows[2].parameters[0] == 0.9);
  for (const auto& r : rows) {
    CHECK(r.status == "ok");
    CHECK(r.event_count > 1);
  }
  // A looser trigger fires less often.
  CHECK(rows[0].event_count > rows[2].event_count);
  CHECK(fs::exists(out / "cell_002" / "trace.csv"));

  const auto serial =
      cli::sweep(short_preset("paper-centralized", 2.0), {cli::parse_grid_axis("gamma=0.2,0.6,0.9")}, out, 1);
  for (std::size_t k = 0; k < 3; ++k) CHECK(serial[k].event_count == rows[k].event_count);
  fs::remove_all(out);
}

TEST_CASE("sweep summary through the command line") {
  const fs::path out = scratch("sweep_cli");
  CHECK(invoke({"sweep", "--scenario", "paper-centralized", "--duration", "1", "--grid", "gamma=0.2,0.6",
                "--grid", "step=0.001,0.0005", "--workers", "2", "--out", out.string()}) == cli::kOk);
  const std::string summary = slurp(out / "summary.csv");
  CHECK(summary.rfind("cell,gamma,step,kappa_hat,event_count,min_gap,final_error_norm,status\n", 0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 5);
  fs::remove_all(out);
}

TEST_CASE("empty or invalid grids are rejected before anything runs") {
  const fs::path out = scratch("sweep_bad");
  fs::create_directories(out);
  CHECK_THROWS_AS(cli::sweep(*preset("paper-centralized"), {}, out, 1), ScenarioError);
  CHECK_THROWS_AS(cli::sweep(*preset("paper-centralized"), {{"gamma", {0.5, 1.0}}}, out, 1), ScenarioError);
  CHECK(fs::is_empty(out));
  fs::remove_all(out);
}

TEST_CASE("repeated runs write byte-identical files") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  std::ostringstream msg;
  const Scenario s = short_preset("paper-distributed", 2.0);
  REQUIRE(cli::run_command(s, a, false, msg) == cli::kOk);
  REQUIRE(cli::run_command(s, b, false, msg) == cli::kOk);
  for (const char* f : {"trace.csv", "events.json", "report.json", "plot_data.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("trace and event files read back exactly") {
  const Scenario s = short_preset("paper-distributed", 1.0);
  const RunResult r = run(s);
  std::stringstream ev, tr;
  write_events_json(ev, r.log);
  write_trace_csv(tr, r.trace);
  const EventLog log = read_events_json(ev);
  CHECK(log.events == r.log.events);
  const SimulationTrace back = read_trace_csv(tr, s, log);
  REQUIRE(back.samples.size() == r.trace.samples.size());
  for (std::size_t k = 0; k < back.samples.size(); ++k) {
    const auto& x = back.samples[k];
    const auto& y = r.trace.samples[k];
    CHECK(x.time == y.time);
    CHECK(x.positions == y.positions);
    CHECK(x.errors == y.errors);
    CHECK(x.delta_norms == y.delta_norms);
    CHECK(x.event == y.event);
  }
}

TEST_CASE("check re-verifies a stored run") {
  const fs::path out = scratch("check");
  std::ostringstream msg;
  for (const char* name : {"paper-centralized", "paper-distributed", "paper-modified"}) {
    CAPTURE(name);
    const Scenario s = short_preset(name, 5.0);
    REQUIRE(cli::run_command(s, out, false, msg) == cli::kOk);
    std::ostringstream report;
    CHECK(cli::check_command(s, out, report) == cli::kOk);
    CHECK(report.str().find("\"zeno\"") != std::string::npos);
  }
  std::ostringstream report;
  CHECK(cli::check_command(*preset("paper-centralized"), scratch("missing"), report) == cli::kUsage);
  fs::remove_all(out);
}

TEST_CASE("presets listing") {
  std::ostringstream out;
  CHECK(cli::presets_command(std::nullopt, out) == cli::kOk);
  CHECK(out.str().find("paper-distributed\n") != std::string::npos);
  std::ostringstream one;
  CHECK(cli::presets_command(std::string("paper-modified"), one) == cli::kOk);
  CHECK(parse_scenario_text(one.str()) == *preset("paper-modified"));
  std::ostringstream bad;
  CHECK(cli::presets_command(std::string("x"), bad) == cli::kUsage);
}
