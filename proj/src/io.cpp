#include "rigidsim/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rigidsim {

namespace {

constexpr std::array<char, 3> kAxes{'x', 'y', 'z'};

void write_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) out << ',';
    out << format_double(row[k]);
  }
  out << '\n';
}

void append(std::vector<double>& row, const Vector& v) {
  row.insert(row.end(), v.data(), v.data() + v.size());
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json scope_json(std::size_t scope) {
  return scope == kGlobalScope ? nlohmann::json("global") : nlohmann::json(scope + 1);
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
  out << "time";
  for (std::size_t i = 0; i < trace.agents; ++i) {
    for (std::size_t c = 0; c < trace.dim; ++c) out << ",p" << i + 1 << '_' << kAxes[c];
  }
  for (std::size_t k = 0; k < trace.edges; ++k) out << ",e" << k + 1;
  out << ",V";
  for (std::size_t c = 0; c < trace.dim; ++c) out << ",c_" << kAxes[c];
  for (std::size_t i = 0; i < trace.agents; ++i) out << ",b" << i + 1;
  if (trace.delta_columns() == 1) {
    out << ",delta";
  } else {
    for (std::size_t i = 0; i < trace.delta_columns(); ++i) out << ",delta" << i + 1;
  }
  out << '\n';
  std::vector<double> row;
  for (const auto& s : trace.samples) {
    row.clear();
    row.push_back(s.time);
    append(row, s.positions);
    append(row, s.errors);
    row.push_back(s.lyapunov);
    append(row, s.centroid);
    append(row, s.block_norms);
    append(row, s.delta_norms);
    write_row(out, row);
  }
}

SimulationTrace read_trace_csv(std::istream& in, const Scenario& scenario, const EventLog& log) {
  SimulationTrace trace;
  trace.agents = scenario.graph.agents();
  trace.dim = scenario.graph.dim();
  trace.edges = scenario.graph.edge_count();
  trace.controller = scenario.controller;
  const std::size_t n = trace.agents, d = trace.dim, m = trace.edges;
  const std::size_t deltas = trace.delta_columns();
  const std::size_t width = 1 + n * d + m + 1 + d + n + deltas;

  std::set<double> event_times;
  for (const auto& e : log.events) event_times.insert(e.time);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace CSV is empty");
  std::size_t row_no = 1;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    row.clear();
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = std::min(line.find(',', pos), line.size());
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + comma, v);
      if (ec != std::errc() || ptr != line.data() + comma) {
        throw std::runtime_error("trace CSV row " + std::to_string(row_no) + ": bad number");
      }
      row.push_back(v);
      pos = comma + 1;
    }
    if (row.size() != width) {
      throw std::runtime_error("trace CSV row " + std::to_string(row_no) + " has " +
                               std::to_string(row.size()) + " columns, expected " +
                               std::to_string(width));
    }
    auto take = [&, at = std::size_t{0}](std::size_t count) mutable {
      Vector v = Eigen::Map<const Vector>(row.data() + at, static_cast<Eigen::Index>(count));
      at += count;
      return v;
    };
    TraceSample s;
    s.time = take(1)(0);
    s.positions = take(n * d);
    s.errors = take(m);
    s.lyapunov = take(1)(0);
    s.centroid = take(d);
    s.block_norms = take(n);
    s.delta_norms = take(deltas);
    s.event = event_times.count(s.time) > 0;
    trace.samples.push_back(std::move(s));
  }
  return trace;
}

void write_events_json(std::ostream& out, const EventLog& log) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : log.events) {
    arr.push_back({{"scope", scope_json(e.scope)},
                   {"time", e.time},
                   {"value", e.value},
                   {"delta_norm", e.delta_norm}});
  }
  out << arr.dump(2) << '\n';
}

EventLog read_events_json(std::istream& in) {
  const auto arr = nlohmann::json::parse(in);
  if (!arr.is_array()) throw std::runtime_error("event log must be a JSON array");
  EventLog log;
  for (const auto& j : arr) {
    EventRecord r;
    const auto& scope = j.at("scope");
    if (scope.is_string()) {
      if (scope.get<std::string>() != "global") throw std::runtime_error("unknown event scope");
      r.scope = kGlobalScope;
    } else {
      const auto idx = scope.get<std::size_t>();
      if (idx < 1) throw std::runtime_error("agent scopes are 1-based");
      r.scope = idx - 1;
    }
    r.time = j.at("time").get<double>();
    r.value = j.at("value").get<double>();
    r.delta_norm = j.at("delta_norm").get<double>();
    log.events.push_back(r);
  }
  return log;
}

void write_report_json(std::ostream& out, const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["controller"] = std::string(to_string(r.controller));
  j["final_time"] = r.final_time;
  j["initial_error_norm"] = r.initial_error_norm;
  j["final_error_norm"] = r.final_error_norm;
  j["final_max_abs_error"] = r.final_max_abs_error;
  j["lyapunov_monotone"] = r.lyapunov_monotone;
  j["max_lyapunov_increase"] = r.max_lyapunov_increase;
  j["kappa_hat"] = optional_number(r.kappa_hat);
  j["empirical_gram_min"] = r.gram_min;
  j["empirical_normal_max"] = r.normal_max;
  j["analytic_rate"] = r.analytic_rate;
  j["rate_consistent"] = r.rate_consistent;
  j["envelope_ratio"] = r.envelope_ratio;
  j["centroid_drift"] = r.centroid_drift;
  j["final_displacement"] = r.final_displacement;
  j["empirical_epsilon"] = r.epsilon;
  j["max_trigger_value_between_events"] = r.max_trigger_value;
  j["total_events"] = r.total_events;
  j["min_gap"] = optional_number(r.min_gap);
  nlohmann::ordered_json stats = nlohmann::ordered_json::array();
  for (const auto& s : r.stats) {
    stats.push_back({{"scope", scope_json(s.scope)},
                     {"count", s.count},
                     {"min_gap", optional_number(s.min_gap)},
                     {"mean_gap", optional_number(s.mean_gap)}});
  }
  j["event_stats"] = stats;
  nlohmann::ordered_json zeno;
  zeno["label"] = "empirical-constant analytic bound";
  zeno["alpha"] = r.alpha;
  zeno["alpha_derived_coefficient"] = r.alpha_derived;
  zeno["centralized_bound"] = optional_number(r.zeno_bound);
  zeno["centralized_bound_derived_coefficient"] = optional_number(r.zeno_bound_derived);
  nlohmann::ordered_json dist = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.distributed_bounds.size(); ++i) {
    dist.push_back({{"agent", i + 1},
                    {"some_agent_bound", r.distributed_bounds[i].some_agent},
                    {"every_agent_bound", optional_number(r.distributed_bounds[i].every_agent)}});
  }
  zeno["distributed_bounds"] = dist;
  zeno["respected"] = r.zeno_respected ? nlohmann::ordered_json(*r.zeno_respected)
                                       : nlohmann::ordered_json(nullptr);
  j["zeno"] = zeno;
  j["warnings"] = r.warnings;
  out << j.dump(2) << '\n';
}

void write_plot_data(std::ostream& out, const Scenario& scenario, const SimulationTrace& trace,
                     const EventLog& log) {
  out << "series,index,time,value\n";
  auto row = [&](const char* series, std::size_t index, double t, double v) {
    out << series << ',' << index << ',' << format_double(t) << ',' << format_double(v) << '\n';
  };
  for (const auto& s : trace.samples) {
    for (Eigen::Index k = 0; k < s.errors.size(); ++k) {
      row("error", static_cast<std::size_t>(k) + 1, s.time, s.errors(k));
    }
    row("lyapunov", 0, s.time, s.lyapunov);
    for (Eigen::Index i = 0; i < s.block_norms.size(); ++i) {
      row("block_norm", static_cast<std::size_t>(i) + 1, s.time, s.block_norms(i));
    }
    if (trace.controller == ControllerKind::CentralizedEvent) {
      row("delta_norm", 0, s.time, s.delta_norms(0));
      row("threshold", 0, s.time, scenario.trigger.gamma * s.block_norms.norm());
    } else if (is_distributed(trace.controller)) {
      for (std::size_t i = 0; i < trace.agents; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        double thr2 = scenario.trigger.rho(i) * s.block_norms(ii) * s.block_norms(ii);
        if (trace.controller == ControllerKind::ModifiedDistributedEvent) {
          thr2 += decay_threshold(scenario.trigger, i, s.time);
        }
        row("delta_norm", i + 1, s.time, s.delta_norms(ii));
        row("threshold", i + 1, s.time, std::sqrt(thr2));
      }
    }
  }
  for (const auto& e : log.events) {
    row("event", e.scope == kGlobalScope ? 0 : e.scope + 1, e.time, 1.0);
  }
}

}  // namespace rigidsim
