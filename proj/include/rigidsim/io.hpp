#pragma once

#include <iosfwd>
#include <string>

#include "rigidsim/analysis.hpp"
#include "rigidsim/engine.hpp"

namespace rigidsim {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Header: time, p<i>_<axis> (agent-major), e<k>, V, c_<axis>, b<i>, then
/// delta (centralized) or delta<i> (distributed). One row per sample.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);

/// Reads a trace written by write_trace_csv. The column layout is inferred
/// from the scenario; `log` marks which samples are event instants.
SimulationTrace read_trace_csv(std::istream& in, const Scenario& scenario, const EventLog& log);

/// JSON array of {scope, time, value, delta_norm}; scope is "global" or a 1-based agent index.
void write_events_json(std::ostream& out, const EventLog& log);
EventLog read_events_json(std::istream& in);

void write_report_json(std::ostream& out, const VerificationReport& report);

/// Long-format rows "series,index,time,value" for external plotting: distance
/// errors, deviation norms, trigger thresholds, gradient block norms, V and
/// event instants.
void write_plot_data(std::ostream& out, const Scenario& scenario, const SimulationTrace& trace,
                     const EventLog& log);

}  // namespace rigidsim
