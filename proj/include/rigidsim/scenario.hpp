#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rigidsim/engine.hpp"

namespace rigidsim {

/// Raised for malformed scenario text. The message names the field (and line,
/// when known) and the violated constraint.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses the sectioned scenario text format:
///
///   name = my-run
///   [graph]        agents, dim, edges ("1-2 1-3 ..."), targets (one value or one per edge)
///   [initial]      p1 ... pn, each with dim coordinates
///   [controller]   kind = continuous | centralized-event | distributed-event |
///                         modified-distributed-event
///   [trigger]      gamma, gamma_i, a_i, v_i, theta_i (per-agent keys accept one
///                  value for all agents)
///   [integration]  step, duration, sample_every, bisection = on | off
///
/// '#' starts a comment. Trigger and integration keys are optional.
Scenario parse_scenario_text(std::string_view text);

Scenario load_scenario(const std::filesystem::path& path);

/// Canonical text for a scenario; parse_scenario_text(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

std::vector<std::string> preset_names();

/// Built-in double-tetrahedron presets: paper-centralized, paper-distributed,
/// paper-modified, paper-continuous.
std::optional<Scenario> preset(std::string_view name);

/// A preset name or a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

/// Sets a sweepable parameter (gamma, gamma_i, a_i, v_i, theta_i, step) and
/// revalidates. Per-agent parameters are set for every agent.
void apply_parameter(Scenario& scenario, const std::string& parameter, double value);

}  // namespace rigidsim
