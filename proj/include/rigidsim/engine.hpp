#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rigidsim/formation.hpp"
#include "rigidsim/triggers.hpp"

namespace rigidsim {

enum class ControllerKind {
  Continuous,
  CentralizedEvent,
  DistributedEvent,
  ModifiedDistributedEvent,
};

std::string_view to_string(ControllerKind kind);
std::optional<ControllerKind> parse_controller_kind(std::string_view name);
bool is_distributed(ControllerKind kind);

struct Scenario {
  std::string name;
  FormationGraph graph;
  FormationState initial;
  ControllerKind controller = ControllerKind::CentralizedEvent;
  TriggerParams trigger;
  double step = 1e-3;
  double duration = 20.0;
  std::size_t sample_every = 10;
  bool bisection = true;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Number of fixed integration steps covering the duration.
  std::size_t step_count() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct TraceSample {
  double time = 0.0;
  Vector positions;
  Vector errors;
  double lyapunov = 0.0;  ///< V = 1/4 sum e_k^2
  Vector centroid;
  Vector block_norms;  ///< |{R^T e}_i| per agent
  Vector delta_norms;  ///< |delta| (centralized), |delta_i| per agent (distributed), empty otherwise
  bool event = false;  ///< an event fired at this instant; the sample is post-reset
};

struct SimulationTrace {
  std::size_t agents = 0;
  std::size_t dim = 0;
  std::size_t edges = 0;
  ControllerKind controller = ControllerKind::CentralizedEvent;
  std::vector<TraceSample> samples;

  /// Number of delta-norm columns for this controller.
  std::size_t delta_columns() const;
};

/// Scope value used for the centralized trigger; agent scopes are 0-based indices.
inline constexpr std::size_t kGlobalScope = std::numeric_limits<std::size_t>::max();

struct EventRecord {
  std::size_t scope = kGlobalScope;
  double time = 0.0;
  double value = 0.0;       ///< event function at the firing state, before reset
  double delta_norm = 0.0;  ///< deviation norm before reset

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventLog {
  std::vector<EventRecord> events;
};

struct RunResult {
  SimulationTrace trace;
  EventLog log;
  std::vector<std::string> warnings;
};

/// Raised when the state leaves the representable region (|coordinate| > 1e6
/// or non-finite), which happens when the initial shape is outside the
/// controllers' convergence basin.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step_index, double time, const std::string& what)
      : std::runtime_error(what), step_index_(step_index), time_(time) {}
  std::size_t step_index() const { return step_index_; }
  double time() const { return time_; }

 private:
  std::size_t step_index_;
  double time_;
};

inline constexpr double kDivergenceBound = 1e6;

/// Closed-loop simulation with fixed-step Euler integration of the held controls.
/// Identical scenarios give bit-identical results.
RunResult run(const Scenario& scenario);

/// p + h u, time advanced by h. Exact for a control held over the step.
FormationState step_once(const FormationState& state, const Vector& control, double h);

/// State reached at time t from `start` under a constant control.
FormationState advance_to(const FormationState& start, const Vector& control, double t);

/// Bisection for the first time in (start.time, t_end] where trigger >= 0,
/// assuming trigger(start) < 0 <= trigger(end). Returns a time within
/// max(1e-12, (t_end - start.time) 2^-40) of the crossing, on its firing side.
/// Throws std::invalid_argument when the bracket has no sign change.
double refine_event_time(const FormationState& start, const Vector& control, double t_end,
                         const std::function<double(const FormationState&)>& trigger);

}  // namespace rigidsim
