#include "rigidsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rigidsim/controllers.hpp"
#include "rigidsim/rigidity.hpp"

namespace rigidsim {

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::Continuous: return "continuous";
    case ControllerKind::CentralizedEvent: return "centralized-event";
    case ControllerKind::DistributedEvent: return "distributed-event";
    case ControllerKind::ModifiedDistributedEvent: return "modified-distributed-event";
  }
  return "unknown";
}

std::optional<ControllerKind> parse_controller_kind(std::string_view name) {
  for (auto k : {ControllerKind::Continuous, ControllerKind::CentralizedEvent,
                 ControllerKind::DistributedEvent, ControllerKind::ModifiedDistributedEvent}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool is_distributed(ControllerKind kind) {
  return kind == ControllerKind::DistributedEvent ||
         kind == ControllerKind::ModifiedDistributedEvent;
}

void Scenario::validate() const {
  initial.validate(graph);
  trigger.validate(graph.agents());
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("integration.step must be finite and > 0");
  }
  if (!(duration >= step) || !std::isfinite(duration)) {
    throw std::invalid_argument("integration.duration must be finite and >= integration.step");
  }
  if (sample_every < 1) throw std::invalid_argument("integration.sample_every must be >= 1");
}

std::size_t Scenario::step_count() const {
  return static_cast<std::size_t>(std::llround(duration / step));
}

std::size_t SimulationTrace::delta_columns() const {
  switch (controller) {
    case ControllerKind::Continuous: return 0;
    case ControllerKind::CentralizedEvent: return 1;
    default: return agents;
  }
}

FormationState step_once(const FormationState& state, const Vector& control, double h) {
  return {state.positions + h * control, state.time + h};
}

FormationState advance_to(const FormationState& start, const Vector& control, double t) {
  return {start.positions + (t - start.time) * control, t};
}

double refine_event_time(const FormationState& start, const Vector& control, double t_end,
                         const std::function<double(const FormationState&)>& trigger) {
  if (!(t_end > start.time)) throw std::invalid_argument("refine_event_time: empty bracket");
  if (!(trigger(start) < 0.0) || !(trigger(advance_to(start, control, t_end)) >= 0.0)) {
    throw std::invalid_argument("refine_event_time: trigger does not change sign in bracket");
  }
  const double tol = std::max(1e-12, (t_end - start.time) * std::ldexp(1.0, -40));
  double lo = start.time;
  double hi = t_end;
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (trigger(advance_to(start, control, mid)) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

namespace {

constexpr std::size_t kMaxRefinementsPerStep = 256;

// A deviation this many rounding floors above a vanishing block is a genuine
// zero crossing rather than noise at convergence.
constexpr double kStormDeviationFactor = 1e3;

/// Trigger evaluation for one scope at one state.
struct ScopeProbe {
  double value = 0.0;
  double delta_norm = 0.0;
  double floor = 0.0;
  double block_norm = 0.0;
  Vector block;  // gradient (global scope) or gradient block (agent scope) at the probed state

  bool fires() const { return should_fire(value, delta_norm, floor); }
};

class ClosedLoop {
 public:
  explicit ClosedLoop(const Scenario& s)
      : s_(s),
        n_(s.graph.agents()),
        d_(s.graph.dim()),
        triggers_(is_distributed(s.controller) ? n_ : 1),
        held_(triggers_.scope_count()),
        control_(Vector::Zero(static_cast<Eigen::Index>(n_ * d_))) {
    result_.trace.agents = n_;
    result_.trace.dim = d_;
    result_.trace.edges = s.graph.edge_count();
    result_.trace.controller = s.controller;
    warned_.assign(n_, false);
  }

  RunResult run() {
    FormationState state = s_.initial;
    state.time = 0.0;
    initialize(state);

    const std::size_t steps = s_.step_count();
    for (std::size_t k = 0; k < steps; ++k) {
      const double t_end = static_cast<double>(k + 1) * s_.step;
      bool event_at_end = false;
      if (s_.controller == ControllerKind::Continuous) {
        control_ = instantaneous_control(s_.graph, state);
        state = advance_to(state, control_, t_end);
        guard(state, k + 1);
      } else {
        event_at_end = integrate_step(state, t_end, k + 1);
      }
      const bool grid_sample = (k + 1) % s_.sample_every == 0 || k + 1 == steps;
      if (grid_sample && !event_at_end) record(state, false);
    }
    return std::move(result_);
  }

 private:
  ScopeProbe probe(std::size_t scope, const FormationState& state) const {
    ScopeProbe p;
    if (s_.controller == ControllerKind::CentralizedEvent ||
        s_.controller == ControllerKind::Continuous) {
      p.block = gradient(s_.graph, state);
      p.block_norm = p.block.norm();
      p.floor = kRoundoffGuardFactor * gradient_roundoff_scale(s_.graph, state);
      if (!triggers_.has_fired(scope)) {
        p.value = centralized_event_value(Vector::Zero(p.block.size()), p.block, s_.trigger.gamma);
        return p;
      }
      const Vector delta = held_[scope] - p.block;
      p.delta_norm = delta.norm();
      p.value = centralized_event_value(delta, p.block, s_.trigger.gamma);
      return p;
    }
    const std::size_t i = scope;
    const AgentLocalView view = local_view(s_.graph, state, i);
    p.block = local_gradient_block(view);
    p.block_norm = p.block.norm();
    p.floor = kRoundoffGuardFactor * local_roundoff_scale(view);
    const Vector delta =
        triggers_.has_fired(scope) ? Vector(held_[scope] - p.block) : Vector::Zero(p.block.size());
    p.delta_norm = delta.norm();
    p.value = s_.controller == ControllerKind::ModifiedDistributedEvent
                  ? modified_event_value(delta, p.block, s_.trigger, i, state.time)
                  : distributed_event_value(delta, p.block, s_.trigger, i);
    return p;
  }

  void fire(std::size_t scope, const FormationState& state, const ScopeProbe& p) {
    const std::size_t logged = is_distributed(s_.controller) ? scope : kGlobalScope;
    result_.log.events.push_back({logged, state.time, p.value, p.delta_norm});
    triggers_.fire_and_reset(scope, state);
    held_[scope] = p.block;
    if (is_distributed(s_.controller)) {
      const auto seg = static_cast<Eigen::Index>(scope * d_);
      control_.segment(seg, static_cast<Eigen::Index>(d_)) = -p.block;
      if (s_.controller == ControllerKind::DistributedEvent && state.time > 0.0 &&
          p.block_norm <= p.floor && p.delta_norm > kStormDeviationFactor * p.floor &&
          !warned_[scope]) {
        warned_[scope] = true;
        std::ostringstream msg;
        msg << "zero-block event storm: agent " << scope + 1 << " fired at t=" << state.time
            << " with a vanishing gradient block; the modified-distributed-event trigger avoids this";
        result_.warnings.push_back(msg.str());
      }
    } else {
      control_ = -p.block;
    }
  }

  void initialize(const FormationState& state) {
    guard(state, 0);
    for (std::size_t s = 0; s < triggers_.scope_count(); ++s) fire(s, state, probe(s, state));
    record(state, true);
  }

  /// Fires every scope due at `state`; returns how many fired.
  std::size_t fire_due(const FormationState& state) {
    std::vector<std::pair<std::size_t, ScopeProbe>> due;
    for (std::size_t s = 0; s < triggers_.scope_count(); ++s) {
      ScopeProbe p = probe(s, state);
      if (p.fires()) due.emplace_back(s, std::move(p));
    }
    for (auto& [s, p] : due) fire(s, state, p);
    return due.size();
  }

  /// Integrates from state.time to t_end, firing events on the way. Returns
  /// true if an event sample was recorded exactly at t_end.
  bool integrate_step(FormationState& state, double t_end, std::size_t step_index) {
    for (std::size_t refinements = 0;; ++refinements) {
      FormationState end = advance_to(state, control_, t_end);
      guard(end, step_index);

      std::vector<std::size_t> due;
      for (std::size_t s = 0; s < triggers_.scope_count(); ++s) {
        if (probe(s, end).fires()) due.push_back(s);
      }
      if (due.empty()) {
        state = std::move(end);
        return false;
      }
      if (!s_.bisection || refinements >= kMaxRefinementsPerStep) {
        fire_due(end);
        state = std::move(end);
        record(state, true);
        return true;
      }

      double t_event = t_end;
      for (std::size_t s : due) {
        const auto f = [&](const FormationState& x) {
          const ScopeProbe p = probe(s, x);
          return p.fires() ? p.value : std::min(p.value, -std::numeric_limits<double>::denorm_min());
        };
        t_event = std::min(t_event, refine_event_time(state, control_, t_end, f));
      }
      FormationState at = advance_to(state, control_, t_event);
      guard(at, step_index);
      if (fire_due(at) == 0) {
        // The bracket end always fires; reaching here means t_event == t_end
        // was not reproduced, so fall back to the step end.
        at = std::move(end);
        fire_due(at);
      }
      state = std::move(at);
      record(state, true);
      if (state.time >= t_end) return true;
    }
  }

  void guard(const FormationState& state, std::size_t step_index) const {
    const Vector& p = state.positions;
    if (!p.allFinite() || p.cwiseAbs().maxCoeff() > kDivergenceBound) {
      std::ostringstream msg;
      msg << "state diverged at step " << step_index << " (t=" << state.time
          << "): |coordinate| exceeded " << kDivergenceBound
          << "; the initial shape is likely outside the convergence basin";
      throw DivergenceError(step_index, state.time, msg.str());
    }
  }

  void record(const FormationState& state, bool event) {
    TraceSample smp;
    smp.time = state.time;
    smp.positions = state.positions;
    smp.errors = distance_errors(s_.graph, state);
    smp.lyapunov = 0.25 * smp.errors.squaredNorm();
    smp.centroid = centroid(state, d_);
    smp.block_norms.resize(static_cast<Eigen::Index>(n_));
    const Vector g = gradient(s_.graph, state);
    for (std::size_t i = 0; i < n_; ++i) {
      smp.block_norms(static_cast<Eigen::Index>(i)) =
          g.segment(static_cast<Eigen::Index>(i * d_), static_cast<Eigen::Index>(d_)).norm();
    }
    switch (s_.controller) {
      case ControllerKind::Continuous: break;
      case ControllerKind::CentralizedEvent:
        smp.delta_norms.resize(1);
        smp.delta_norms(0) = (held_[0] - g).norm();
        break;
      default:
        smp.delta_norms.resize(static_cast<Eigen::Index>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
          const auto seg = static_cast<Eigen::Index>(i * d_);
          smp.delta_norms(static_cast<Eigen::Index>(i)) =
              (held_[i] - g.segment(seg, static_cast<Eigen::Index>(d_))).norm();
        }
    }
    smp.event = event;
    auto& samples = result_.trace.samples;
    if (!samples.empty() && samples.back().time == smp.time) {
      samples.back() = std::move(smp);
      samples.back().event = true;
    } else {
      samples.push_back(std::move(smp));
    }
  }

  const Scenario& s_;
  std::size_t n_;
  std::size_t d_;
  TriggerState triggers_;
  std::vector<Vector> held_;  // gradient (or gradient block) at each scope's snapshot
  Vector control_;
  std::vector<bool> warned_;
  RunResult result_;
};

}  // namespace

RunResult run(const Scenario& scenario) {
  scenario.validate();
  return ClosedLoop(scenario).run();
}

}  // namespace rigidsim
