#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rigidsim/engine.hpp"

namespace rigidsim {

/// Samples with |e| at or below this fraction of |e(0)| sit on the rounding
/// floor and are excluded from rate fits and envelope checks.
inline constexpr double kNumericalFloor = 1e-10;

/// Least-squares slope of -ln|e(t)| against t over samples above the numerical
/// floor. Throws std::invalid_argument if the run did not reduce |e| or fewer
/// than 10 samples are usable.
double fit_decay_rate(const SimulationTrace& trace);

struct ScopeStats {
  std::size_t scope = kGlobalScope;
  std::size_t count = 0;
  std::optional<double> min_gap;
  std::optional<double> mean_gap;
};

/// One entry per scope present in the log, global first, then agents ascending.
/// Throws std::invalid_argument on an empty log.
std::vector<ScopeStats> inter_event_stats(const EventLog& log);

/// max_t |centroid(t) - centroid(0)|.
double centroid_drift(const SimulationTrace& trace);

/// Largest V(t_{k+1}) - V(t_k) over consecutive samples (<= 0 for a monotone run).
double max_lyapunov_increase(const SimulationTrace& trace);

/// Displacement of the positions over the final `fraction` of the run.
double final_displacement(const SimulationTrace& trace, double fraction = 0.1);

/// Extremes of the Gram spectra along the recorded trajectory.
struct TrajectorySpectra {
  double gram_min = 0.0;    ///< min_t lambda_min(R R^T)
  double normal_max = 0.0;  ///< max_t lambda_max(R^T R)
};

TrajectorySpectra trajectory_spectra(const FormationGraph& graph, const SimulationTrace& trace);

/// min over samples and agents of |{R^T e}_i|^2 / |e|^2, restricted to samples
/// with |e| > 1e-10. Zero signals a gradient block crossing zero.
double measure_epsilon(const SimulationTrace& trace);

/// Guaranteed decay rate of |e| from the measured lambda_min(R R^T):
/// 2(1-gamma) lambda for the centralized trigger, 2 zeta_min lambda with
/// zeta_min = min_i (1-gamma_i)(2-a_i)/2 for the distributed ones, 2 lambda
/// for the continuous law.
double analytic_decay_rate(const Scenario& scenario, double gram_min);

/// Largest |e(t)| / (exp(-rate t) |e(0)|) over samples above the numerical floor.
double envelope_ratio(const SimulationTrace& trace, double rate);

/// Largest event-function value over samples that carry no event. Nonpositive
/// (up to rounding) whenever the trigger condition was maintained between events.
double max_trigger_value_between_events(const Scenario& scenario, const SimulationTrace& trace);

/// Largest relative excursion of |{R^T e}_i| outside
/// [b_h/(1+sqrt(rho_i)), b_h/(1-sqrt(rho_i))] between agent i's events, where
/// b_h is the block norm at the agent's last event. Zero if always inside.
double hysteresis_violation(const Scenario& scenario, const SimulationTrace& trace,
                            const EventLog& log);

struct InvarianceReport {
  double max_error_deviation = 0.0;  ///< over every shared sample time
  /// Event comparison covers the resolved horizon: events before the reference
  /// run's |e| first reaches the numerical floor. Past that point trigger
  /// margins are comparable to rounding noise and event times are not
  /// reproducible under any change of coordinates.
  double resolved_until = 0.0;
  double max_event_time_deviation = 0.0;
  bool event_counts_match = true;
  std::size_t resolved_events = 0;
  /// Whole-run totals, reported for transparency.
  std::size_t total_events = 0;
  std::size_t total_events_transformed = 0;
};

/// Runs the scenario and a twin whose initial positions are mapped p -> Q p + t.
/// Throws std::invalid_argument if Q is not a rotation (Q^T Q = I within 1e-12, det Q = +1).
InvarianceReport se_invariance_check(const Scenario& scenario, const Matrix& rotation,
                                     const Vector& translation);

/// Central-difference Jacobian of the rigidity function. Independent of the
/// closed-form rigidity matrix.
Matrix fd_jacobian_oracle(const FormationGraph& graph, const FormationState& state, double h);

struct VerificationReport {
  std::string scenario;
  ControllerKind controller = ControllerKind::CentralizedEvent;
  double final_time = 0.0;
  double initial_error_norm = 0.0;
  double final_error_norm = 0.0;
  double final_max_abs_error = 0.0;
  bool lyapunov_monotone = false;
  double max_lyapunov_increase = 0.0;
  std::optional<double> kappa_hat;
  double gram_min = 0.0;
  double normal_max = 0.0;
  double analytic_rate = 0.0;
  bool rate_consistent = false;
  double envelope_ratio = 0.0;
  double centroid_drift = 0.0;
  double final_displacement = 0.0;
  double epsilon = 0.0;
  double max_trigger_value = 0.0;
  std::vector<ScopeStats> stats;
  std::optional<double> min_gap;
  std::size_t total_events = 0;
  /// Empirical-constant bounds: alpha uses |e(0)| and the trajectory maximum of lambda_max(R^T R).
  double alpha = 0.0;
  double alpha_derived = 0.0;
  std::optional<double> zeno_bound;          ///< centralized, printed sqrt(2) coefficient
  std::optional<double> zeno_bound_derived;  ///< centralized, coefficient 2
  std::vector<DistributedZenoBounds> distributed_bounds;
  std::optional<bool> zeno_respected;
  std::vector<std::string> warnings;
};

VerificationReport verify(const Scenario& scenario, const SimulationTrace& trace,
                          const EventLog& log);

}  // namespace rigidsim
