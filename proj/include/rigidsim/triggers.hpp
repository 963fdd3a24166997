#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "rigidsim/formation.hpp"

namespace rigidsim {

/// Trigger tuning for every controller variant.
///
/// `gamma` drives the centralized trigger. The per-agent vectors drive the
/// distributed triggers; `v_i` and `theta_i` are only read by the modified
/// (exponentially decaying threshold) variant.
struct TriggerParams {
  double gamma = 0.6;
  std::vector<double> gamma_i;
  std::vector<double> a_i;
  std::vector<double> v_i;
  std::vector<double> theta_i;

  static TriggerParams uniform(std::size_t agents, double gamma, double gamma_i, double a_i,
                               double v_i, double theta_i);

  /// Throws std::invalid_argument naming the offending field. gamma, gamma_i
  /// and a_i must lie in the open interval (0,1); v_i and theta_i must be > 0.
  void validate(std::size_t agents) const;

  /// gamma_i a_i (2 - a_i), always in (0,1) for valid parameters.
  double rho(std::size_t i) const { return gamma_i[i] * a_i[i] * (2.0 - a_i[i]); }

  friend bool operator==(const TriggerParams&, const TriggerParams&) = default;
};

/// |delta| - gamma |R^T e|. Nonnegative means the centralized trigger is due.
double centralized_event_value(const Vector& delta, const Vector& gradient, double gamma);

/// |delta_i|^2 - rho_i |{R^T e}_i|^2.
double distributed_event_value(const Vector& delta_i, const Vector& block_i,
                               const TriggerParams& params, std::size_t i);

/// 2 a_i v_i exp(-theta_i t), the extra threshold of the modified trigger.
double decay_threshold(const TriggerParams& params, std::size_t i, double t);

/// Distributed value minus the decaying threshold.
double modified_event_value(const Vector& delta_i, const Vector& block_i,
                            const TriggerParams& params, std::size_t i, double t);

/// Multiple of the gradient rounding scale below which a deviation is treated
/// as numerical noise rather than a measurement gap.
inline constexpr double kRoundoffGuardFactor = 64.0;

/// Firing rule shared by all triggers: the event value is nonnegative and the
/// deviation is above the rounding floor. With a zero floor this reduces to
/// "never fire on a zero deviation", which keeps an exact equilibrium idle.
inline bool should_fire(double event_value, double delta_norm, double roundoff_floor = 0.0) {
  return event_value >= 0.0 && delta_norm > roundoff_floor;
}

/// Bookkeeping for one trigger scope (the global trigger or one agent).
struct ScopeRecord {
  FormationState snapshot;
  double last_event_time = 0.0;
  std::size_t event_count = 0;
};

/// Per-scope snapshots. A centralized controller has a single scope; a
/// distributed controller has one per agent.
class TriggerState {
 public:
  explicit TriggerState(std::size_t scopes) : records_(scopes) {}

  /// Stores `current` as the scope's snapshot and bumps its event count.
  /// Throws std::invalid_argument if the scope has fired before at a time not
  /// strictly earlier than current.time.
  void fire_and_reset(std::size_t scope, const FormationState& current);

  std::size_t scope_count() const { return records_.size(); }
  const ScopeRecord& scope(std::size_t s) const { return records_.at(s); }
  bool has_fired(std::size_t s) const { return records_.at(s).event_count > 0; }

 private:
  std::vector<ScopeRecord> records_;
};

/// sqrt(2), the coefficient printed in front of lambda_max in alpha.
inline const double kPrintedGramCoefficient = std::sqrt(2.0);
/// 2, the coefficient that bounds |2 R^T R| directly.
inline constexpr double kDerivedGramCoefficient = 2.0;

/// alpha = sqrt(d) |H|^2 |e(0)| + c lambda_max(R^T R).
double zeno_alpha(const FormationGraph& graph, double e0_norm, double lambda_max,
                  double gram_coefficient = kPrintedGramCoefficient);

/// tau = gamma / (alpha (1 + gamma)).
double zeno_bound_from_alpha(double alpha, double gamma);

/// Lower bound on centralized inter-event times. Throws std::invalid_argument
/// on non-positive norms or gamma outside (0,1).
double zeno_bound_centralized(const FormationGraph& graph, double e0_norm, double lambda_max,
                              double gamma, double gram_coefficient = kPrintedGramCoefficient);

struct DistributedZenoBounds {
  /// sqrt(rho)/(alpha (sqrt(m) + sqrt(rho))): holds for at least one agent.
  double some_agent = 0.0;
  /// sqrt(rho)/(alpha (sqrt(lambda_max/epsilon) + sqrt(rho))): per-agent bound,
  /// only defined when a positive epsilon is available.
  std::optional<double> every_agent;
};

DistributedZenoBounds zeno_bound_distributed(const TriggerParams& params, std::size_t i,
                                             std::size_t edge_count, double alpha, double epsilon,
                                             double lambda_max);

}  // namespace rigidsim
