#include "rigidsim/triggers.hpp"

#include <sstream>
#include <stdexcept>
#include <string>

#include "rigidsim/rigidity.hpp"

namespace rigidsim {

namespace {

void require_open_unit(double value, const std::string& field) {
  if (!(value > 0.0 && value < 1.0)) {
    std::ostringstream msg;
    msg << "trigger." << field << " = " << value << " must lie in the open interval (0,1)";
    throw std::invalid_argument(msg.str());
  }
}

void require_positive(double value, const std::string& field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "trigger." << field << " = " << value << " must be finite and > 0";
    throw std::invalid_argument(msg.str());
  }
}

void require_size(const std::vector<double>& v, std::size_t agents, const std::string& field) {
  if (v.size() != agents) {
    throw std::invalid_argument("trigger." + field + " has " + std::to_string(v.size()) +
                                " entries, expected one per agent (" + std::to_string(agents) +
                                ")");
  }
}

}  // namespace

TriggerParams TriggerParams::uniform(std::size_t agents, double gamma, double gamma_i, double a_i,
                                     double v_i, double theta_i) {
  TriggerParams p;
  p.gamma = gamma;
  p.gamma_i.assign(agents, gamma_i);
  p.a_i.assign(agents, a_i);
  p.v_i.assign(agents, v_i);
  p.theta_i.assign(agents, theta_i);
  return p;
}

void TriggerParams::validate(std::size_t agents) const {
  require_open_unit(gamma, "gamma");
  require_size(gamma_i, agents, "gamma_i");
  require_size(a_i, agents, "a_i");
  require_size(v_i, agents, "v_i");
  require_size(theta_i, agents, "theta_i");
  for (std::size_t i = 0; i < agents; ++i) {
    const std::string idx = "[" + std::to_string(i + 1) + "]";
    require_open_unit(gamma_i[i], "gamma_i" + idx);
    require_open_unit(a_i[i], "a_i" + idx);
    require_positive(v_i[i], "v_i" + idx);
    require_positive(theta_i[i], "theta_i" + idx);
  }
}

double centralized_event_value(const Vector& delta, const Vector& gradient, double gamma) {
  return delta.norm() - gamma * gradient.norm();
}

double distributed_event_value(const Vector& delta_i, const Vector& block_i,
                               const TriggerParams& params, std::size_t i) {
  return delta_i.squaredNorm() - params.rho(i) * block_i.squaredNorm();
}

double decay_threshold(const TriggerParams& params, std::size_t i, double t) {
  return 2.0 * params.a_i[i] * params.v_i[i] * std::exp(-params.theta_i[i] * t);
}

double modified_event_value(const Vector& delta_i, const Vector& block_i,
                            const TriggerParams& params, std::size_t i, double t) {
  return distributed_event_value(delta_i, block_i, params, i) - decay_threshold(params, i, t);
}

void TriggerState::fire_and_reset(std::size_t scope, const FormationState& current) {
  ScopeRecord& rec = records_.at(scope);
  if (rec.event_count > 0 && !(current.time > rec.last_event_time)) {
    std::ostringstream msg;
    msg << "event times must strictly increase: scope " << scope << " last fired at "
        << rec.last_event_time << ", new event at " << current.time;
    throw std::invalid_argument(msg.str());
  }
  rec.snapshot = current;
  rec.last_event_time = current.time;
  ++rec.event_count;
}

double zeno_alpha(const FormationGraph& graph, double e0_norm, double lambda_max,
                  double gram_coefficient) {
  const double h = incidence_spectral_norm(graph);
  return std::sqrt(static_cast<double>(graph.dim())) * h * h * e0_norm +
         gram_coefficient * lambda_max;
}

double zeno_bound_from_alpha(double alpha, double gamma) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
  return gamma / (alpha * (1.0 + gamma));
}

double zeno_bound_centralized(const FormationGraph& graph, double e0_norm, double lambda_max,
                              double gamma, double gram_coefficient) {
  if (!(e0_norm > 0.0)) throw std::invalid_argument("|e(0)| must be > 0");
  if (!(lambda_max > 0.0)) throw std::invalid_argument("lambda_max must be > 0");
  return zeno_bound_from_alpha(zeno_alpha(graph, e0_norm, lambda_max, gram_coefficient), gamma);
}

DistributedZenoBounds zeno_bound_distributed(const TriggerParams& params, std::size_t i,
                                             std::size_t edge_count, double alpha, double epsilon,
                                             double lambda_max) {
  const double rho = params.rho(i);
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho_i must lie in (0,1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (edge_count == 0) throw std::invalid_argument("edge count must be > 0");
  const double sr = std::sqrt(rho);
  DistributedZenoBounds out;
  out.some_agent = sr / (alpha * (std::sqrt(static_cast<double>(edge_count)) + sr));
  if (epsilon > 0.0 && lambda_max > 0.0) {
    out.every_agent = sr / (alpha * (std::sqrt(lambda_max / epsilon) + sr));
  }
  return out;
}

}  // namespace rigidsim
