#include "rigidsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>

#include "rigidsim/controllers.hpp"
#include "rigidsim/rigidity.hpp"

namespace rigidsim {

namespace {

double error_norm(const TraceSample& s) { return s.errors.norm(); }

bool above_floor(const TraceSample& s, double e0) { return error_norm(s) > kNumericalFloor * e0; }

void require_samples(const SimulationTrace& trace) {
  if (trace.samples.empty()) throw std::invalid_argument("trace has no samples");
}

}  // namespace

double fit_decay_rate(const SimulationTrace& trace) {
  require_samples(trace);
  const double e0 = error_norm(trace.samples.front());
  if (!(error_norm(trace.samples.back()) < e0)) {
    throw std::invalid_argument("decay fit needs a convergent trace (final |e| < initial |e|)");
  }
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (const auto& s : trace.samples) {
    if (!above_floor(s, e0)) continue;
    const double y = -std::log(error_norm(s));
    n += 1;
    st += s.time;
    sy += y;
    stt += s.time * s.time;
    sty += s.time * y;
  }
  if (n < 10) {
    throw std::invalid_argument("decay fit needs at least 10 samples above the numerical floor");
  }
  const double denom = n * stt - st * st;
  if (!(denom > 0.0)) throw std::invalid_argument("decay fit samples share a single time");
  return (n * sty - st * sy) / denom;
}

std::vector<ScopeStats> inter_event_stats(const EventLog& log) {
  if (log.events.empty()) throw std::invalid_argument("event log is empty");
  // kGlobalScope is the largest size_t; rotate it to the front.
  std::map<std::size_t, std::vector<double>> times;
  for (const auto& e : log.events) times[e.scope].push_back(e.time);
  std::vector<ScopeStats> out;
  auto summarize = [](std::size_t scope, const std::vector<double>& t) {
    ScopeStats st;
    st.scope = scope;
    st.count = t.size();
    if (t.size() >= 2) {
      double min_gap = std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k < t.size(); ++k) min_gap = std::min(min_gap, t[k] - t[k - 1]);
      st.min_gap = min_gap;
      st.mean_gap = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    }
    return st;
  };
  if (auto it = times.find(kGlobalScope); it != times.end()) {
    out.push_back(summarize(it->first, it->second));
  }
  for (const auto& [scope, t] : times) {
    if (scope != kGlobalScope) out.push_back(summarize(scope, t));
  }
  return out;
}

double centroid_drift(const SimulationTrace& trace) {
  require_samples(trace);
  const Vector& c0 = trace.samples.front().centroid;
  double drift = 0.0;
  for (const auto& s : trace.samples) drift = std::max(drift, (s.centroid - c0).norm());
  return drift;
}

double max_lyapunov_increase(const SimulationTrace& trace) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < trace.samples.size(); ++k) {
    worst = std::max(worst, trace.samples[k].lyapunov - trace.samples[k - 1].lyapunov);
  }
  return trace.samples.size() < 2 ? 0.0 : worst;
}

double final_displacement(const SimulationTrace& trace, double fraction) {
  require_samples(trace);
  const double t_end = trace.samples.back().time;
  const double t_from = t_end * (1.0 - fraction);
  const TraceSample* first = &trace.samples.back();
  for (const auto& s : trace.samples) {
    if (s.time >= t_from) {
      first = &s;
      break;
    }
  }
  return (trace.samples.back().positions - first->positions).norm();
}

TrajectorySpectra trajectory_spectra(const FormationGraph& graph, const SimulationTrace& trace) {
  require_samples(trace);
  TrajectorySpectra out{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& s : trace.samples) {
    const GramianBounds b = grammian_eigen_bounds(rigidity_matrix(graph, {s.positions, s.time}));
    out.gram_min = std::min(out.gram_min, b.gram_min);
    out.normal_max = std::max(out.normal_max, b.normal_max);
  }
  return out;
}

double measure_epsilon(const SimulationTrace& trace) {
  double eps = std::numeric_limits<double>::infinity();
  for (const auto& s : trace.samples) {
    const double e2 = s.errors.squaredNorm();
    if (!(std::sqrt(e2) > 1e-10)) continue;
    eps = std::min(eps, s.block_norms.cwiseAbs2().minCoeff() / e2);
  }
  return std::isfinite(eps) ? eps : 0.0;
}

double analytic_decay_rate(const Scenario& scenario, double gram_min) {
  switch (scenario.controller) {
    case ControllerKind::Continuous: return 2.0 * gram_min;
    case ControllerKind::CentralizedEvent: return 2.0 * (1.0 - scenario.trigger.gamma) * gram_min;
    default: {
      double zeta = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < scenario.graph.agents(); ++i) {
        zeta = std::min(zeta, (1.0 - scenario.trigger.gamma_i[i]) * (2.0 - scenario.trigger.a_i[i]) / 2.0);
      }
      return 2.0 * zeta * gram_min;
    }
  }
}

double envelope_ratio(const SimulationTrace& trace, double rate) {
  require_samples(trace);
  const double e0 = error_norm(trace.samples.front());
  double worst = 0.0;
  for (const auto& s : trace.samples) {
    if (!above_floor(s, e0)) continue;
    worst = std::max(worst, error_norm(s) / (std::exp(-rate * s.time) * e0));
  }
  return worst;
}

double max_trigger_value_between_events(const Scenario& scenario, const SimulationTrace& trace) {
  const TriggerParams& tp = scenario.trigger;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& s : trace.samples) {
    if (s.event || s.delta_norms.size() == 0) continue;
    if (scenario.controller == ControllerKind::CentralizedEvent) {
      worst = std::max(worst, s.delta_norms(0) - tp.gamma * s.block_norms.norm());
      continue;
    }
    for (std::size_t i = 0; i < trace.agents; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      double v = s.delta_norms(ii) * s.delta_norms(ii) -
                 tp.rho(i) * s.block_norms(ii) * s.block_norms(ii);
      if (scenario.controller == ControllerKind::ModifiedDistributedEvent) {
        v -= decay_threshold(tp, i, s.time);
      }
      worst = std::max(worst, v);
    }
  }
  return std::isfinite(worst) ? worst : 0.0;
}

double hysteresis_violation(const Scenario& scenario, const SimulationTrace& trace,
                            const EventLog& log) {
  if (scenario.controller != ControllerKind::DistributedEvent) {
    throw std::invalid_argument("hysteresis bracket applies to the distributed-event trigger only");
  }
  require_samples(trace);
  const double e0 = error_norm(trace.samples.front());
  double worst = 0.0;
  for (std::size_t i = 0; i < trace.agents; ++i) {
    std::vector<double> times;
    for (const auto& ev : log.events) {
      if (ev.scope == i) times.push_back(ev.time);
    }
    const double sr = std::sqrt(scenario.trigger.rho(i));
    const auto ii = static_cast<Eigen::Index>(i);
    std::size_t next = 0;
    double held = -1.0;
    for (const auto& s : trace.samples) {
      while (next < times.size() && times[next] <= s.time) {
        if (times[next] == s.time) held = s.block_norms(ii);
        ++next;
      }
      if (held <= 0.0 || !above_floor(s, e0)) continue;
      const double b = s.block_norms(ii);
      const double lo = held / (1.0 + sr);
      const double hi = held / (1.0 - sr);
      worst = std::max(worst, std::max(lo - b, b - hi) / held);
    }
  }
  return std::max(worst, 0.0);
}

InvarianceReport se_invariance_check(const Scenario& scenario, const Matrix& rotation,
                                     const Vector& translation) {
  const auto d = static_cast<Eigen::Index>(scenario.graph.dim());
  if (rotation.rows() != d || rotation.cols() != d || translation.size() != d) {
    throw std::invalid_argument("rotation/translation dimensions do not match the graph");
  }
  const double orth = (rotation.transpose() * rotation - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (orth > 1e-12 || rotation.determinant() < 0.0) {
    throw std::invalid_argument("rotation must be orthogonal with determinant +1");
  }
  Scenario twin = scenario;
  for (std::size_t i = 0; i < scenario.graph.agents(); ++i) {
    twin.initial.agent(i, scenario.graph.dim()) =
        rotation * scenario.initial.agent(i, scenario.graph.dim()) + translation;
  }
  const RunResult a = run(scenario);
  const RunResult b = run(twin);

  InvarianceReport rep;
  std::map<double, const TraceSample*> by_time;
  for (const auto& s : b.trace.samples) by_time.emplace(s.time, &s);
  for (const auto& s : a.trace.samples) {
    auto it = by_time.find(s.time);
    if (it == by_time.end()) continue;
    rep.max_error_deviation =
        std::max(rep.max_error_deviation, (s.errors - it->second->errors).cwiseAbs().maxCoeff());
  }
  const double e0 = error_norm(a.trace.samples.front());
  rep.resolved_until = std::numeric_limits<double>::infinity();
  for (const auto& s : a.trace.samples) {
    if (!above_floor(s, e0)) {
      rep.resolved_until = s.time;
      break;
    }
  }
  rep.total_events = a.log.events.size();
  rep.total_events_transformed = b.log.events.size();

  std::map<std::size_t, std::vector<double>> ta, tb;
  for (const auto& e : a.log.events) ta[e.scope].push_back(e.time);
  for (const auto& e : b.log.events) tb[e.scope].push_back(e.time);
  if (ta.size() != tb.size()) rep.event_counts_match = false;
  for (const auto& [scope, times] : ta) {
    const auto& other = tb[scope];
    const auto resolved = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), rep.resolved_until) - times.begin());
    rep.resolved_events += resolved;
    if (other.size() < resolved) {
      rep.event_counts_match = false;
      continue;
    }
    for (std::size_t k = 0; k < resolved; ++k) {
      rep.max_event_time_deviation =
          std::max(rep.max_event_time_deviation, std::abs(times[k] - other[k]));
    }
    // The twin must not fire extra events inside the resolved horizon either.
    if (other.size() > resolved && other[resolved] < rep.resolved_until - scenario.step) {
      rep.event_counts_match = false;
    }
  }
  if (!rep.event_counts_match) rep.max_event_time_deviation = std::numeric_limits<double>::infinity();
  return rep;
}

Matrix fd_jacobian_oracle(const FormationGraph& graph, const FormationState& state, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
  const Eigen::Index cols = state.positions.size();
  Matrix jac(static_cast<Eigen::Index>(graph.edge_count()), cols);
  Vector p = state.positions;
  for (Eigen::Index c = 0; c < cols; ++c) {
    const double orig = p(c);
    p(c) = orig + h;
    const Vector fwd = rigidity_function(graph, p);
    p(c) = orig - h;
    const Vector bwd = rigidity_function(graph, p);
    p(c) = orig;
    jac.col(c) = (fwd - bwd) / (2.0 * h);
  }
  return jac;
}

VerificationReport verify(const Scenario& scenario, const SimulationTrace& trace,
                          const EventLog& log) {
  require_samples(trace);
  VerificationReport r;
  r.scenario = scenario.name;
  r.controller = scenario.controller;
  const TraceSample& first = trace.samples.front();
  const TraceSample& last = trace.samples.back();
  r.final_time = last.time;
  r.initial_error_norm = first.errors.norm();
  r.final_error_norm = last.errors.norm();
  r.final_max_abs_error = last.errors.size() ? last.errors.cwiseAbs().maxCoeff() : 0.0;
  r.max_lyapunov_increase = max_lyapunov_increase(trace);
  r.lyapunov_monotone = r.max_lyapunov_increase <= 1e-12;

  const TrajectorySpectra spectra = trajectory_spectra(scenario.graph, trace);
  r.gram_min = spectra.gram_min;
  r.normal_max = spectra.normal_max;
  r.analytic_rate = analytic_decay_rate(scenario, spectra.gram_min);
  try {
    r.kappa_hat = fit_decay_rate(trace);
    r.rate_consistent = *r.kappa_hat >= 0.95 * r.analytic_rate;
  } catch (const std::invalid_argument& e) {
    r.warnings.emplace_back(std::string("decay fit unavailable: ") + e.what());
  }
  r.envelope_ratio = envelope_ratio(trace, r.analytic_rate);
  r.centroid_drift = centroid_drift(trace);
  r.final_displacement = final_displacement(trace);
  r.epsilon = measure_epsilon(trace);
  r.max_trigger_value = max_trigger_value_between_events(scenario, trace);

  if (!log.events.empty()) {
    r.stats = inter_event_stats(log);
    r.total_events = log.events.size();
    for (const auto& st : r.stats) {
      if (st.min_gap) r.min_gap = std::min(r.min_gap.value_or(*st.min_gap), *st.min_gap);
    }
  }

  if (r.initial_error_norm > 0.0 && r.normal_max > 0.0) {
    r.alpha = zeno_alpha(scenario.graph, r.initial_error_norm, r.normal_max);
    r.alpha_derived = zeno_alpha(scenario.graph, r.initial_error_norm, r.normal_max,
                                 kDerivedGramCoefficient);
    if (scenario.controller == ControllerKind::CentralizedEvent) {
      r.zeno_bound = zeno_bound_from_alpha(r.alpha, scenario.trigger.gamma);
      r.zeno_bound_derived = zeno_bound_from_alpha(r.alpha_derived, scenario.trigger.gamma);
      if (r.min_gap) {
        r.zeno_respected = *r.min_gap >= *r.zeno_bound;
        if (!*r.zeno_respected && *r.min_gap >= *r.zeno_bound_derived) {
          r.zeno_respected = true;
          r.warnings.emplace_back(
              "minimum gap is below the sqrt(2)-coefficient bound but above the 2*lambda_max variant");
        }
      }
    } else if (is_distributed(scenario.controller)) {
      bool ok = true;
      bool some = false;
      for (std::size_t i = 0; i < scenario.graph.agents(); ++i) {
        const auto b = zeno_bound_distributed(scenario.trigger, i, scenario.graph.edge_count(),
                                              r.alpha, r.epsilon, r.normal_max);
        r.distributed_bounds.push_back(b);
        std::optional<double> gap;
        for (const auto& st : r.stats) {
          if (st.scope == i) gap = st.min_gap;
        }
        if (!gap) continue;
        if (*gap >= b.some_agent) some = true;
        if (b.every_agent && *gap < *b.every_agent) ok = false;
      }
      if (r.min_gap) r.zeno_respected = ok && some;
    }
  }
  return r;
}

}  // namespace rigidsim
