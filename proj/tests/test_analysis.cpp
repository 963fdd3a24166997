#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "rigidsim/analysis.hpp"
#include "rigidsim/scenario.hpp"

using namespace rigidsim;

namespace {

SimulationTrace synthetic_decay(double rate, std::size_t samples, double dt) {
  SimulationTrace tr;
  tr.agents = 2;
  tr.dim = 2;
  tr.edges = 2;
  Vector dir(2);
  dir << 3.0, -4.0;
  for (std::size_t k = 0; k < samples; ++k) {
    TraceSample s;
    s.time = static_cast<double>(k) * dt;
    s.errors = dir * std::exp(-rate * s.time);
    s.lyapunov = 0.25 * s.errors.squaredNorm();
    s.positions = Vector::Zero(4);
    s.centroid = Vector::Zero(2);
    s.block_norms = Vector::Ones(2);
    tr.samples.push_back(s);
  }
  return tr;
}

EventLog periodic_log(std::size_t scope, double period, std::size_t count) {
  EventLog log;
  for (std::size_t k = 0; k < count; ++k) log.events.push_back({scope, static_cast<double>(k) * period, 0, 0});
  return log;
}

Scenario two_agents() {
  Scenario s = *preset("paper-distributed");
  s.graph = FormationGraph(2, 2, {{0, 1}}, {1.0});
  Vector p(4);
  p << 0, 0, 2, 0;
  s.initial = {p, 0.0};
  s.trigger = TriggerParams::uniform(2, 0.6, 0.8, 0.6, 1.0, 10.0);
  s.duration = 3.0;
  return s;
}

}  // namespace

TEST_CASE("decay fit recovers an exponential rate") {
  CHECK(fit_decay_rate(synthetic_decay(3.0, 200, 0.01)) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit_decay_rate(synthetic_decay(0.5, 50, 0.2)) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("decay fit rejects traces that do not converge") {
  CHECK_THROWS_AS(fit_decay_rate(synthetic_decay(0.0, 100, 0.01)), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay_rate(synthetic_decay(3.0, 5, 0.01)), std::invalid_argument);
  CHECK_THROWS_AS(fit_decay_rate(SimulationTrace{}), std::invalid_argument);
}

TEST_CASE("decay fit ignores samples on the rounding floor") {
  SimulationTrace tr = synthetic_decay(2.0, 100, 0.05);
  for (int k = 0; k < 50; ++k) {
    TraceSample s = tr.samples.back();
    s.time += 0.05;
    s.errors = Vector::Constant(2, 1e-15);
    tr.samples.push_back(s);
  }
  CHECK(fit_decay_rate(tr) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("inter-event statistics") {
  SUBCASE("periodic events") {
    const auto stats = inter_event_stats(periodic_log(kGlobalScope, 0.05, 41));
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].count == 41);
    CHECK(*stats[0].min_gap == doctest::Approx(0.05));
    CHECK(*stats[0].mean_gap == doctest::Approx(0.05));
  }
  SUBCASE("a single event has no gap") {
    const auto stats = inter_event_stats(periodic_log(kGlobalScope, 0.05, 1));
    CHECK(stats[0].count == 1);
    CHECK_FALSE(stats[0].min_gap.has_value());
    CHECK_FALSE(stats[0].mean_gap.has_value());
  }
  SUBCASE("scopes are reported separately, in order") {
    EventLog log = periodic_log(2, 0.1, 3);
    for (const auto& e : periodic_log(0, 0.3, 4).events) log.events.push_back(e);
    const auto stats = inter_event_stats(log);
    REQUIRE(stats.size() == 2);
    CHECK(stats[0].scope == 0);
    CHECK(*stats[0].min_gap == doctest::Approx(0.3));
    CHECK(stats[1].scope == 2);
    CHECK(*stats[1].min_gap == doctest::Approx(0.1));
  }
  CHECK_THROWS_AS(inter_event_stats(EventLog{}), std::invalid_argument);
}

TEST_CASE("epsilon for two agents equals the squared edge length") {
  // With one edge both blocks are z e, so |b_i|^2 / |e|^2 = |z|^2.
  const Scenario s = two_agents();
  const RunResult r = run(s);
  double expected = std::numeric_limits<double>::infinity();
  for (const auto& smp : r.trace.samples) {
    if (smp.errors.norm() > 1e-10) {
      expected = std::min(expected, (smp.positions.segment(2, 2) - smp.positions.segment(0, 2)).squaredNorm());
    }
  }
  CHECK(measure_epsilon(r.trace) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(measure_epsilon(r.trace) >= 1.0 - 1e-6);
}

TEST_CASE("epsilon is zero when a block vanishes and undefined at convergence") {
  SimulationTrace tr = synthetic_decay(1.0, 20, 0.1);
  CHECK(measure_epsilon(tr) == doctest::Approx(1.0 / 25.0));
  tr.samples[5].block_norms(1) = 0.0;
  CHECK(measure_epsilon(tr) == 0.0);
  for (auto& smp : tr.samples) smp.errors.setZero();
  CHECK(measure_epsilon(tr) == 0.0);
}

TEST_CASE("analytic decay rates") {
  Scenario s = *preset("paper-centralized");
  CHECK(analytic_decay_rate(s, 1.5) == doctest::Approx(2.0 * 0.4 * 1.5));
  s.controller = ControllerKind::DistributedEvent;
  // zeta = (1 - 0.8)(2 - 0.6)/2 = 0.14
  CHECK(analytic_decay_rate(s, 1.5) == doctest::Approx(2.0 * 0.14 * 1.5));
  s.controller = ControllerKind::Continuous;
  CHECK(analytic_decay_rate(s, 1.5) == doctest::Approx(3.0));
}

TEST_CASE("envelope ratio and Lyapunov increase on synthetic traces") {
  const SimulationTrace tr = synthetic_decay(2.0, 100, 0.01);
  CHECK(envelope_ratio(tr, 2.0) == doctest::Approx(1.0));
  CHECK(envelope_ratio(tr, 1.0) == doctest::Approx(1.0));
  CHECK(envelope_ratio(tr, 3.0) > 1.0);
  CHECK(max_lyapunov_increase(tr) < 0.0);
}

TEST_CASE("trajectory measures on a centralized run") {
  Scenario s = *preset("paper-centralized");
  s.duration = 5.0;
  const RunResult r = run(s);
  CHECK(centroid_drift(r.trace) < 1e-9);
  CHECK(max_lyapunov_increase(r.trace) <= 1e-12);
  CHECK(max_trigger_value_between_events(s, r.trace) <= 1e-9);

  const TrajectorySpectra spec = trajectory_spectra(s.graph, r.trace);
  const Matrix r0 = oracle::rigidity(s.graph, s.initial.positions);
  CHECK(spec.gram_min <= oracle::jacobi_eigenvalues(r0 * r0.transpose()).front() * (1 + 1e-9));
  CHECK(spec.normal_max >= oracle::jacobi_eigenvalues(r0.transpose() * r0).back() * (1 - 1e-9));
  CHECK(spec.gram_min > 0.0);
}

TEST_CASE("distributed run stays inside the hysteresis bracket") {
  Scenario s = *preset("paper-distributed");
  s.duration = 5.0;
  const RunResult r = run(s);
  CHECK(hysteresis_violation(s, r.trace, r.log) <= 1e-6);
  CHECK_THROWS_AS(hysteresis_violation(*preset("paper-centralized"), r.trace, r.log),
                  std::invalid_argument);
}

TEST_CASE("rigid-motion invariance check") {
  std::mt19937_64 rng(99);
  Scenario s = *preset("paper-centralized");
  s.duration = 2.0;
  const InvarianceReport rep =
      se_invariance_check(s, oracle::random_rotation(rng, 3), oracle::random_vector(rng, 3, 5.0));
  CHECK(rep.event_counts_match);
  CHECK(rep.resolved_events > 10);
  CHECK(rep.resolved_until > 1.0);
  CHECK(rep.max_error_deviation < 1e-9);
  CHECK(rep.max_event_time_deviation <= s.step);

  Matrix reflection = Matrix::Identity(3, 3);
  reflection(2, 2) = -1.0;
  CHECK_THROWS_AS(se_invariance_check(s, reflection, Vector::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(se_invariance_check(s, 2.0 * Matrix::Identity(3, 3), Vector::Zero(3)),
                  std::invalid_argument);
}

TEST_CASE("finite-difference oracle input checks") {
  const FormationGraph g = double_tetrahedron_graph();
  CHECK_THROWS_AS(fd_jacobian_oracle(g, double_tetrahedron_initial_state(), 0.0), std::invalid_argument);
}

TEST_CASE("verification report on the centralized preset") {
  Scenario s = *preset("paper-centralized");
  const RunResult r = run(s);
  const VerificationReport rep = verify(s, r.trace, r.log);
  CHECK(rep.final_max_abs_error < 1e-3);
  CHECK(rep.lyapunov_monotone);
  REQUIRE(rep.kappa_hat.has_value());
  CHECK(rep.rate_consistent);
  CHECK(*rep.kappa_hat >= 0.95 * rep.analytic_rate);
  REQUIRE(rep.zeno_bound.has_value());
  CHECK(rep.zeno_respected.value_or(false));
  CHECK(rep.alpha < rep.alpha_derived);
  CHECK(*rep.zeno_bound_derived < *rep.zeno_bound);
  CHECK(rep.total_events == r.log.events.size());
}

TEST_CASE("verification of an idle run at the target shape") {
  const Scenario s = fixtures::exact_target_shape(ControllerKind::CentralizedEvent);
  const RunResult r = run(s);
  const VerificationReport rep = verify(s, r.trace, r.log);
  CHECK(rep.final_error_norm == 0.0);
  CHECK(rep.lyapunov_monotone);
  CHECK_FALSE(rep.kappa_hat.has_value());
  CHECK(rep.total_events == 1);
}
