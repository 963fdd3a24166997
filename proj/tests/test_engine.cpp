#include <algorithm>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "rigidsim/analysis.hpp"
#include "rigidsim/controllers.hpp"
#include "rigidsim/engine.hpp"
#include "rigidsim/scenario.hpp"

using namespace rigidsim;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

Scenario short_preset(const char* name, double duration) {
  Scenario s = *preset(name);
  s.duration = duration;
  return s;
}

double max_error_gap(const SimulationTrace& a, const SimulationTrace& b) {
  std::map<double, const TraceSample*> by_time;
  for (const auto& s : b.samples) by_time.emplace(s.time, &s);
  double worst = 0.0;
  for (const auto& s : a.samples) {
    if (auto it = by_time.find(s.time); it != by_time.end()) {
      worst = std::max(worst, (s.errors - it->second->errors).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("controller names round-trip") {
  for (auto k : {ControllerKind::Continuous, ControllerKind::CentralizedEvent,
                 ControllerKind::DistributedEvent, ControllerKind::ModifiedDistributedEvent}) {
    CHECK(parse_controller_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_controller_kind("periodic").has_value());
}

TEST_CASE("step_once is exact for dyadic data") {
  const FormationState s(vec({0.5, 0.25, -1.0}), 0.375);
  const FormationState next = step_once(s, vec({1.0, -2.0, 0.5}), 0.125);
  CHECK(next.positions == vec({0.625, 0.0, -0.9375}));
  CHECK(next.time == 0.5);
  CHECK(advance_to(s, vec({1.0, -2.0, 0.5}), 0.5) == next);
}

TEST_CASE("refine_event_time locates an affine root") {
  const FormationState start(vec({0.0}), 0.0);
  const auto f = [](const FormationState& x) { return x.positions(0) - 0.3; };
  const double t = refine_event_time(start, vec({1.0}), 1.0, f);
  CHECK(t >= 0.3);
  CHECK(t - 0.3 <= 1e-12);
  CHECK(f(advance_to(start, vec({1.0}), t)) >= 0.0);
}

TEST_CASE("refine_event_time with the crossing exactly at the bracket end") {
  const double h = 0.0009765625;
  const FormationState start(vec({0.0}), 2.0);
  const auto f = [h](const FormationState& x) { return x.positions(0) - h; };
  CHECK(refine_event_time(start, vec({1.0}), 2.0 + h, f) == 2.0 + h);
}

TEST_CASE("refine_event_time rejects brackets without a sign change") {
  const FormationState start(vec({0.0}), 0.0);
  CHECK_THROWS_AS(
      refine_event_time(start, vec({1.0}), 1.0, [](const FormationState& x) { return x.positions(0) - 5.0; }),
      std::invalid_argument);
  CHECK_THROWS_AS(
      refine_event_time(start, vec({1.0}), 1.0, [](const FormationState& x) { return x.positions(0) + 1.0; }),
      std::invalid_argument);
  CHECK_THROWS_AS(refine_event_time(start, vec({1.0}), 0.0, [](const FormationState&) { return 1.0; }),
                  std::invalid_argument);
}

TEST_CASE("every scope fires at t = 0") {
  const RunResult c = run(short_preset("paper-centralized", 0.01));
  REQUIRE_FALSE(c.log.events.empty());
  CHECK(c.log.events.front().scope == kGlobalScope);
  CHECK(c.log.events.front().time == 0.0);

  const RunResult d = run(short_preset("paper-distributed", 0.01));
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(d.log.events[i].scope == i);
    CHECK(d.log.events[i].time == 0.0);
  }
  CHECK(d.trace.samples.front().event);
}

TEST_CASE("held control integrates exactly between events") {
  // Before the first post-initial event every agent moves on a straight line
  // with the t = 0 control.
  const Scenario s = short_preset("paper-centralized", 0.5);
  const RunResult r = run(s);
  REQUIRE(r.log.events.size() >= 2);
  const double t1 = r.log.events[1].time;
  const Vector u0 = instantaneous_control(s.graph, s.initial);
  for (const auto& smp : r.trace.samples) {
    if (smp.time >= t1) break;
    CHECK((smp.positions - (s.initial.positions + smp.time * u0)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("trace layout follows the sampling policy") {
  const Scenario s = short_preset("paper-centralized", 0.1);
  const RunResult r = run(s);
  CHECK(r.trace.agents == 5);
  CHECK(r.trace.dim == 3);
  CHECK(r.trace.edges == 9);
  CHECK(r.trace.delta_columns() == 1);
  CHECK(r.trace.samples.back().time == doctest::Approx(0.1));
  std::size_t grid = 0;
  for (const auto& smp : r.trace.samples) {
    CHECK(smp.errors.size() == 9);
    CHECK(smp.lyapunov == doctest::Approx(0.25 * smp.errors.squaredNorm()));
    if (!smp.event) ++grid;
  }
  CHECK(grid <= 10);
  for (std::size_t k = 1; k < r.trace.samples.size(); ++k) {
    CHECK(r.trace.samples[k].time > r.trace.samples[k - 1].time);
  }
  // Every logged event time has a matching sample flagged as an event.
  for (const auto& e : r.log.events) {
    const auto it = std::find_if(r.trace.samples.begin(), r.trace.samples.end(),
                                 [&](const TraceSample& x) { return x.time == e.time; });
    REQUIRE(it != r.trace.samples.end());
    CHECK(it->event);
  }
}

TEST_CASE("exact target shape stays put and never re-triggers") {
  for (auto kind : {ControllerKind::CentralizedEvent, ControllerKind::DistributedEvent,
                    ControllerKind::ModifiedDistributedEvent}) {
    Scenario s = fixtures::exact_target_shape(kind);
    s.duration = 5.0;
    const RunResult r = run(s);
    for (const auto& e : r.log.events) CHECK(e.time == 0.0);
    for (const auto& smp : r.trace.samples) CHECK(smp.positions == s.initial.positions);
    CHECK(r.warnings.empty());
  }
}

TEST_CASE("runs are deterministic") {
  const Scenario s = short_preset("paper-distributed", 1.0);
  const RunResult a = run(s);
  const RunResult b = run(s);
  REQUIRE(a.log.events.size() == b.log.events.size());
  CHECK(a.log.events == b.log.events);
  REQUIRE(a.trace.samples.size() == b.trace.samples.size());
  for (std::size_t k = 0; k < a.trace.samples.size(); ++k) {
    CHECK(a.trace.samples[k].positions == b.trace.samples[k].positions);
  }
}

TEST_CASE("far-away initial shape diverges under fixed-step updates") {
  // Gradient magnitudes grow with the cube of the scale, so a 1 ms Euler step
  // overshoots by orders of magnitude once nothing shortens the hold interval.
  for (const char* name : {"paper-continuous", "paper-centralized", "paper-distributed"}) {
    CAPTURE(name);
    Scenario s = *preset(name);
    s.initial.positions *= 100.0;
    s.bisection = false;
    try {
      run(s);
      FAIL("expected divergence");
    } catch (const DivergenceError& e) {
      CHECK(e.step_index() > 0);
      CHECK(e.time() == doctest::Approx(static_cast<double>(e.step_index()) * s.step));
      CHECK(std::string(e.what()).find("diverged") != std::string::npos);
    }
  }
}

TEST_CASE("refined events keep a far-away start inside the representable range") {
  // Each refined event caps the hold interval at the true crossing, so the
  // event-triggered loop tracks the continuous flow instead of overshooting.
  Scenario s = *preset("paper-centralized");
  s.initial.positions *= 100.0;
  s.duration = 1.0;
  const RunResult r = run(s);
  CHECK(r.trace.samples.back().positions.cwiseAbs().maxCoeff() < 1e3);
}

TEST_CASE("invalid scenarios are rejected before running") {
  Scenario s = *preset("paper-centralized");
  s.step = 0.0;
  CHECK_THROWS_AS(run(s), std::invalid_argument);
  s = *preset("paper-centralized");
  s.trigger.gamma = 1.5;
  CHECK_THROWS_AS(run(s), std::invalid_argument);
  s = *preset("paper-centralized");
  s.initial.positions.resize(14);
  CHECK_THROWS_AS(run(s), std::invalid_argument);
}

TEST_CASE("first refined event lies within one step of its unrefined counterpart") {
  for (const char* name : {"paper-centralized", "paper-distributed"}) {
    Scenario s = short_preset(name, 1.0);
    const RunResult on = run(s);
    s.bisection = false;
    const RunResult off = run(s);
    const std::size_t init = is_distributed(s.controller) ? 5 : 1;
    REQUIRE(on.log.events.size() > init);
    REQUIRE(off.log.events.size() > init);
    const double t_on = on.log.events[init].time;
    const double t_off = off.log.events[init].time;
    CHECK(t_off >= t_on);
    CHECK(t_off - t_on < s.step);
    // Identical up to the first refined event.
    for (const auto& smp : on.trace.samples) {
      if (smp.time >= t_on) break;
      const auto it = std::find_if(off.trace.samples.begin(), off.trace.samples.end(),
                                   [&](const TraceSample& x) { return x.time == smp.time; });
      if (it != off.trace.samples.end()) CHECK(it->positions == smp.positions);
    }
  }
}

TEST_CASE("bisection on and off agree over a full run") {
  for (const char* name : {"paper-centralized", "paper-distributed"}) {
    CAPTURE(name);
    Scenario s = *preset(name);
    const RunResult on = run(s);
    s.bisection = false;
    const RunResult off = run(s);
    const std::size_t n = std::min(on.log.events.size(), off.log.events.size());
    double worst_time = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      worst_time = std::max(worst_time, std::abs(on.log.events[k].time - off.log.events[k].time));
    }
    CHECK(on.log.events.size() == off.log.events.size());
    CHECK(worst_time < s.step);
    CHECK(max_error_gap(on.trace, off.trace) < 1e-6);
  }
}
