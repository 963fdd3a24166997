#pragma once

#include "rigidsim/scenario.hpp"

namespace fixtures {

/// Double tetrahedron placed on integer coordinates whose nine edge lengths are
/// integers (4, 13, 15, 15, 13, 22, 15, 13, 22), so every distance error is
/// exactly zero in floating point.
inline rigidsim::Scenario exact_target_shape(rigidsim::ControllerKind kind) {
  using rigidsim::Edge;
  const std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3},
                                {2, 3}, {0, 4}, {1, 4}, {2, 4}};
  rigidsim::Vector p(15);
  p << 0, 0, 0, 4, 0, 0, -5, 12, 0, 9, 0, 12, 9, 0, -12;
  rigidsim::Scenario s = *rigidsim::preset("paper-centralized");
  s.name = "exact-target";
  s.graph = rigidsim::FormationGraph(5, 3, edges, {4, 13, 15, 15, 13, 22, 15, 13, 22});
  s.initial = {p, 0.0};
  s.controller = kind;
  return s;
}

}  // namespace fixtures
