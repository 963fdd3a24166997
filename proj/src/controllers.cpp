#include "rigidsim/controllers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rigidsim {

AgentLocalView local_view(const FormationGraph& graph, const FormationState& state,
                          std::size_t i) {
  if (i >= graph.agents()) {
    throw std::out_of_range("agent index " + std::to_string(i + 1) + " out of range");
  }
  const std::size_t d = graph.dim();
  AgentLocalView view;
  view.dim = d;
  const auto& incident = graph.incident_edges(i);
  view.offsets.reserve(incident.size());
  view.targets.reserve(incident.size());
  for (std::size_t k : incident) {
    const Edge& e = graph.edge(k);
    const std::size_t other = e.i == i ? e.j : e.i;
    view.offsets.emplace_back(state.agent(other, d) - state.agent(i, d));
    view.targets.push_back(graph.target(k));
  }
  return view;
}

Vector local_gradient_block(const AgentLocalView& view) {
  Vector block = Vector::Zero(static_cast<Eigen::Index>(view.dim));
  for (std::size_t k = 0; k < view.offsets.size(); ++k) {
    const Vector& z = view.offsets[k];
    const double err = z.squaredNorm() - view.targets[k] * view.targets[k];
    block -= z * err;
  }
  return block;
}

double local_roundoff_scale(const AgentLocalView& view) {
  double scale = 0.0;
  for (std::size_t k = 0; k < view.offsets.size(); ++k) {
    const double len2 = view.offsets[k].squaredNorm();
    scale += std::sqrt(len2) * (len2 + view.targets[k] * view.targets[k]);
  }
  return scale * std::numeric_limits<double>::epsilon();
}

Vector gradient(const FormationGraph& graph, const FormationState& state) {
  state.validate(graph);
  const std::size_t d = graph.dim();
  Vector g(static_cast<Eigen::Index>(graph.agents() * d));
  for (std::size_t i = 0; i < graph.agents(); ++i) {
    g.segment(static_cast<Eigen::Index>(i * d), static_cast<Eigen::Index>(d)) =
        local_gradient_block(local_view(graph, state, i));
  }
  return g;
}

double gradient_roundoff_scale(const FormationGraph& graph, const FormationState& state) {
  double scale = 0.0;
  for (std::size_t i = 0; i < graph.agents(); ++i) {
    scale += local_roundoff_scale(local_view(graph, state, i));
  }
  return scale;
}

Vector instantaneous_control(const FormationGraph& graph, const FormationState& state) {
  return -gradient(graph, state);
}

HeldControl centralized_held_control(const FormationGraph& graph,
                                     const FormationState& snapshot) {
  return {instantaneous_control(graph, snapshot), snapshot.time, snapshot};
}

Vector delta_centralized(const FormationGraph& graph, const FormationState& snapshot,
                         const FormationState& current) {
  return gradient(graph, snapshot) - gradient(graph, current);
}

Vector agent_block(const FormationGraph& graph, const RigidityMatrix& r, const Vector& errors,
                   std::size_t i) {
  if (i >= graph.agents()) {
    throw std::out_of_range("agent index " + std::to_string(i + 1) + " out of range");
  }
  const auto d = static_cast<Eigen::Index>(graph.dim());
  const auto cols = r.entries.middleCols(static_cast<Eigen::Index>(i) * d, d);
  return cols.transpose() * errors;
}

HeldControl distributed_held_control(const FormationGraph& graph, const FormationState& snapshot,
                                     std::size_t i) {
  snapshot.validate(graph);
  return {-local_gradient_block(local_view(graph, snapshot, i)), snapshot.time, snapshot};
}

Vector delta_distributed(const FormationGraph& graph, const FormationState& snapshot,
                         const FormationState& current, std::size_t i) {
  snapshot.validate(graph);
  current.validate(graph);
  return local_gradient_block(local_view(graph, snapshot, i)) -
         local_gradient_block(local_view(graph, current, i));
}

}  // namespace rigidsim
