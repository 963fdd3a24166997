#include "rigidsim/formation.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace rigidsim {

FormationGraph::FormationGraph(std::size_t agents, std::size_t dim, std::vector<Edge> edges,
                               std::vector<double> targets)
    : agents_(agents), dim_(dim), edges_(std::move(edges)), targets_(std::move(targets)) {
  if (dim_ != 2 && dim_ != 3) {
    throw std::invalid_argument("graph.dim must be 2 or 3, got " + std::to_string(dim_));
  }
  if (agents_ < 2) {
    throw std::invalid_argument("graph.agents must be at least 2");
  }
  if (targets_.size() != edges_.size()) {
    throw std::invalid_argument("graph.targets has " + std::to_string(targets_.size()) +
                                " entries but there are " + std::to_string(edges_.size()) +
                                " edges");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  incident_.assign(agents_, {});
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    Edge& e = edges_[k];
    if (e.i == e.j) {
      throw std::invalid_argument("graph.edges: self-loop at vertex " + std::to_string(e.i + 1));
    }
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.j >= agents_) {
      throw std::invalid_argument("graph.edges: vertex " + std::to_string(e.j + 1) +
                                  " exceeds agent count " + std::to_string(agents_));
    }
    if (!seen.emplace(e.i, e.j).second) {
      throw std::invalid_argument("graph.edges: duplicate edge (" + std::to_string(e.i + 1) +
                                  "," + std::to_string(e.j + 1) + ")");
    }
    if (!(targets_[k] > 0.0) || !std::isfinite(targets_[k])) {
      throw std::invalid_argument("graph.targets: entry " + std::to_string(k + 1) +
                                  " must be finite and > 0");
    }
    incident_[e.i].push_back(k);
    incident_[e.j].push_back(k);
  }
}

std::size_t FormationGraph::rigid_rank() const {
  return dim_ * agents_ - dim_ * (dim_ + 1) / 2;
}

void FormationState::validate(const FormationGraph& graph) const {
  const auto expected = static_cast<Eigen::Index>(graph.agents() * graph.dim());
  if (positions.size() != expected) {
    throw std::invalid_argument("state has " + std::to_string(positions.size()) +
                                " coordinates, expected " + std::to_string(expected));
  }
  if (!positions.allFinite()) {
    throw std::invalid_argument("state contains non-finite coordinates");
  }
}

Vector centroid(const FormationState& state, std::size_t dim) {
  const auto n = static_cast<std::size_t>(state.positions.size()) / dim;
  Vector c = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) c += state.agent(i, dim);
  return c / static_cast<double>(n);
}

FormationGraph double_tetrahedron_graph(double side) {
  std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3},
                          {2, 3}, {0, 4}, {1, 4}, {2, 4}};
  std::vector<double> targets(edges.size(), side);
  return FormationGraph(5, 3, std::move(edges), std::move(targets));
}

FormationState double_tetrahedron_initial_state() {
  Vector p(15);
  p << 0.0, -1.0, 0.5,  //
      1.8, 1.6, -0.1,   //
      -0.2, 1.8, 0.05,  //
      1.2, 1.9, 1.7,    //
      -1.0, -1.5, -1.2;
  return {p, 0.0};
}

}  // namespace rigidsim
