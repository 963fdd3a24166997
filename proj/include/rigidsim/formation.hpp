#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace rigidsim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// An undirected edge stored with 0-based vertices in canonical order (i < j).
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected graph with per-edge target distances describing a rigid shape task.
///
/// Edge order is fixed at construction. Row k of the incidence matrix, entry k
/// of the distance error vector and block k of the rigidity matrix all refer to
/// edge k. Vertices are 0-based here; file formats and logs use 1-based indices.
class FormationGraph {
 public:
  /// Throws std::invalid_argument when any invariant is violated: dim not in
  /// {2, 3}, self-loops, duplicates, out-of-range vertices, non-positive or
  /// non-finite targets, or a target count that differs from the edge count.
  /// Edges given as (j, i) with j > i are reoriented to (i, j).
  FormationGraph(std::size_t agents, std::size_t dim, std::vector<Edge> edges,
                 std::vector<double> targets);

  std::size_t agents() const { return agents_; }
  std::size_t dim() const { return dim_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t k) const { return edges_[k]; }
  const std::vector<double>& targets() const { return targets_; }
  double target(std::size_t k) const { return targets_[k]; }

  /// Edge indices incident to agent i, ascending.
  const std::vector<std::size_t>& incident_edges(std::size_t i) const { return incident_[i]; }

  /// dn - d(d+1)/2, the rank of an infinitesimally rigid framework's rigidity matrix.
  std::size_t rigid_rank() const;

  friend bool operator==(const FormationGraph& a, const FormationGraph& b) {
    return a.agents_ == b.agents_ && a.dim_ == b.dim_ && a.edges_ == b.edges_ &&
           a.targets_ == b.targets_;
  }

 private:
  std::size_t agents_;
  std::size_t dim_;
  std::vector<Edge> edges_;
  std::vector<double> targets_;
  std::vector<std::vector<std::size_t>> incident_;
};

/// Stacked agent positions p = [p_1; ...; p_n] in R^{dn} at a time instant.
struct FormationState {
  Vector positions;
  double time = 0.0;

  FormationState() = default;
  FormationState(Vector p, double t) : positions(std::move(p)), time(t) {}

  /// Throws std::invalid_argument if the size does not match the graph or any entry is non-finite.
  void validate(const FormationGraph& graph) const;

  auto agent(std::size_t i, std::size_t dim) const { return positions.segment(i * dim, dim); }
  auto agent(std::size_t i, std::size_t dim) { return positions.segment(i * dim, dim); }

  friend bool operator==(const FormationState& a, const FormationState& b) {
    return a.time == b.time && a.positions.size() == b.positions.size() &&
           a.positions == b.positions;
  }
};

/// Mean agent position.
Vector centroid(const FormationState& state, std::size_t dim);

/// Two tetrahedra sharing face (1,2,3): the 5-agent minimally rigid 3-D shape,
/// all target distances equal to `side`.
FormationGraph double_tetrahedron_graph(double side = 2.0);

/// Initial positions of the double-tetrahedron demonstration run.
FormationState double_tetrahedron_initial_state();

}  // namespace rigidsim
