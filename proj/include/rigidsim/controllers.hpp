#pragma once

#include <vector>

#include "rigidsim/formation.hpp"
#include "rigidsim/rigidity.hpp"

namespace rigidsim {

/// Everything agent i can sense: offsets to its neighbours (p_j - p_i, one per
/// incident edge in edge order) and the matching target distances.
///
/// The distributed laws only ever see this view, so they cannot depend on
/// absolute positions or on non-incident edges.
struct AgentLocalView {
  std::size_t dim = 0;
  std::vector<Vector> offsets;
  std::vector<double> targets;
};

AgentLocalView local_view(const FormationGraph& graph, const FormationState& state, std::size_t i);

/// {R^T e}_i computed from the local view: sum over neighbours of (p_i - p_j) e_k.
Vector local_gradient_block(const AgentLocalView& view);

/// Magnitude of rounding error in a computed gradient block, in the same units
/// as the block: eps * sum_k |z_k| (|z_k|^2 + d_k^2).
double local_roundoff_scale(const AgentLocalView& view);

/// R(p)^T e(p), stacked from per-agent local blocks.
Vector gradient(const FormationGraph& graph, const FormationState& state);

/// Rounding scale of the full gradient (each edge counted once per endpoint).
double gradient_roundoff_scale(const FormationGraph& graph, const FormationState& state);

/// -R(p)^T e(p): the continuous gradient-descent law.
Vector instantaneous_control(const FormationGraph& graph, const FormationState& state);

/// A control value frozen at an event and applied until the next one.
struct HeldControl {
  Vector value;
  double held_since = 0.0;
  FormationState source_state;
};

HeldControl centralized_held_control(const FormationGraph& graph, const FormationState& snapshot);

/// R(t_h)^T e(t_h) - R(t)^T e(t).
Vector delta_centralized(const FormationGraph& graph, const FormationState& snapshot,
                         const FormationState& current);

/// Entries d*i .. d*i + d - 1 of R^T e, read from an assembled rigidity matrix.
Vector agent_block(const FormationGraph& graph, const RigidityMatrix& r, const Vector& errors,
                   std::size_t i);

/// u_i = sum_j (p_j - p_i) e_k = -{R^T e}_i at agent i's snapshot.
HeldControl distributed_held_control(const FormationGraph& graph, const FormationState& snapshot,
                                     std::size_t i);

/// {R(t_h^i)^T e(t_h^i)}_i - {R(t)^T e(t)}_i.
Vector delta_distributed(const FormationGraph& graph, const FormationState& snapshot,
                         const FormationState& current, std::size_t i);

}  // namespace rigidsim
