#pragma once

#include "rigidsim/formation.hpp"

namespace rigidsim {

/// Jacobian of the rigidity function, m x dn, evaluated at `source_time`.
///
/// Row k holds (p_i - p_j)^T in the columns of vertex i and (p_j - p_i)^T in
/// the columns of vertex j for edge k = (i, j); every other entry is zero.
struct RigidityMatrix {
  Matrix entries;
  double source_time = 0.0;
};

/// Oriented incidence matrix H (m x n): -1 at column i, +1 at column j of edge (i, j).
Matrix incidence_matrix(const FormationGraph& graph);

/// z = (H kron I_d) p, stacked as m blocks of size d with z_k = p_j - p_i.
Vector relative_positions(const FormationGraph& graph, const FormationState& state);

/// e_k = |p_i - p_j|^2 - d_k^2.
Vector distance_errors(const FormationGraph& graph, const FormationState& state);

/// r_G(p) = 1/2 [..., |p_i - p_j|^2, ...].
Vector rigidity_function(const FormationGraph& graph, const Vector& positions);

RigidityMatrix rigidity_matrix(const FormationGraph& graph, const FormationState& state);

inline constexpr double kDefaultRankTolerance = 1e-9;

/// Number of singular values above tol * sigma_max. An all-zero matrix has rank 0.
std::size_t rigidity_rank(const RigidityMatrix& r, double tol = kDefaultRankTolerance);

/// m == dn - d(d+1)/2 and rank(R) == dn - d(d+1)/2.
bool is_minimally_infinitesimally_rigid(const FormationGraph& graph, const FormationState& state,
                                        double tol = kDefaultRankTolerance);

/// Extreme eigenvalues of both Gram products of R.
///
/// R R^T (m x m) is positive definite exactly when the framework is minimally
/// infinitesimally rigid, so its smallest eigenvalue drives the decay-rate
/// estimate. R^T R (dn x dn) always has the rigid-motion kernel, so its
/// smallest eigenvalue is zero; its largest equals that of R R^T.
struct GramianBounds {
  double gram_min = 0.0;    ///< lambda_min(R R^T)
  double gram_max = 0.0;    ///< lambda_max(R R^T)
  double normal_min = 0.0;  ///< lambda_min(R^T R)
  double normal_max = 0.0;  ///< lambda_max(R^T R)
};

GramianBounds grammian_eigen_bounds(const RigidityMatrix& r);

/// Spectral norm of H. Equal to that of H kron I_d and of its transpose.
double incidence_spectral_norm(const FormationGraph& graph);

}  // namespace rigidsim
