#include "rigidsim/rigidity.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace rigidsim {

namespace {

void check_dimensions(const FormationGraph& graph, const FormationState& state) {
  const auto expected = static_cast<Eigen::Index>(graph.agents() * graph.dim());
  if (state.positions.size() != expected) {
    throw std::invalid_argument("state size does not match graph (expected " +
                                std::to_string(expected) + " coordinates)");
  }
}

}  // namespace

Matrix incidence_matrix(const FormationGraph& graph) {
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(graph.edge_count()),
                          static_cast<Eigen::Index>(graph.agents()));
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const Edge& e = graph.edge(k);
    h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(e.i)) = -1.0;
    h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(e.j)) = 1.0;
  }
  return h;
}

Vector relative_positions(const FormationGraph& graph, const FormationState& state) {
  check_dimensions(graph, state);
  const std::size_t d = graph.dim();
  Vector z(static_cast<Eigen::Index>(graph.edge_count() * d));
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const Edge& e = graph.edge(k);
    z.segment(static_cast<Eigen::Index>(k * d), static_cast<Eigen::Index>(d)) =
        state.agent(e.j, d) - state.agent(e.i, d);
  }
  return z;
}

Vector distance_errors(const FormationGraph& graph, const FormationState& state) {
  check_dimensions(graph, state);
  const std::size_t d = graph.dim();
  Vector e(static_cast<Eigen::Index>(graph.edge_count()));
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const Edge& edge = graph.edge(k);
    const double dk = graph.target(k);
    e(static_cast<Eigen::Index>(k)) =
        (state.agent(edge.j, d) - state.agent(edge.i, d)).squaredNorm() - dk * dk;
  }
  return e;
}

Vector rigidity_function(const FormationGraph& graph, const Vector& positions) {
  const std::size_t d = graph.dim();
  Vector r(static_cast<Eigen::Index>(graph.edge_count()));
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const Edge& e = graph.edge(k);
    const auto pi = positions.segment(static_cast<Eigen::Index>(e.i * d), static_cast<Eigen::Index>(d));
    const auto pj = positions.segment(static_cast<Eigen::Index>(e.j * d), static_cast<Eigen::Index>(d));
    r(static_cast<Eigen::Index>(k)) = 0.5 * (pi - pj).squaredNorm();
  }
  return r;
}

RigidityMatrix rigidity_matrix(const FormationGraph& graph, const FormationState& state) {
  check_dimensions(graph, state);
  const auto d = static_cast<Eigen::Index>(graph.dim());
  RigidityMatrix r{Matrix::Zero(static_cast<Eigen::Index>(graph.edge_count()),
                                d * static_cast<Eigen::Index>(graph.agents())),
                   state.time};
  for (std::size_t k = 0; k < graph.edge_count(); ++k) {
    const Edge& e = graph.edge(k);
    const Vector zk = state.agent(e.j, graph.dim()) - state.agent(e.i, graph.dim());
    const auto row = static_cast<Eigen::Index>(k);
    r.entries.block(row, static_cast<Eigen::Index>(e.i) * d, 1, d) = -zk.transpose();
    r.entries.block(row, static_cast<Eigen::Index>(e.j) * d, 1, d) = zk.transpose();
  }
  return r;
}

std::size_t rigidity_rank(const RigidityMatrix& r, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("rank tolerance must be > 0");
  if (r.entries.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(r.entries);
  const Vector& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) == 0.0) return 0;
  const double cutoff = tol * sigma(0);
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > cutoff) ++rank;
  }
  return rank;
}

bool is_minimally_infinitesimally_rigid(const FormationGraph& graph, const FormationState& state,
                                        double tol) {
  if (graph.edge_count() != graph.rigid_rank()) return false;
  return rigidity_rank(rigidity_matrix(graph, state), tol) == graph.rigid_rank();
}

GramianBounds grammian_eigen_bounds(const RigidityMatrix& r) {
  GramianBounds b;
  if (r.entries.size() == 0) return b;
  Eigen::SelfAdjointEigenSolver<Matrix> gram(r.entries * r.entries.transpose(),
                                             Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> normal(r.entries.transpose() * r.entries,
                                               Eigen::EigenvaluesOnly);
  const Vector& g = gram.eigenvalues();
  const Vector& n = normal.eigenvalues();
  b.gram_min = g(0);
  b.gram_max = g(g.size() - 1);
  b.normal_min = n(0);
  b.normal_max = n(n.size() - 1);
  return b;
}

double incidence_spectral_norm(const FormationGraph& graph) {
  if (graph.edge_count() == 0) return 0.0;
  const Matrix h = incidence_matrix(graph);
  Eigen::SelfAdjointEigenSolver<Matrix> laplacian(h.transpose() * h, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, laplacian.eigenvalues().maxCoeff()));
}

}  // namespace rigidsim
