// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wgpoly/basis.hpp"
#include "wgpoly/mesh.hpp"

namespace wgpoly {

/// j = n + k - 1 for an n-gon, j = k + 1 on triangles.
int default_weak_degree(int n_edges, int k);

/// Local DOF layout of a weak function on one cell: the P_k(T) block of v0
/// first, then k + 1 edge coefficients per local edge in the cell's edge
/// order. Edge coefficients refer to the edge's canonical orientation.
struct LocalLayout {
  int k = 1;
  int n_edges = 0;

  int interior_size() const { return poly_dim(k); }
  int edge_size() const { return k + 1; }
  int edge_offset(int local_edge) const { return interior_size() + local_edge * edge_size(); }
  int size() const { return interior_size() + n_edges * edge_size(); }
};

/// Discrete weak gradient on one cell: (G D) v = B v, with G the Gram matrix
/// of [P_j(T)]^2 and B the integration-by-parts right-hand side. [P_j(T)]^2
/// is spanned by (psi_m, 0) followed by (0, psi_m), where psi is the cell's
/// OrthonormalBasis of degree j, so G is |T| times the identity up to
/// rounding and weak gradient coefficients are well scaled at every degree.
struct LocalWeakGradient {
  int cell = -1;
  int k = 1;
  int j = 2;
  LocalLayout layout;
  std::vector<Point> loop;
  CellGeometry geometry;
  /// Canonical (start, end) of each local edge.
  std::vector<std::array<Point, 2>> edge_ends;

  OrthonormalBasis basis;      // psi, degree j
  Eigen::MatrixXd gram;        // G
  Eigen::MatrixXd rhs;         // B
  Eigen::MatrixXd op;          // D = G^{-1} B
  Eigen::MatrixXd stiffness;   // A_T = B^T G^{-1} B, symmetrized
  Eigen::LLT<Eigen::MatrixXd> scalar_gram_factor;  // G is block diagonal in this

  CellBasis interior_basis() const { return {k, geometry.centroid, geometry.diameter}; }
  /// Value of the vector polynomial with coefficients `coeffs` at p.
  Point eval_vector(const Eigen::VectorXd& coeffs, Point p) const;
  /// Solves G c = m for c.
  Eigen::VectorXd solve_gram(const Eigen::VectorXd& moments) const;
};

/// Throws `GramSingular` if the orthonormal basis cannot be built or the
/// smallest Cholesky pivot of G drops below 1e-13 times the largest, and
/// `DegenerateCell` from quadrature.
LocalWeakGradient build_local(const Mesh& mesh, int cell, int k, int j);

/// Coefficients of the weak gradient in the vector basis. Throws
/// `DimensionMismatch`.
Eigen::VectorXd apply_weak_gradient(const LocalWeakGradient& op, std::span<const double> local);

/// Weak gradient of {phi|_T, phi|_dT} for an arbitrary function, integrating
/// phi directly rather than through its projection.
Eigen::VectorXd weak_gradient_of_function(const LocalWeakGradient& op,
                                          const std::function<double(Point)>& phi);

/// L2 projection onto [P_j(T)]^2 of a vector field.
Eigen::VectorXd project_vector_field(const LocalWeakGradient& op,
                                     const std::function<Point(Point)>& field, int quad_degree);

/// Squared L2 norm of a [P_j]^2 polynomial given by its coefficients.
double vector_norm_squared(const LocalWeakGradient& op, const Eigen::VectorXd& coeffs);

}  // namespace wgpoly
