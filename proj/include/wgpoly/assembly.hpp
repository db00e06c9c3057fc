// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wgpoly/mesh.hpp"

namespace wgpoly {

using ScalarFunction = std::function<double(Point)>;
using VectorFunction = std::function<Point(Point)>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Global numbering: all cell blocks in cell order, then all edge blocks in
/// edge order.
struct DofMap {
  int k = 1;
  std::vector<int> cell_offset;
  std::vector<int> edge_offset;
  std::vector<char> is_boundary;  // per DOF
  std::vector<int> free_index;    // DOF -> free index, -1 on the boundary
  std::vector<int> free_dofs;     // free index -> DOF
  int total = 0;

  int cell_block() const { return (k + 1) * (k + 2) / 2; }
  int edge_block() const { return k + 1; }
  int num_free() const { return static_cast<int>(free_dofs.size()); }
  /// Global DOFs of a cell in local layout order.
  std::vector<int> local_dofs(const Mesh& mesh, int cell) const;
};

DofMap enumerate_dofs(const Mesh& mesh, int k);

/// Chooses the weak-gradient degree per cell: a fixed value, or
/// `default_weak_degree` when unset.
struct WeakDegreePolicy {
  std::optional<int> fixed;

  int degree_for(int n_edges, int k) const;
};

struct GlobalSystem {
  DofMap dofs;
  SparseMatrix matrix;  // free DOFs only
  Eigen::VectorXd rhs;
  /// Start of every DOF block in free numbering, plus a final sentinel.
  std::vector<int> block_starts;
  /// Number of leading free DOFs that belong to cell interiors.
  int interior_size = 0;

  /// Scatters a free-DOF vector into the full numbering (zeros on the boundary).
  Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
};

/// Stiffness and load for homogeneous Dirichlet data, with boundary edge DOFs
/// eliminated. Propagates `GramSingular`.
GlobalSystem assemble(const Mesh& mesh, int k, const WeakDegreePolicy& policy,
                      const ScalarFunction& f);

/// Q_h u = {Q0 u, Qb u} in the full numbering. `quad_degree < 0` selects 2k + 4.
Eigen::VectorXd interpolate(const ScalarFunction& u, const Mesh& mesh, int k, int quad_degree = -1);

/// L2 projection of u onto P_k of one cell, in that cell's scaled monomials.
Eigen::VectorXd project_cell(const ScalarFunction& u, const Mesh& mesh, int cell, int k,
                             int quad_degree);

/// L2 projection of u onto P_k of the edge a -> b in shifted Legendre
/// coefficients (t = 0 at a).
Eigen::VectorXd project_edge(const ScalarFunction& u, Point a, Point b, int k, int quad_degree);

/// Q_h u restricted to one cell, in that cell's local layout.
Eigen::VectorXd interpolate_local(const ScalarFunction& u, const Mesh& mesh, int cell, int k,
                                  int quad_degree);

/// Lower triangle in MatrixMarket coordinate real symmetric format.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);

}  // namespace wgpoly
