// SPDX-License-Identifier: Apache-2.0
#include "wgpoly/assembly.hpp"

#include <cstdio>

#include "wgpoly/basis.hpp"
#include "wgpoly/error.hpp"
#include "wgpoly/quadrature.hpp"
#include "wgpoly/weakgrad.hpp"

namespace wgpoly {

std::vector<int> DofMap::local_dofs(const Mesh& mesh, int cell) const {
  const Cell& c = mesh.cells[cell];
  std::vector<int> out;
  out.reserve(cell_block() + c.size() * edge_block());
  for (int i = 0; i < cell_block(); ++i) out.push_back(cell_offset[cell] + i);
  for (int e : c.edges)
    for (int i = 0; i < edge_block(); ++i) out.push_back(edge_offset[e] + i);
  return out;
}

DofMap enumerate_dofs(const Mesh& mesh, int k) {
  if (k < 1) throw Error(ErrorCode::Config, "k must be at least 1");
  DofMap d;
  d.k = k;
  int next = 0;
  d.cell_offset.resize(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c, next += d.cell_block()) d.cell_offset[c] = next;
  d.edge_offset.resize(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e, next += d.edge_block()) d.edge_offset[e] = next;
  d.total = next;
  d.is_boundary.assign(d.total, 0);
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.edges[e].boundary)
      for (int i = 0; i < d.edge_block(); ++i) d.is_boundary[d.edge_offset[e] + i] = 1;
  d.free_index.assign(d.total, -1);
  for (int i = 0; i < d.total; ++i)
    if (!d.is_boundary[i]) {
      d.free_index[i] = d.num_free();
      d.free_dofs.push_back(i);
    }
  return d;
}

int WeakDegreePolicy::degree_for(int n_edges, int k) const {
  return fixed ? *fixed : default_weak_degree(n_edges, k);
}

Eigen::VectorXd GlobalSystem::expand(const Eigen::VectorXd& free) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(dofs.total);
  for (int i = 0; i < dofs.num_free(); ++i) full[dofs.free_dofs[i]] = free[i];
  return full;
}

GlobalSystem assemble(const Mesh& mesh, int k, const WeakDegreePolicy& policy,
                      const ScalarFunction& f) {
  GlobalSystem sys;
  sys.dofs = enumerate_dofs(mesh, k);
  const DofMap& d = sys.dofs;
  const int nfree = d.num_free();

  // Row capacity: the local sizes of every cell touching the row's block.
  Eigen::VectorXi capacity = Eigen::VectorXi::Zero(nfree);
  std::vector<std::vector<int>> local(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    local[c] = d.local_dofs(mesh, c);
    int nlocal_free = 0;
    for (int g : local[c]) nlocal_free += d.free_index[g] >= 0;
    for (int g : local[c])
      if (d.free_index[g] >= 0) capacity[d.free_index[g]] += nlocal_free;
  }
  sys.matrix.resize(nfree, nfree);
  sys.matrix.reserve(capacity);
  sys.rhs = Eigen::VectorXd::Zero(nfree);

  for (int c = 0; c < mesh.num_cells(); ++c) {
    const int j = policy.degree_for(mesh.cells[c].size(), k);
    const LocalWeakGradient op = build_local(mesh, c, k, j);
    const auto& dofs = local[c];
    const int n = static_cast<int>(dofs.size());
    for (int a = 0; a < n; ++a) {
      const int row = d.free_index[dofs[a]];
      if (row < 0) continue;
      for (int b = 0; b < n; ++b) {
        const int col = d.free_index[dofs[b]];
        if (col >= 0) sys.matrix.coeffRef(row, col) += op.stiffness(a, b);
      }
    }
    // (f, phi_m)_T with the same degree-2j rule as the stiffness terms.
    const CellBasis pk = op.interior_basis();
    const QuadratureRule rule = polygon_rule(op.loop, 2 * j);
    Eigen::VectorXd phi(pk.size());
    Eigen::VectorXd load = Eigen::VectorXd::Zero(pk.size());
    for (int q = 0; q < rule.size(); ++q) {
      pk.eval(rule.points[q], {phi.data(), static_cast<std::size_t>(pk.size())});
      load += rule.weights[q] * f(rule.points[q]) * phi;
    }
    for (int m = 0; m < pk.size(); ++m) sys.rhs[d.free_index[d.cell_offset[c] + m]] += load[m];
  }
  sys.matrix.makeCompressed();

  for (int c = 0; c < mesh.num_cells(); ++c) sys.block_starts.push_back(d.free_index[d.cell_offset[c]]);
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (!mesh.edges[e].boundary) sys.block_starts.push_back(d.free_index[d.edge_offset[e]]);
  sys.block_starts.push_back(nfree);
  sys.interior_size = mesh.num_cells() * d.cell_block();
  return sys;
}

Eigen::VectorXd project_cell(const ScalarFunction& u, const Mesh& mesh, int cell, int k,
                             int quad_degree) {
  const CellGeometry g = mesh.cell_geometry(cell);
  const CellBasis pk(k, g.centroid, g.diameter);
  const int n = pk.size();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd phi(n);
  const QuadratureRule rule = cell_rule(mesh, cell, std::max(quad_degree, 2 * k));
  for (int q = 0; q < rule.size(); ++q) {
    pk.eval(rule.points[q], {phi.data(), static_cast<std::size_t>(n)});
    gram.noalias() += rule.weights[q] * phi * phi.transpose();
    moments += rule.weights[q] * u(rule.points[q]) * phi;
  }
  return gram.llt().solve(moments);
}

Eigen::VectorXd project_edge(const ScalarFunction& u, Point a, Point b, int k, int quad_degree) {
  const EdgeBasis eb(k, a, b);
  const QuadratureRule rule = edge_rule(a, b, std::max(quad_degree, 2 * k));
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(k + 1);
  std::vector<double> psi(k + 1);
  for (int q = 0; q < rule.size(); ++q) {
    eb.eval(rule.params[q], psi);
    const double w = rule.weights[q] * u(rule.points[q]) / eb.length();
    // Shifted Legendre polynomials have squared norm 1 / (2i + 1) on [0, 1].
    for (int i = 0; i <= k; ++i) coeffs[i] += (2 * i + 1) * w * psi[i];
  }
  return coeffs;
}

Eigen::VectorXd interpolate(const ScalarFunction& u, const Mesh& mesh, int k, int quad_degree) {
  if (quad_degree < 0) quad_degree = 2 * k + 4;
  const DofMap d = enumerate_dofs(mesh, k);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d.total);
  for (int c = 0; c < mesh.num_cells(); ++c)
    x.segment(d.cell_offset[c], d.cell_block()) = project_cell(u, mesh, c, k, quad_degree);
  for (int e = 0; e < mesh.num_edges(); ++e)
    x.segment(d.edge_offset[e], d.edge_block()) =
        project_edge(u, mesh.vertices[mesh.edges[e].v[0]], mesh.vertices[mesh.edges[e].v[1]], k, quad_degree);
  return x;
}

Eigen::VectorXd interpolate_local(const ScalarFunction& u, const Mesh& mesh, int cell, int k,
                                  int quad_degree) {
  const Cell& c = mesh.cells[cell];
  const int nk = (k + 1) * (k + 2) / 2;
  Eigen::VectorXd x(nk + c.size() * (k + 1));
  x.head(nk) = project_cell(u, mesh, cell, k, quad_degree);
  for (int e = 0; e < c.size(); ++e) {
    const auto& ed = mesh.edges[c.edges[e]];
    x.segment(nk + e * (k + 1), k + 1) =
        project_edge(u, mesh.vertices[ed.v[0]], mesh.vertices[ed.v[1]], k, quad_degree);
  }
  return x;
}

void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
  long nnz = 0;
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) nnz += it.col() <= r;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.rows() << ' ' << a.cols() << ' ' << nnz << '\n';
  char buf[64];
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it)
      if (it.col() <= r) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r + 1, static_cast<int>(it.col()) + 1,
                      it.value());
        out << buf;
      }
}

}  // namespace wgpoly
