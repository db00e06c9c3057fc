// SPDX-License-Identifier: Apache-2.0
#include "wgpoly/weakgrad.hpp"

#include <string>

#include "wgpoly/error.hpp"
#include "wgpoly/quadrature.hpp"

namespace wgpoly {

int default_weak_degree(int n_edges, int k) {
  if (n_edges == 3) return k + 1;
  return n_edges + k - 1;
}

Eigen::VectorXd LocalWeakGradient::solve_gram(const Eigen::VectorXd& moments) const {
  const Eigen::Index n = scalar_gram_factor.rows();
  Eigen::VectorXd c(2 * n);
  c.head(n) = scalar_gram_factor.solve(moments.head(n));
  c.tail(n) = scalar_gram_factor.solve(moments.tail(n));
  return c;
}

Point LocalWeakGradient::eval_vector(const Eigen::VectorXd& coeffs, Point p) const {
  const auto psi = basis.eval(p);
  const Eigen::Index n = static_cast<Eigen::Index>(psi.size());
  const Eigen::Map<const Eigen::VectorXd> v(psi.data(), n);
  return {coeffs.head(n).dot(v), coeffs.tail(n).dot(v)};
}

LocalWeakGradient build_local(const Mesh& mesh, int cell, int k, int j) {
  if (k < 1) throw Error(ErrorCode::Config, "k must be at least 1");
  if (j < 0 || j > kMaxDegree)
    throw Error(ErrorCode::Config, "weak gradient degree " + std::to_string(j) + " unsupported");

  LocalWeakGradient op;
  op.cell = cell;
  op.k = k;
  op.j = j;
  const Cell& c = mesh.cells[cell];
  op.layout = {k, c.size()};
  op.loop = mesh.cell_points(cell);
  op.geometry = mesh.cell_geometry(cell);
  for (int e = 0; e < c.size(); ++e) {
    const auto& ed = mesh.edges[c.edges[e]];
    op.edge_ends.push_back({mesh.vertices[ed.v[0]], mesh.vertices[ed.v[1]]});
  }

  const int quad_degree = 2 * j;
  const QuadratureRule rule = cell_rule(mesh, cell, quad_degree);
  BasisTable psi;
  op.basis = OrthonormalBasis(j, op.geometry.centroid, op.geometry.diameter, rule.points, rule.weights, &psi);
  const CellBasis pk = op.interior_basis();
  const int ns = op.basis.size();
  const int nq = 2 * ns;
  const int nk = pk.size();
  const Eigen::Index np = rule.size();

  Eigen::MatrixXd phi_k(np, nk);
  for (Eigen::Index q = 0; q < np; ++q) {
    const auto row = pk.eval(rule.points[q]);
    phi_k.row(q) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), nk);
  }
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), np);
  const Eigen::MatrixXd weighted = w.asDiagonal() * psi.values;

  Eigen::MatrixXd gs = psi.values.transpose() * weighted;
  gs = (0.5 * (gs + gs.transpose())).eval();
  op.rhs = Eigen::MatrixXd::Zero(nq, op.layout.size());
  const Eigen::MatrixXd weighted_k = w.asDiagonal() * phi_k;
  op.rhs.topLeftCorner(ns, nk).noalias() = -psi.dx.transpose() * weighted_k;
  op.rhs.bottomLeftCorner(ns, nk).noalias() = -psi.dy.transpose() * weighted_k;

  Eigen::VectorXd values(ns), psi_e(k + 1);
  const int n = c.size();
  for (int e = 0; e < n; ++e) {
    const EdgeBasis eb(k, op.edge_ends[e][0], op.edge_ends[e][1]);
    const Point normal = op.geometry.edges[e].normal;
    const QuadratureRule er = edge_rule(op.loop[e], op.loop[(e + 1) % n], quad_degree);
    const int col = op.layout.edge_offset(e);
    for (int q = 0; q < er.size(); ++q) {
      const double t = c.sign[e] > 0 ? er.params[q] : 1.0 - er.params[q];
      eb.eval(t, {psi_e.data(), static_cast<std::size_t>(k + 1)});
      op.basis.eval(er.points[q], {values.data(), static_cast<std::size_t>(ns)});
      op.rhs.block(0, col, ns, k + 1).noalias() += (er.weights[q] * normal.x) * values * psi_e.transpose();
      op.rhs.block(ns, col, ns, k + 1).noalias() += (er.weights[q] * normal.y) * values * psi_e.transpose();
    }
  }

  op.scalar_gram_factor.compute(gs);
  const Eigen::VectorXd pivots = op.scalar_gram_factor.matrixLLT().diagonal().array().square();
  if (op.scalar_gram_factor.info() != Eigen::Success || !(pivots.minCoeff() >= 1e-13 * pivots.maxCoeff()))
    throw Error(ErrorCode::GramSingular,
                "cell " + std::to_string(cell) + ": Gram matrix of [P_" + std::to_string(j) +
                    "]^2 is numerically singular");

  op.gram = Eigen::MatrixXd::Zero(nq, nq);
  op.gram.topLeftCorner(ns, ns) = gs;
  op.gram.bottomRightCorner(ns, ns) = gs;
  // A_T = (L^-1 B)^T (L^-1 B) with G = L L^T.
  const auto lower = op.scalar_gram_factor.matrixL();
  Eigen::MatrixXd half(nq, op.layout.size());
  half.topRows(ns) = lower.solve(op.rhs.topRows(ns));
  half.bottomRows(ns) = lower.solve(op.rhs.bottomRows(ns));
  op.op.resize(nq, op.layout.size());
  op.op.topRows(ns) = op.scalar_gram_factor.matrixU().solve(half.topRows(ns));
  op.op.bottomRows(ns) = op.scalar_gram_factor.matrixU().solve(half.bottomRows(ns));
  const Eigen::MatrixXd a = half.transpose() * half;
  op.stiffness = 0.5 * (a + a.transpose());
  return op;
}

Eigen::VectorXd apply_weak_gradient(const LocalWeakGradient& op, std::span<const double> local) {
  if (static_cast<int>(local.size()) != op.layout.size())
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(op.layout.size()) + " local coefficients, got " +
                    std::to_string(local.size()));
  return op.op * Eigen::Map<const Eigen::VectorXd>(local.data(), op.layout.size());
}

Eigen::VectorXd weak_gradient_of_function(const LocalWeakGradient& op,
                                          const std::function<double(Point)>& phi) {
  const int ns = op.basis.size();
  const int quad_degree = 2 * op.j + 2;
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(2 * ns);
  Eigen::VectorXd values(ns), dx(ns), dy(ns);
  const auto span = [](Eigen::VectorXd& v) { return std::span<double>(v.data(), static_cast<std::size_t>(v.size())); };
  const QuadratureRule rule = polygon_rule(op.loop, quad_degree);
  for (int q = 0; q < rule.size(); ++q) {
    op.basis.eval_gradient(rule.points[q], span(values), span(dx), span(dy));
    const double f = rule.weights[q] * phi(rule.points[q]);
    moments.head(ns) -= f * dx;
    moments.tail(ns) -= f * dy;
  }
  const int n = op.layout.n_edges;
  for (int e = 0; e < n; ++e) {
    const Point normal = op.geometry.edges[e].normal;
    const QuadratureRule er = edge_rule(op.loop[e], op.loop[(e + 1) % n], quad_degree);
    for (int q = 0; q < er.size(); ++q) {
      op.basis.eval(er.points[q], span(values));
      const double f = er.weights[q] * phi(er.points[q]);
      moments.head(ns) += (f * normal.x) * values;
      moments.tail(ns) += (f * normal.y) * values;
    }
  }
  return op.solve_gram(moments);
}

Eigen::VectorXd project_vector_field(const LocalWeakGradient& op,
                                     const std::function<Point(Point)>& field, int quad_degree) {
  const int ns = op.basis.size();
  Eigen::VectorXd moments = Eigen::VectorXd::Zero(2 * ns);
  Eigen::VectorXd phi(ns);
  const QuadratureRule rule = polygon_rule(op.loop, quad_degree);
  for (int q = 0; q < rule.size(); ++q) {
    op.basis.eval(rule.points[q], {phi.data(), static_cast<std::size_t>(ns)});
    const Point f = field(rule.points[q]);
    moments.head(ns) += rule.weights[q] * f.x * phi;
    moments.tail(ns) += rule.weights[q] * f.y * phi;
  }
  return op.solve_gram(moments);
}

double vector_norm_squared(const LocalWeakGradient& op, const Eigen::VectorXd& coeffs) {
  return coeffs.dot(op.gram * coeffs);
}

}  // namespace wgpoly
