// SPDX-License-Identifier: Apache-2.0
#include "wgpoly/analysis.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "wgpoly/basis.hpp"
#include "wgpoly/error.hpp"
#include "wgpoly/quadrature.hpp"
#include "wgpoly/weakgrad.hpp"

namespace wgpoly {

namespace {

using std::numbers::pi;

/// Kahan-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double y = v - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

const std::map<std::string, ExactSolution, std::less<>>& registry() {
  static const std::map<std::string, ExactSolution, std::less<>> r = [] {
    std::map<std::string, ExactSolution, std::less<>> m;
    m["sin"] = {"sin",
                [](Point p) { return std::sin(pi * p.x) * std::sin(pi * p.y); },
                [](Point p) { return 2.0 * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y); },
                [](Point p) {
                  return Point{pi * std::cos(pi * p.x) * std::sin(pi * p.y),
                               pi * std::sin(pi * p.x) * std::cos(pi * p.y)};
                }};
    // x(1-x)y(1-y): polynomial, useful for exactness checks at k >= 4.
    m["bubble"] = {"bubble",
                   [](Point p) { return p.x * (1 - p.x) * p.y * (1 - p.y); },
                   [](Point p) { return 2.0 * (p.x * (1 - p.x) + p.y * (1 - p.y)); },
                   [](Point p) {
                     return Point{(1 - 2 * p.x) * p.y * (1 - p.y), (1 - 2 * p.y) * p.x * (1 - p.x)};
                   }};
    return m;
  }();
  return r;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

double cell_l2_error_sq(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                        const ScalarFunction& u, int cell, int quad_degree) {
  const int k = dofs.k;
  const Eigen::VectorXd diff =
      solution.segment(dofs.cell_offset[cell], dofs.cell_block()) - project_cell(u, mesh, cell, k, quad_degree);
  const CellGeometry g = mesh.cell_geometry(cell);
  const CellBasis pk(k, g.centroid, g.diameter);
  const QuadratureRule rule = cell_rule(mesh, cell, quad_degree);
  Eigen::VectorXd phi(pk.size());
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    pk.eval(rule.points[q], {phi.data(), static_cast<std::size_t>(pk.size())});
    const double e = phi.dot(diff);
    s += rule.weights[q] * e * e;
  }
  return s;
}

double cell_energy_error_sq(const LocalWeakGradient& op, const Eigen::VectorXd& local,
                            const VectorFunction& grad_u) {
  const Eigen::VectorXd diff =
      project_vector_field(op, grad_u, 2 * op.j + 2) - apply_weak_gradient(op, {local.data(), static_cast<std::size_t>(local.size())});
  return vector_norm_squared(op, diff);
}

double cell_interpolant_error_sq(const Mesh& mesh, const DofMap& dofs, const LocalWeakGradient& op,
                                 const Eigen::VectorXd& local, const ScalarFunction& u) {
  const Eigen::VectorXd diff = interpolate_local(u, mesh, op.cell, dofs.k, 2 * op.j + 2) - local;
  return vector_norm_squared(op, apply_weak_gradient(op, {diff.data(), static_cast<std::size_t>(diff.size())}));
}

}  // namespace

const ExactSolution& exact_solution(std::string_view id) {
  const auto& r = registry();
  auto it = r.find(id);
  if (it == r.end()) throw Error(ErrorCode::Config, "unknown exact solution '" + std::string(id) + "'");
  return it->second;
}

std::vector<std::string> exact_solution_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, _] : registry()) ids.push_back(id);
  return ids;
}

double l2_error(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                const ScalarFunction& u, const WeakDegreePolicy& policy) {
  CompensatedSum sum;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const int j = policy.degree_for(mesh.cells[c].size(), dofs.k);
    sum.add(cell_l2_error_sq(mesh, dofs, solution, u, c, 2 * j + 2));
  }
  return std::sqrt(sum.value());
}

double energy_error(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                    const ScalarFunction& u, const WeakDegreePolicy& policy) {
  CompensatedSum sum;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const int j = policy.degree_for(mesh.cells[c].size(), dofs.k);
    const LocalWeakGradient op = build_local(mesh, c, dofs.k, j);
    sum.add(cell_interpolant_error_sq(mesh, dofs, op, gather(solution, dofs.local_dofs(mesh, c)), u));
  }
  return std::sqrt(sum.value());
}

double gradient_projection_error(const Mesh& mesh, const DofMap& dofs,
                                 const Eigen::VectorXd& solution, const VectorFunction& grad_u,
                                 const WeakDegreePolicy& policy) {
  CompensatedSum sum;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const int j = policy.degree_for(mesh.cells[c].size(), dofs.k);
    const LocalWeakGradient op = build_local(mesh, c, dofs.k, j);
    sum.add(cell_energy_error_sq(op, gather(solution, dofs.local_dofs(mesh, c)), grad_u));
  }
  return std::sqrt(sum.value());
}

ErrorReport compute_errors(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                           const ExactSolution& exact, const WeakDegreePolicy& policy) {
  CompensatedSum l2, energy, projected;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const int j = policy.degree_for(mesh.cells[c].size(), dofs.k);
    const LocalWeakGradient op = build_local(mesh, c, dofs.k, j);
    const Eigen::VectorXd local = gather(solution, dofs.local_dofs(mesh, c));
    l2.add(cell_l2_error_sq(mesh, dofs, solution, exact.u, c, 2 * j + 2));
    energy.add(cell_interpolant_error_sq(mesh, dofs, op, local, exact.u));
    projected.add(cell_energy_error_sq(op, local, exact.grad));
  }
  return {std::sqrt(l2.value()), std::sqrt(energy.value()), std::sqrt(projected.value())};
}

double energy_norm(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& v,
                   const WeakDegreePolicy& policy) {
  CompensatedSum sum;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const int j = policy.degree_for(mesh.cells[c].size(), dofs.k);
    const LocalWeakGradient op = build_local(mesh, c, dofs.k, j);
    const Eigen::VectorXd local = gather(v, dofs.local_dofs(mesh, c));
    sum.add(vector_norm_squared(op, apply_weak_gradient(op, {local.data(), static_cast<std::size_t>(local.size())})));
  }
  return std::sqrt(sum.value());
}

double H1Parts::norm() const { return std::sqrt(gradient + jump); }

H1Parts discrete_h1_parts(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& v) {
  const int k = dofs.k;
  CompensatedSum grad_sum, jump_sum;
  std::vector<double> psi(k + 1);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = mesh.cell_geometry(c);
    const CellBasis pk(k, g.centroid, g.diameter);
    const int n = pk.size();
    const Eigen::VectorXd v0 = v.segment(dofs.cell_offset[c], n);
    Eigen::VectorXd phi(n), dx(n), dy(n);
    const QuadratureRule rule = cell_rule(mesh, c, 2 * k);
    double gs = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      pk.eval_gradient(rule.points[q], {dx.data(), static_cast<std::size_t>(n)},
                       {dy.data(), static_cast<std::size_t>(n)});
      const double gx = dx.dot(v0), gy = dy.dot(v0);
      gs += rule.weights[q] * (gx * gx + gy * gy);
    }
    grad_sum.add(gs);

    const Cell& cell = mesh.cells[c];
    const auto loop = mesh.cell_points(c);
    double js = 0.0;
    for (int e = 0; e < cell.size(); ++e) {
      const auto& ed = mesh.edges[cell.edges[e]];
      const EdgeBasis eb(k, mesh.vertices[ed.v[0]], mesh.vertices[ed.v[1]]);
      const QuadratureRule er = edge_rule(loop[e], loop[(e + 1) % cell.size()], 2 * k);
      const Eigen::VectorXd vb = v.segment(dofs.edge_offset[cell.edges[e]], k + 1);
      for (int q = 0; q < er.size(); ++q) {
        pk.eval(er.points[q], {phi.data(), static_cast<std::size_t>(n)});
        eb.eval(cell.sign[e] > 0 ? er.params[q] : 1.0 - er.params[q], psi);
        const double d = phi.dot(v0) - Eigen::Map<const Eigen::VectorXd>(psi.data(), k + 1).dot(vb);
        js += er.weights[q] * d * d;
      }
    }
    jump_sum.add(js / g.diameter);
  }
  return {grad_sum.value(), jump_sum.value()};
}

double h1_norm_equivalence_probe(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& v,
                                 const WeakDegreePolicy& policy) {
  const double h1 = discrete_h1_parts(mesh, dofs, v).norm();
  if (!(h1 > 1e-14))
    throw Error(ErrorCode::DegenerateInput, "discrete H1 norm vanishes (constant or zero input)");
  return energy_norm(mesh, dofs, v, policy) / h1;
}

}  // namespace wgpoly
