// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wgpoly/assembly.hpp"
#include "wgpoly/mesh.hpp"

namespace wgpoly {

/// Manufactured solution of -Laplace(u) = f with u = 0 on the unit square
/// boundary.
struct ExactSolution {
  std::string id;
  ScalarFunction u;
  ScalarFunction f;
  VectorFunction grad;
};

/// Registry lookup; `sin` is u = sin(pi x) sin(pi y). Throws a config error
/// for unknown ids.
const ExactSolution& exact_solution(std::string_view id);
std::vector<std::string> exact_solution_ids();

struct ErrorReport {
  double l2_error = 0.0;              // ||u0 - Q0 u||
  double energy_error = 0.0;          // |||Q_h u - u_h|||
  double gradient_projection_error = 0.0;  // (sum_T ||QQ_h grad u - grad_w u_h||_T^2)^(1/2)
};

/// `solution` is in the full DOF numbering. Integrals use degree 2j + 2.
double l2_error(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                const ScalarFunction& u, const WeakDegreePolicy& policy);
/// |||Q_h u - u_h|||, the energy error reported in the convergence tables.
double energy_error(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                    const ScalarFunction& u, const WeakDegreePolicy& policy);
/// Energy error measured against the L2 projection of the exact gradient
/// onto [P_j(T)]^2 instead of the weak gradient of Q_h u.
double gradient_projection_error(const Mesh& mesh, const DofMap& dofs,
                                 const Eigen::VectorXd& solution, const VectorFunction& grad_u,
                                 const WeakDegreePolicy& policy);
/// All three errors with one local operator build per cell.
ErrorReport compute_errors(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& solution,
                           const ExactSolution& exact, const WeakDegreePolicy& policy);

/// |||v||| = (sum_T ||grad_w v||_T^2)^(1/2).
double energy_norm(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& v,
                   const WeakDegreePolicy& policy);

struct H1Parts {
  double gradient = 0.0;  // sum_T ||grad v0||_T^2
  double jump = 0.0;      // sum_T h_T^-1 ||v0 - vb||_dT^2

  double norm() const;
};

/// Squared pieces of the discrete H1 norm.
H1Parts discrete_h1_parts(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& v);

/// |||v||| / ||v||_{1,h}. Throws `DegenerateInput` when ||v||_{1,h} <= 1e-14.
double h1_norm_equivalence_probe(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& v,
                                 const WeakDegreePolicy& policy);

}  // namespace wgpoly
