// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgpoly/assembly.hpp"

namespace wgpoly {

enum class SolveStatus { Converged, SingularSystem, MaxIterations };

const char* to_string(SolveStatus status);

struct SolveOptions {
  double tol = 1e-12;
  /// 0 selects 50 * sqrt(N).
  int max_iter = 0;
  /// Block-Jacobi blocks as start offsets plus a final sentinel; empty means
  /// point Jacobi.
  std::vector<int> block_starts;
  /// Systems up to this size are first checked by a pivoted dense
  /// factorization.
  int dense_threshold = 2000;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  double residual = 0.0;  // ||b - A x|| / ||b||, recomputed at exit
  /// Relative residual attainable in double precision at the final iterate
  /// (64 eps || |A| |x| || / ||b||); set once the recurrence reaches `tol`.
  double floor = 0.0;
  Eigen::VectorXd solution;
  std::string detail;
};

/// Block-Jacobi preconditioned conjugate gradients. Iterates until the
/// recurrence residual reaches `tol`; converged then means the recomputed
/// residual is within max(tol, floor). Singularity is reported
/// in the status (never thrown) when a dense pivot or a preconditioner block
/// pivot falls below 1e-12 of the largest, or when p^T A p falls below
/// 1e-14 ||p||^2 ||A||.
SolveReport solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, const SolveOptions& options = {});

/// Eliminates the leading `n_interior` unknowns, whose diagonal block must be
/// block diagonal along `options.block_starts`, and runs `solve_spd` on the
/// Schur complement of the remaining blocks, then refines the result against
/// `a` itself until the residual reaches `tol`, sinks well below the
/// rounding floor, or stops improving. The report refers to the full system;
/// `iterations` totals the reduced CG iterations of every pass. A singular
/// interior block is reported as `SingularSystem`.
SolveReport solve_condensed(const SparseMatrix& a, const Eigen::VectorXd& b, int n_interior,
                            const SolveOptions& options = {});

/// Positive Rayleigh quotients for `probes` random vectors and, up to
/// `dense_threshold` unknowns, all pivots of a pivoted LDL^T above 1e-12
/// times the largest. Larger systems fall back to factoring the diagonal
/// blocks given in `block_starts`.
bool certify_spd(const SparseMatrix& a, int probes, const std::vector<int>& block_starts = {},
                 int dense_threshold = 3000);

}  // namespace wgpoly
