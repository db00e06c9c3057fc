// SPDX-License-Identifier: Apache-2.0
#include "wgpoly/solve.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace wgpoly {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::SingularSystem: return "singular";
    case SolveStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

namespace {

constexpr double kPivotRatio = 1e-12;
constexpr double kCurvatureRatio = 1e-14;

bool dense_pivots_positive(const SparseMatrix& a) {
  const Eigen::MatrixXd dense(a);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(dense);
  const Eigen::VectorXd d = ldlt.vectorD();
  const double dmax = d.maxCoeff();
  return dmax > 0.0 && d.minCoeff() > kPivotRatio * dmax;
}

class BlockJacobi {
 public:
  BlockJacobi(const SparseMatrix& a, std::vector<int> starts) : starts_(std::move(starts)) {
    if (starts_.empty())
      for (int i = 0; i <= a.rows(); ++i) starts_.push_back(i);
    const int nblocks = static_cast<int>(starts_.size()) - 1;
    factors_.resize(nblocks);
    for (int blk = 0; blk < nblocks; ++blk) {
      const int s = starts_[blk];
      const int n = starts_[blk + 1] - s;
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
      for (int r = 0; r < n; ++r)
        for (SparseMatrix::InnerIterator it(a, s + r); it; ++it)
          if (it.col() >= s && it.col() < s + n) m(r, it.col() - s) = it.value();
      factors_[blk].compute(m);
      const Eigen::VectorXd piv = factors_[blk].matrixLLT().diagonal().array().square();
      if (factors_[blk].info() != Eigen::Success || !(piv.maxCoeff() > 0.0) ||
          !(piv.minCoeff() > kPivotRatio * piv.maxCoeff())) {
        singular_block_ = blk;
        return;
      }
    }
  }

  /// A singular principal block of a positive semidefinite matrix makes the
  /// whole matrix singular.
  int singular_block() const { return singular_block_; }

  void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
    for (std::size_t blk = 0; blk + 1 < starts_.size(); ++blk) {
      const int s = starts_[blk];
      const int n = starts_[blk + 1] - s;
      z.segment(s, n) = factors_[blk].solve(r.segment(s, n));
    }
  }

 private:
  std::vector<int> starts_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  int singular_block_ = -1;
};

/// ||b - A x|| cannot drop below the rounding noise of forming A x in double
/// precision: kFloorFactor * eps * || |A| |x| ||.
double rounding_floor(const SparseMatrix& a, const Eigen::VectorXd& x) {
  constexpr double kFloorFactor = 64.0;
  double sq = 0.0;
  for (int r = 0; r < a.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) s += std::abs(it.value() * x[it.col()]);
    sq += s * s;
  }
  return kFloorFactor * std::numeric_limits<double>::epsilon() * std::sqrt(sq);
}

double max_row_sum(const SparseMatrix& a) {
  double norm = 0.0;
  for (int r = 0; r < a.outerSize(); ++r) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) s += std::abs(it.value());
    norm = std::max(norm, s);
  }
  return norm;
}

}  // namespace

SolveReport solve_spd(const SparseMatrix& a, const Eigen::VectorXd& b, const SolveOptions& options) {
  SolveReport report;
  const Eigen::Index n = a.rows();
  report.solution = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  auto true_residual = [&]() {
    const Eigen::VectorXd r = b - a * report.solution;
    return bnorm > 0.0 ? r.norm() / bnorm : r.norm();
  };
  auto singular = [&](std::string why) {
    report.status = SolveStatus::SingularSystem;
    report.detail = std::move(why);
    report.residual = true_residual();
    return report;
  };

  if (n > 0 && n <= options.dense_threshold && !dense_pivots_positive(a))
    return singular("pivoted factorization found a vanishing pivot");
  const BlockJacobi precond(a, options.block_starts);
  if (precond.singular_block() >= 0)
    return singular("diagonal block " + std::to_string(precond.singular_block()) + " is singular");
  if (bnorm == 0.0) {
    report.status = SolveStatus::Converged;
    return report;
  }

  const int max_iter =
      options.max_iter > 0 ? options.max_iter
                           : static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));
  const double anorm = max_row_sum(a);
  Eigen::VectorXd& x = report.solution;
  Eigen::VectorXd r = b;
  Eigen::VectorXd z(n), ap(n);
  precond.apply(r, z);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);

  for (int it = 1; it <= max_iter; ++it) {
    report.iterations = it;
    ap.noalias() = a * p;
    const double pap = p.dot(ap);
    if (!(pap > kCurvatureRatio * p.squaredNorm() * anorm))
      return singular("non-positive curvature direction at iteration " + std::to_string(it));
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    if (r.norm() <= options.tol * bnorm) {
      const Eigen::VectorXd true_r = b - a * x;
      report.floor = rounding_floor(a, x) / bnorm;
      if (true_r.norm() <= std::max(options.tol, report.floor) * bnorm) {
        report.status = SolveStatus::Converged;
        report.residual = true_r.norm() / bnorm;
        return report;
      }
    }
    precond.apply(r, z);
    const double rz_next = r.dot(z);
    if (!(rz_next > 0.0)) return singular("preconditioned residual lost positivity");
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  report.status = SolveStatus::MaxIterations;
  report.residual = true_residual();
  return report;
}

namespace {

/// Block elimination of the interior unknowns: S = A_ee - A_ec A_cc^-1 A_ce.
class CondensedOperator {
 public:
  CondensedOperator(const SparseMatrix& a, int n_interior, const std::vector<int>& block_starts)
      : n_interior_(n_interior), n_edge_(static_cast<int>(a.rows()) - n_interior) {
    std::vector<int> interior_starts;
    for (int s : block_starts) {
      if (s <= n_interior) interior_starts.push_back(s);
      if (s >= n_interior) edge_starts_.push_back(s - n_interior);
    }
    if (interior_starts.empty() || interior_starts.back() != n_interior)
      throw std::invalid_argument("block_starts must contain the interior/edge split");

    std::vector<Eigen::Triplet<double>> inv_entries;
    for (std::size_t blk = 0; blk + 1 < interior_starts.size(); ++blk) {
      const int s = interior_starts[blk];
      const int m = interior_starts[blk + 1] - s;
      Eigen::MatrixXd block = Eigen::MatrixXd::Zero(m, m);
      for (int r = 0; r < m; ++r)
        for (SparseMatrix::InnerIterator it(a, s + r); it; ++it)
          if (it.col() >= s && it.col() < s + m) block(r, it.col() - s) = it.value();
      const Eigen::LLT<Eigen::MatrixXd> llt(block);
      const Eigen::VectorXd piv = llt.matrixLLT().diagonal().array().square();
      if (llt.info() != Eigen::Success || !(piv.maxCoeff() > 0.0) ||
          !(piv.minCoeff() > kPivotRatio * piv.maxCoeff())) {
        singular_block_ = static_cast<int>(blk);
        return;
      }
      const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m, m));
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) inv_entries.emplace_back(s + r, s + c, inv(r, c));
    }
    interior_inv_.resize(n_interior, n_interior);
    interior_inv_.setFromTriplets(inv_entries.begin(), inv_entries.end());

    a_ce_ = a.block(0, n_interior, n_interior, n_edge_);
    a_ec_ = a.block(n_interior, 0, n_edge_, n_interior);
    const SparseMatrix a_ee = a.block(n_interior, n_interior, n_edge_, n_edge_);
    const SparseMatrix coupling = interior_inv_ * a_ce_;
    const SparseMatrix correction = a_ec_ * coupling;
    schur_ = a_ee - correction;
    const SparseMatrix schur_t = schur_.transpose();
    schur_ = 0.5 * (schur_ + schur_t);
  }

  int singular_block() const { return singular_block_; }

  /// Solves A x = b through the reduced system with relative tolerance `tol`.
  SolveReport solve(const Eigen::VectorXd& b, SolveOptions options) const {
    const Eigen::VectorXd b_c = b.head(n_interior_);
    const Eigen::VectorXd reduced_rhs = b.tail(n_edge_) - a_ec_ * (interior_inv_ * b_c);
    options.block_starts = edge_starts_;
    SolveReport inner;
    if (n_edge_ > 0) {
      inner = solve_spd(schur_, reduced_rhs, options);
    } else {
      inner.status = SolveStatus::Converged;
      inner.solution = Eigen::VectorXd::Zero(0);
    }
    SolveReport out = inner;
    out.solution = Eigen::VectorXd::Zero(n_interior_ + n_edge_);
    out.solution.tail(n_edge_) = inner.solution;
    out.solution.head(n_interior_) = interior_inv_ * (b_c - a_ce_ * inner.solution);
    return out;
  }

 private:
  int n_interior_;
  int n_edge_;
  std::vector<int> edge_starts_;
  int singular_block_ = -1;
  SparseMatrix interior_inv_, a_ce_, a_ec_, schur_;
};

}  // namespace

SolveReport solve_condensed(const SparseMatrix& a, const Eigen::VectorXd& b, int n_interior,
                            const SolveOptions& options) {
  constexpr double kCorrectionTol = 1e-3;
  constexpr double kFloorFraction = 0.05;
  constexpr int kMaxRefinements = 8;
  const int n = static_cast<int>(a.rows());
  SolveReport report;
  report.solution = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();

  const CondensedOperator condensed(a, n_interior, options.block_starts);
  if (condensed.singular_block() >= 0) {
    report.status = SolveStatus::SingularSystem;
    report.detail = "interior block " + std::to_string(condensed.singular_block()) + " is singular";
    report.residual = bnorm > 0.0 ? 1.0 : 0.0;
    return report;
  }
  if (bnorm == 0.0) {
    report.status = SolveStatus::Converged;
    return report;
  }

  SolveOptions first = options;
  if (first.max_iter <= 0)
    first.max_iter = static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(n))));
  SolveReport step = condensed.solve(b, first);
  report.iterations = step.iterations;
  report.detail = step.detail;
  report.solution = step.solution;
  if (step.status != SolveStatus::Converged) {
    report.status = step.status;
    report.residual = (b - a * report.solution).norm() / bnorm;
    return report;
  }

  // The explicitly formed Schur complement carries rounding from the interior
  // inverses; refine against the assembled matrix until the residual stalls.
  Eigen::VectorXd r = b - a * report.solution;
  SolveOptions correction = first;
  correction.tol = kCorrectionTol;
  const auto settled = [&] {
    return r.norm() <= options.tol * bnorm ||
           r.norm() <= kFloorFraction * rounding_floor(a, report.solution);
  };
  for (int pass = 0; pass < kMaxRefinements && !settled(); ++pass) {
    step = condensed.solve(r, correction);
    report.iterations += step.iterations;
    if (step.status == SolveStatus::SingularSystem) break;
    const Eigen::VectorXd candidate = report.solution + step.solution;
    const Eigen::VectorXd r_next = b - a * candidate;
    if (!(r_next.norm() < r.norm())) break;
    const bool stalled = r_next.norm() > 0.5 * r.norm();
    report.solution = candidate;
    r = r_next;
    if (stalled) break;
  }

  report.residual = r.norm() / bnorm;
  report.floor = rounding_floor(a, report.solution) / bnorm;
  report.status = report.residual <= std::max(options.tol, report.floor) ? SolveStatus::Converged
                                                                          : SolveStatus::MaxIterations;
  if (report.status != SolveStatus::Converged) report.detail = "refined residual stayed above tolerance";
  return report;
}

bool certify_spd(const SparseMatrix& a, int probes, const std::vector<int>& block_starts,
                 int dense_threshold) {
  const Eigen::Index n = a.rows();
  if (n == 0) return false;
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (int p = 0; p < probes; ++p) {
    for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(rng);
    if (!(x.dot(a * x) > 0.0)) return false;
  }
  if (n <= dense_threshold) return dense_pivots_positive(a);
  return BlockJacobi(a, block_starts).singular_block() < 0;
}

}  // namespace wgpoly
