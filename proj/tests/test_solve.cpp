// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "wgpoly/analysis.hpp"
#include "wgpoly/solve.hpp"

using namespace wgpoly;

namespace {

double true_residual(const SparseMatrix& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x) {
  return (b - a * x).norm() / b.norm();
}

GlobalSystem sin_system(const Mesh& m, int k, WeakDegreePolicy policy) {
  return assemble(m, k, policy, exact_solution("sin").f);
}

}  // namespace

TEST_CASE("identity converges at once") {
  SparseMatrix id(50, 50);
  id.setIdentity();
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(50, 1.0, 2.0);
  const SolveReport r = solve_spd(id, b);
  CHECK(r.status == SolveStatus::Converged);
  CHECK(r.iterations <= 1);
  CHECK((r.solution - b).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("zero right-hand side") {
  const GlobalSystem sys = sin_system(build_triangle_grid(2), 1, {2});
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sys.rhs.size());
  SolveOptions opt;
  opt.block_starts = sys.block_starts;
  for (const SolveReport& r : {solve_spd(sys.matrix, zero), solve_condensed(sys.matrix, zero, sys.interior_size, opt)}) {
    CHECK(r.status == SolveStatus::Converged);
    CHECK(r.solution.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("singular systems are reported, not thrown") {
  for (int k = 1; k <= 3; ++k) {
    CAPTURE(k);
    const GlobalSystem sys = sin_system(build_triangle_grid(3), k, {k});
    SolveOptions opt;
    opt.block_starts = sys.block_starts;
    CHECK(solve_spd(sys.matrix, sys.rhs, opt).status == SolveStatus::SingularSystem);
    CHECK_FALSE(certify_spd(sys.matrix, 8, sys.block_starts));
  }
  SparseMatrix zero(1, 1);
  zero.insert(0, 0) = 0.0;
  CHECK_FALSE(certify_spd(zero, 4));
  CHECK(solve_spd(zero, Eigen::VectorXd::Ones(1)).status == SolveStatus::SingularSystem);
}

TEST_CASE("admissible systems converge within the residual contract") {
  const Mesh m = build_triangle_grid(4);
  const GlobalSystem sys = sin_system(m, 1, {2});
  SolveOptions opt;
  opt.block_starts = sys.block_starts;
  const SolveReport r = solve_spd(sys.matrix, sys.rhs, opt);
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(r.floor > 0.0);
  CHECK(r.residual <= std::max(opt.tol, r.floor));
  CHECK(std::abs(r.residual - true_residual(sys.matrix, sys.rhs, r.solution)) <= 1e-14);
  CHECK(certify_spd(sys.matrix, 8, sys.block_starts));
}

TEST_CASE("certificates") {
  CHECK(certify_spd(sin_system(build_triangle_grid(2), 2, {3}).matrix, 8));
  CHECK_FALSE(certify_spd(sin_system(build_triangle_grid(2), 2, {2}).matrix, 8));
  // Above the dense threshold the block fallback still sees the kernel.
  const GlobalSystem big = sin_system(build_triangle_grid(3), 1, {1});
  CHECK_FALSE(certify_spd(big.matrix, 8, big.block_starts, 10));
  const GlobalSystem good = sin_system(build_triangle_grid(3), 1, {2});
  CHECK(certify_spd(good.matrix, 8, good.block_starts, 10));
}

TEST_CASE("condensed and full solves agree") {
  for (const Mesh& m : {build_triangle_grid(4), build_polygon_grid(3)}) {
    for (int k = 1; k <= 2; ++k) {
      const GlobalSystem sys = sin_system(m, k, {});
      SolveOptions opt;
      opt.block_starts = sys.block_starts;
      const SolveReport full = solve_spd(sys.matrix, sys.rhs, opt);
      const SolveReport cond = solve_condensed(sys.matrix, sys.rhs, sys.interior_size, opt);
      REQUIRE(full.status == SolveStatus::Converged);
      REQUIRE(cond.status == SolveStatus::Converged);
      CHECK(cond.residual <= std::max(opt.tol, cond.floor));
      CHECK(std::abs(cond.residual - true_residual(sys.matrix, sys.rhs, cond.solution)) <= 1e-14);
      CHECK((full.solution - cond.solution).norm() <= 1e-9 * full.solution.norm());
    }
  }
}

TEST_CASE("condensation reports a singular interior block") {
  SparseMatrix a(3, 3);
  a.insert(0, 0) = 0.0;
  a.insert(1, 1) = 1.0;
  a.insert(2, 2) = 1.0;
  SolveOptions opt;
  opt.block_starts = {0, 1, 2, 3};
  CHECK(solve_condensed(a, Eigen::VectorXd::Ones(3), 1, opt).status == SolveStatus::SingularSystem);
}

TEST_CASE("iteration cap") {
  const GlobalSystem sys = sin_system(build_triangle_grid(5), 2, {3});
  SolveOptions opt;
  opt.max_iter = 3;
  opt.dense_threshold = 0;
  const SolveReport r = solve_spd(sys.matrix, sys.rhs, opt);
  CHECK(r.status == SolveStatus::MaxIterations);
  CHECK(r.iterations == 3);
  CHECK(std::string(to_string(r.status)) == "max_iterations");
}

TEST_CASE("solves are deterministic") {
  const GlobalSystem sys = sin_system(build_polygon_grid(3), 2, {});
  SolveOptions opt;
  opt.block_starts = sys.block_starts;
  const SolveReport a = solve_condensed(sys.matrix, sys.rhs, sys.interior_size, opt);
  const SolveReport b = solve_condensed(sys.matrix, sys.rhs, sys.interior_size, opt);
  CHECK(a.iterations == b.iterations);
  CHECK(a.residual == b.residual);
  CHECK((a.solution - b.solution).cwiseAbs().maxCoeff() == 0.0);
}
