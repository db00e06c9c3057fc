// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "wgpoly/analysis.hpp"
#include "wgpoly/error.hpp"
#include "wgpoly/solve.hpp"

using namespace wgpoly;

TEST_CASE("exact solution registry") {
  const ExactSolution& s = exact_solution("sin");
  const Point p{0.3, 0.7};
  CHECK(s.u(p) == doctest::Approx(std::sin(M_PI * 0.3) * std::sin(M_PI * 0.7)));
  CHECK(s.f(p) == doctest::Approx(2 * M_PI * M_PI * s.u(p)));
  CHECK(s.grad(p).x == doctest::Approx(M_PI * std::cos(M_PI * 0.3) * std::sin(M_PI * 0.7)));

  // f = -Laplace(u) by a five-point stencil.
  for (const std::string& id : exact_solution_ids()) {
    CAPTURE(id);
    const ExactSolution& e = exact_solution(id);
    const double h = 1e-4;
    const Point q{0.41, 0.23};
    const double lap = (e.u({q.x + h, q.y}) + e.u({q.x - h, q.y}) + e.u({q.x, q.y + h}) +
                        e.u({q.x, q.y - h}) - 4 * e.u(q)) / (h * h);
    CHECK(-lap == doctest::Approx(e.f(q)).epsilon(1e-5));
    CHECK(e.u({0.0, 0.4}) == doctest::Approx(0.0).scale(1.0));
    CHECK(e.u({0.6, 1.0}) == doctest::Approx(0.0).scale(1.0));
  }
  try {
    exact_solution("nope");
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
}

TEST_CASE("the interpolant has zero discrete error") {
  // The bubble x(1-x)y(1-y) lies in P_4, so every projection is exact.
  const ExactSolution& s = exact_solution("bubble");
  for (const Mesh& m : {build_triangle_grid(3), build_polygon_grid(2)}) {
    const DofMap d = enumerate_dofs(m, 4);
    const Eigen::VectorXd q = interpolate(s.u, m, 4);
    const ErrorReport r = compute_errors(m, d, q, s, {});
    CHECK(r.l2_error <= 1e-15);
    CHECK(r.energy_error <= 1e-13);
    CHECK(r.gradient_projection_error <= 1e-11);
    CHECK(l2_error(m, d, q, s.u, {}) == r.l2_error);
    CHECK(energy_error(m, d, q, s.u, {}) == r.energy_error);
    CHECK(gradient_projection_error(m, d, q, s.grad, {}) == doctest::Approx(r.gradient_projection_error).scale(1e-11));
  }
}

TEST_CASE("weak gradient of a projected polynomial is its gradient") {
  // Global form of the commuting property on P_k, where QQ_h grad u = grad u.
  auto u = [](Point p) { return 1.0 + p.x - 2.0 * p.y + p.x * p.y - 0.5 * p.x * p.x; };
  auto grad = [](Point p) { return Point{1.0 + p.y - p.x, -2.0 + p.x}; };
  for (const Mesh& m : {build_triangle_grid(3), build_polygon_grid(2)}) {
    const DofMap d = enumerate_dofs(m, 2);
    const Eigen::VectorXd q = interpolate(u, m, 2);
    CHECK(gradient_projection_error(m, d, q, grad, {}) <= 1e-11);
    // and agrees with the energy norm of the same function
    const double norm = energy_norm(m, d, q, {});
    // int (1 + y - x)^2 = 7/6 and int (x - 2)^2 = 7/3 over the unit square
    const double exact = std::sqrt(7.0 / 6 + 7.0 / 3);
    CHECK(norm == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("projection error of the gradient converges at order k") {
  const ExactSolution& s = exact_solution("sin");
  for (int k = 1; k <= 2; ++k) {
    std::vector<double> errs;
    for (int level = 4; level <= 6; ++level) {
      const Mesh m = build_triangle_grid(level);
      const DofMap d = enumerate_dofs(m, k);
      errs.push_back(gradient_projection_error(m, d, interpolate(s.u, m, k), s.grad, {}));
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
      CAPTURE(k);
      CHECK(std::log2(errs[i - 1] / errs[i]) == doctest::Approx(k).epsilon(0.1 / k));
    }
  }
}

TEST_CASE("discrete H1 norm") {
  const Mesh m = build_polygon_grid(2);
  const DofMap d = enumerate_dofs(m, 2);

  SUBCASE("continuous polynomials have no jump") {
    auto u = [](Point p) { return p.x * p.x - p.x * p.y + 0.3; };
    const H1Parts parts = discrete_h1_parts(m, d, interpolate(u, m, 2));
    CHECK(parts.jump <= 1e-28);
    // int (2x - y)^2 + x^2 over the unit square
    CHECK(parts.gradient == doctest::Approx(4.0 / 3 - 1.0 + 1.0 / 3 + 1.0 / 3).epsilon(1e-12));
    CHECK(parts.norm() == doctest::Approx(std::sqrt(parts.gradient)));
  }

  SUBCASE("a cell bump has a jump") {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d.total);
    v[d.cell_offset[3]] = 1.0;
    const H1Parts parts = discrete_h1_parts(m, d, v);
    CHECK(parts.gradient == 0.0);
    const CellGeometry g = m.cell_geometry(3);
    double perimeter = 0.0;
    for (const EdgeGeometry& e : g.edges) perimeter += e.length;
    CHECK(parts.jump == doctest::Approx(perimeter / g.diameter));
  }

  SUBCASE("zero input is rejected") {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d.total);
    try {
      h1_norm_equivalence_probe(m, d, zero, {});
      FAIL("expected DegenerateInput");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateInput);
    }
  }
}

TEST_CASE("norm-equivalence ratio is stable under refinement") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n01;
  const ExactSolution& s = exact_solution("sin");
  for (const bool polygons : {false, true}) {
    std::vector<double> smooth, rough;
    for (int level = 3; level <= 6; ++level) {
      const Mesh m = polygons ? build_polygon_grid(level) : build_triangle_grid(level);
      const DofMap d = enumerate_dofs(m, 1);
      smooth.push_back(h1_norm_equivalence_probe(m, d, interpolate(s.u, m, 1), {}));
      Eigen::VectorXd v(d.total);
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = d.is_boundary[i] ? 0.0 : n01(rng);
      rough.push_back(h1_norm_equivalence_probe(m, d, v, {}));
    }
    for (const auto* series : {&smooth, &rough}) {
      const auto [lo, hi] = std::minmax_element(series->begin(), series->end());
      CAPTURE(polygons);
      CHECK(*lo > 0.0);
      CHECK(*hi / *lo <= 2.0);
    }
  }
}

TEST_CASE("discrete solution errors on coarse triangle levels") {
  // Solving on levels 3..5 with k = 1, j = 2 gives second-order L2 and
  // first-order energy decay once the mesh resolves the solution.
  const ExactSolution& s = exact_solution("sin");
  std::vector<double> l2, energy;
  for (int level = 3; level <= 5; ++level) {
    const Mesh m = build_triangle_grid(level);
    const GlobalSystem sys = assemble(m, 1, {2}, s.f);
    SolveOptions opt;
    opt.block_starts = sys.block_starts;
    const SolveReport r = solve_spd(sys.matrix, sys.rhs, opt);
    REQUIRE(r.status == SolveStatus::Converged);
    const ErrorReport e = compute_errors(m, sys.dofs, sys.expand(r.solution), s, {2});
    l2.push_back(e.l2_error);
    energy.push_back(e.energy_error);
  }
  CHECK(std::log2(l2[1] / l2[2]) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(energy[1] / energy[2]) == doctest::Approx(1.0).epsilon(0.05));
}
