// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "wgpoly/assembly.hpp"
#include "wgpoly/error.hpp"
#include "wgpoly/weakgrad.hpp"

using namespace wgpoly;

namespace {

// Points strictly inside the cell: blends of the centroid and each vertex.
std::vector<Point> sample_points(const LocalWeakGradient& op) {
  std::vector<Point> pts{op.geometry.centroid};
  for (Point v : op.loop) pts.push_back(op.geometry.centroid + 0.7 * (v - op.geometry.centroid));
  return pts;
}

int kernel_dimension(const Eigen::MatrixXd& a) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const double cut = 1e-12 * a.trace();
  int n = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) n += es.eigenvalues()[i] < cut;
  return n;
}

// Global polynomials x^a y^b of total degree <= d, with their gradients.
struct Monomial {
  int a, b;
  double operator()(Point p) const { return std::pow(p.x, a) * std::pow(p.y, b); }
  Point grad(Point p) const {
    return {a ? a * std::pow(p.x, a - 1) * std::pow(p.y, b) : 0.0,
            b ? b * std::pow(p.x, a) * std::pow(p.y, b - 1) : 0.0};
  }
};

std::vector<Monomial> monomials_up_to(int d) {
  std::vector<Monomial> out;
  for (int t = 0; t <= d; ++t)
    for (int a = t; a >= 0; --a) out.push_back({a, t - a});
  return out;
}

}  // namespace

TEST_CASE("default weak degree") {
  CHECK(default_weak_degree(3, 1) == 2);
  CHECK(default_weak_degree(12, 1) == 12);
  CHECK(default_weak_degree(3, 4) == 5);
  CHECK(default_weak_degree(6, 2) == 7);
  CHECK(default_weak_degree(4, 1) == 4);
}

TEST_CASE("local layout") {
  const Mesh m = build_polygon_grid(2);
  for (int c = 0; c < m.num_cells(); ++c) {
    const LocalWeakGradient op = build_local(m, c, 2, 3);
    CHECK(op.layout.size() == 6 + 3 * m.cells[c].size());
    CHECK(op.gram.rows() == 20);
    CHECK(op.op.rows() == 20);
    CHECK(op.op.cols() == op.layout.size());
  }
}

TEST_CASE("constants have zero weak gradient") {
  const Mesh m = build_polygon_grid(2);
  for (int k = 1; k <= 3; ++k) {
    for (int c = 0; c < m.num_cells(); ++c) {
      const LocalWeakGradient op = build_local(m, c, k, default_weak_degree(m.cells[c].size(), k));
      Eigen::VectorXd v = Eigen::VectorXd::Zero(op.layout.size());
      v[0] = 1.0;
      for (int e = 0; e < op.layout.n_edges; ++e) v[op.layout.edge_offset(e)] = 1.0;
      const double scale = op.op.cwiseAbs().maxCoeff();
      CHECK(apply_weak_gradient(op, {v.data(), static_cast<std::size_t>(v.size())}).cwiseAbs().maxCoeff() <=
            1e-12 * scale);
      CHECK((op.stiffness * v).cwiseAbs().maxCoeff() <= 1e-12 * op.stiffness.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("weak gradient of {x, x} is (1, 0)") {
  for (const Mesh& m : {build_triangle_grid(2), build_polygon_grid(2)}) {
    for (int c = 0; c < m.num_cells(); ++c) {
      const LocalWeakGradient op = build_local(m, c, 1, default_weak_degree(m.cells[c].size(), 1));
      const Eigen::VectorXd v = interpolate_local([](Point p) { return p.x; }, m, c, 1, 4);
      const Eigen::VectorXd g = apply_weak_gradient(op, {v.data(), static_cast<std::size_t>(v.size())});
      for (Point p : sample_points(op)) {
        const Point got = op.eval_vector(g, p);
        CHECK(std::abs(got.x - 1.0) <= 1e-11);
        CHECK(std::abs(got.y) <= 1e-11);
      }
    }
  }
}

TEST_CASE("unit triangle, v = {1, 0}, j = 1") {
  // Independent oracle: Gram system for q in span{(1,0),(x,0),(y,0),(0,1),(0,x),(0,y)}
  // with the exact moments of the reference triangle, int x^a y^b = a! b! / (a+b+2)!.
  auto moment = [](int a, int b) {
    return std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 3.0);
  };
  const int ex[3][2] = {{0, 0}, {1, 0}, {0, 1}};
  Eigen::Matrix3d g;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) g(r, c) = moment(ex[r][0] + ex[c][0], ex[r][1] + ex[c][1]);
  // With v0 = 1 and vb = 0 the right side is -(1, div q): -1/2 for (x,0) and (0,y).
  const Eigen::Vector3d bx(0.0, -0.5, 0.0), by(0.0, 0.0, -0.5);
  const Eigen::Vector3d cx = g.ldlt().solve(bx), cy = g.ldlt().solve(by);
  CHECK(cx[0] == doctest::Approx(12.0));
  CHECK(cx[1] == doctest::Approx(-24.0));
  CHECK(cx[2] == doctest::Approx(-12.0));
  CHECK(cy[0] == doctest::Approx(12.0));
  CHECK(cy[1] == doctest::Approx(-12.0));
  CHECK(cy[2] == doctest::Approx(-24.0));

  const Mesh tri = Mesh::from_polygons({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  const LocalWeakGradient op = build_local(tri, 0, 1, 1);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(op.layout.size());
  v[0] = 1.0;
  const Eigen::VectorXd w = apply_weak_gradient(op, {v.data(), static_cast<std::size_t>(v.size())});
  for (Point p : {Point{0.0, 0.0}, Point{0.2, 0.3}, Point{1.0 / 3, 1.0 / 3}, Point{0.7, 0.1}}) {
    const Point got = op.eval_vector(w, p);
    CHECK(got.x == doctest::Approx(cx[0] + cx[1] * p.x + cx[2] * p.y).epsilon(1e-12).scale(12.0));
    CHECK(got.y == doctest::Approx(cy[0] + cy[1] * p.x + cy[2] * p.y).epsilon(1e-12).scale(12.0));
  }
}

TEST_CASE("weak gradient of a projected degree-k polynomial is its gradient") {
  for (const Mesh& m : {build_triangle_grid(3), build_polygon_grid(2)}) {
    for (int k = 1; k <= 3; ++k) {
      for (const Monomial& mono : monomials_up_to(k)) {
        for (int c = 0; c < m.num_cells(); ++c) {
          const LocalWeakGradient op = build_local(m, c, k, default_weak_degree(m.cells[c].size(), k));
          const Eigen::VectorXd v = interpolate_local(mono, m, c, k, 2 * k + 2);
          const Eigen::VectorXd g = apply_weak_gradient(op, {v.data(), static_cast<std::size_t>(v.size())});
          for (Point p : sample_points(op)) {
            const Point got = op.eval_vector(g, p), want = mono.grad(p);
            CHECK(std::abs(got.x - want.x) <= 1e-10);
            CHECK(std::abs(got.y - want.y) <= 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("weak gradient of a smooth function matches the projected gradient") {
  const Mesh m = build_polygon_grid(2);
  auto phi = [](Point p) { return std::sin(M_PI * p.x) * std::exp(p.y); };
  auto grad = [](Point p) {
    return Point{M_PI * std::cos(M_PI * p.x) * std::exp(p.y), std::sin(M_PI * p.x) * std::exp(p.y)};
  };
  for (int c = 0; c < m.num_cells(); ++c) {
    const LocalWeakGradient op = build_local(m, c, 1, default_weak_degree(m.cells[c].size(), 1));
    const Eigen::VectorXd w = weak_gradient_of_function(op, phi);
    const Eigen::VectorXd q = project_vector_field(op, grad, 2 * op.j + 8);
    CHECK((w - q).cwiseAbs().maxCoeff() <= 1e-9 * q.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("linearity") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  const Mesh m = build_polygon_grid(2);
  const LocalWeakGradient op = build_local(m, 5, 2, 7);
  Eigen::VectorXd u(op.layout.size()), v(op.layout.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    u[i] = n01(rng);
    v[i] = n01(rng);
  }
  const double alpha = n01(rng), beta = n01(rng);
  const Eigen::VectorXd mix = alpha * u + beta * v;
  auto apply = [&](const Eigen::VectorXd& x) {
    return apply_weak_gradient(op, {x.data(), static_cast<std::size_t>(x.size())});
  };
  const Eigen::VectorXd lhs = apply(mix), rhs = alpha * apply(u) + beta * apply(v);
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
  CHECK(apply(Eigen::VectorXd::Zero(op.layout.size())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coefficient count is checked") {
  const Mesh m = build_triangle_grid(1);
  const LocalWeakGradient op = build_local(m, 0, 1, 2);
  const std::vector<double> short_input(op.layout.size() - 1, 0.0);
  try {
    apply_weak_gradient(op, short_input);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("local stiffness kernel") {
  SUBCASE("admissible degrees leave only the constants") {
    for (int k = 1; k <= 4; ++k) {
      const Mesh tri = build_triangle_grid(2);
      for (int c = 0; c < tri.num_cells(); ++c) CHECK(kernel_dimension(build_local(tri, c, k, k + 1).stiffness) == 1);
    }
    const Mesh poly = build_polygon_grid(2);
    for (int k = 1; k <= 2; ++k)
      for (int c = 0; c < poly.num_cells(); ++c)
        CHECK(kernel_dimension(build_local(poly, c, k, default_weak_degree(poly.cells[c].size(), k)).stiffness) == 1);
  }

  SUBCASE("j = k on triangles leaves extra kernel") {
    const Mesh tri = build_triangle_grid(2);
    for (int k = 1; k <= 4; ++k) CHECK(kernel_dimension(build_local(tri, 0, k, k).stiffness) > 1);
  }

  SUBCASE("symmetric and semidefinite") {
    const Mesh poly = build_polygon_grid(2);
    for (int c = 0; c < poly.num_cells(); ++c) {
      const LocalWeakGradient op = build_local(poly, c, 2, 4);
      CHECK((op.stiffness - op.stiffness.transpose()).cwiseAbs().maxCoeff() == 0.0);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.stiffness, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-12 * op.stiffness.trace());
      CHECK((op.gram - op.gram.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("Gram matrix is the cell area times the identity") {
  for (const Mesh& m : {build_triangle_grid(5), build_polygon_grid(4)}) {
    for (int c = 0; c < m.num_cells(); c += 7) {
      const LocalWeakGradient op = build_local(m, c, 2, default_weak_degree(m.cells[c].size(), 2));
      const double area = op.geometry.area;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(op.gram.rows(), op.gram.cols());
      CHECK((op.gram / area - id).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("thin and degenerate cells") {
  SUBCASE("a sliver still reproduces the gradient of x") {
    const Mesh sliver = Mesh::from_polygons({{0, 0}, {1, 0}, {0.5, 1e-6}}, {{0, 1, 2}});
    const LocalWeakGradient op = build_local(sliver, 0, 1, 2);
    const Eigen::VectorXd v = interpolate_local([](Point p) { return p.x; }, sliver, 0, 1, 4);
    const Eigen::VectorXd g = apply_weak_gradient(op, {v.data(), static_cast<std::size_t>(v.size())});
    for (Point p : sample_points(op)) {
      const Point got = op.eval_vector(g, p);
      CHECK(std::abs(got.x - 1.0) <= 1e-8);
      CHECK(std::abs(got.y) <= 1e-8);
    }
  }

  SUBCASE("collinear vertices") {
    const Mesh flat = Mesh::from_polygons({{0, 0}, {1, 0}, {0.5, 0}}, {{0, 1, 2}});
    try {
      build_local(flat, 0, 1, 2);
      FAIL("expected DegenerateCell");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateCell);
    }
  }

  SUBCASE("dependent directions") {
    // Two quadrature points cannot support three independent linear functions.
    const std::vector<Point> pts{{0.1, 0.1}, {0.4, 0.2}};
    const std::vector<double> w{0.5, 0.5};
    try {
      OrthonormalBasis(1, {0.25, 0.15}, 0.5, pts, w);
      FAIL("expected GramSingular");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::GramSingular);
    }
  }

  CHECK_THROWS_AS(build_local(build_triangle_grid(1), 0, 1, kMaxDegree + 1), Error);
}
