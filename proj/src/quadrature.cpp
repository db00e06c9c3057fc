// SPDX-License-Identifier: Apache-2.0
#include "wgpoly/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "wgpoly/error.hpp"

namespace wgpoly {

namespace {

constexpr int kMaxGaussPoints = 40;

// Legendre P_n(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int m = 2; m <= n; ++m) {
    const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
    p0 = p1;
    p1 = p2;
  }
  if (n == 1) p0 = 1.0;
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

GaussRule compute_gauss(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, x).second;
    // Map [-1, 1] -> [0, 1], ascending nodes.
    r.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

struct GaussCache {
  std::array<GaussRule, kMaxGaussPoints + 1> rules;
  GaussCache() {
    for (int n = 1; n <= kMaxGaussPoints; ++n) rules[n] = compute_gauss(n);
  }
};

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const GaussCache cache;
  if (n < 1 || n > kMaxGaussPoints)
    throw Error(ErrorCode::Config, "Gauss rule with " + std::to_string(n) + " points not supported");
  return cache.rules[n];
}

QuadratureRule edge_rule(Point start, Point end, int degree) {
  const GaussRule& g = gauss_legendre(std::max(degree, 0) / 2 + 1);
  const double len = distance(start, end);
  QuadratureRule r;
  r.degree = degree;
  r.points.reserve(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double t = g.nodes[i];
    r.points.push_back(start + t * (end - start));
    r.weights.push_back(g.weights[i] * len);
    r.params.push_back(t);
  }
  return r;
}

namespace {

void append_triangle(QuadratureRule& r, Point a, Point b, Point c, int degree) {
  // x = a + u (b - a) + u v (c - b), Jacobian 2|T| u. A degree-d polynomial
  // becomes degree d + 1 in u (with the Jacobian) and degree d in v.
  const GaussRule& gu = gauss_legendre((std::max(degree, 0) + 3) / 2);
  const GaussRule& gv = gauss_legendre((std::max(degree, 0) + 2) / 2);
  const double twice_area = cross(b - a, c - a);
  for (std::size_t i = 0; i < gu.nodes.size(); ++i) {
    const double u = gu.nodes[i];
    for (std::size_t k = 0; k < gv.nodes.size(); ++k) {
      const double v = gv.nodes[k];
      r.points.push_back(a + u * (b - a) + (u * v) * (c - b));
      r.weights.push_back(gu.weights[i] * gv.weights[k] * twice_area * u);
    }
  }
}

}  // namespace

QuadratureRule triangle_rule(Point a, Point b, Point c, int degree) {
  QuadratureRule r;
  r.degree = degree;
  append_triangle(r, a, b, c, degree);
  return r;
}

QuadratureRule polygon_rule(const std::vector<Point>& loop, int degree) {
  const std::size_t n = loop.size();
  const Point o = loop[0];
  double twice_area = 0.0;
  Point moment;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = loop[i] - o;
    const Point b = loop[(i + 1) % n] - o;
    const double c = cross(a, b);
    twice_area += c;
    moment = moment + c * (a + b);
  }
  const Point centroid = o + (1.0 / (3.0 * twice_area)) * moment;
  const double area = 0.5 * twice_area;

  if (!(area > 0.0))
    throw Error(ErrorCode::DegenerateCell, "polygon has area " + std::to_string(area));

  QuadratureRule r;
  r.degree = degree;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = loop[i];
    const Point b = loop[(i + 1) % n];
    const double fan_area = 0.5 * cross(a - centroid, b - centroid);
    if (!(fan_area >= 1e-14 * area))
      throw Error(ErrorCode::DegenerateCell,
                  "fan triangle " + std::to_string(i) + " has area " + std::to_string(fan_area) +
                      " relative to cell area " + std::to_string(area));
    append_triangle(r, centroid, a, b, degree);
  }
  return r;
}

QuadratureRule cell_rule(const Mesh& mesh, int cell, int degree) {
  try {
    return polygon_rule(mesh.cell_points(cell), degree);
  } catch (const Error& e) {
    throw Error(e.code(), "cell " + std::to_string(cell) + ": " + e.what());
  }
}

}  // namespace wgpoly
