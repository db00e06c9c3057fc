// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "wgpoly/mesh.hpp"

namespace wgpoly {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, exact for polynomials of degree 2n - 1. Rules are cached.
const GaussRule& gauss_legendre(int n);

struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<double> params;  // edge rules only: arclength fraction of each point
  int degree = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss-Legendre on the segment start -> end, exact to `degree` in the
/// arclength parameter.
QuadratureRule edge_rule(Point start, Point end, int degree);

/// Collapsed tensor-Gauss rule on a triangle, exact to `degree`.
QuadratureRule triangle_rule(Point a, Point b, Point c, int degree);

/// Fan triangulation from the area centroid with a triangle rule on each
/// piece. Throws `DegenerateCell` if a fan triangle has area below
/// 1e-14 times the polygon area.
QuadratureRule polygon_rule(const std::vector<Point>& loop, int degree);
QuadratureRule cell_rule(const Mesh& mesh, int cell, int degree);

}  // namespace wgpoly
