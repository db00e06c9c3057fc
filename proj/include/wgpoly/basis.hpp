// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wgpoly/mesh.hpp"

namespace wgpoly {

inline constexpr int kMaxDegree = 12;

/// Dimension of P_deg in two variables.
constexpr int poly_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

/// Exponent pairs (a, b) in graded-lexicographic order:
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
std::span<const std::array<int, 2>> monomial_exponents(int degree);

/// Scaled monomials ((x - xc)/h)^a ((y - yc)/h)^b, a + b <= degree.
class CellBasis {
 public:
  CellBasis(int degree, Point center, double scale);

  int degree() const { return degree_; }
  int size() const { return poly_dim(degree_); }
  Point center() const { return center_; }
  double scale() const { return scale_; }

  void eval(Point p, std::span<double> out) const;
  std::vector<double> eval(Point p) const;
  void eval_gradient(Point p, std::span<double> dx, std::span<double> dy) const;

 private:
  int degree_;
  Point center_;
  double scale_;
};

/// [P_j]^2 spanned by (phi_m, 0) for all m, followed by (0, phi_m).
class VectorCellBasis {
 public:
  VectorCellBasis(int degree, Point center, double scale) : scalar_(degree, center, scale) {}

  int degree() const { return scalar_.degree(); }
  int size() const { return 2 * scalar_.size(); }
  const CellBasis& scalar() const { return scalar_; }

  /// Divergence of every vector basis function at p.
  void eval_divergence(Point p, std::span<double> out) const;
  std::vector<double> eval_divergence(Point p) const;

  /// q . n for every vector basis function at p.
  void eval_normal_trace(Point p, Point normal, std::span<double> out) const;
  std::vector<double> eval_normal_trace(Point p, Point normal) const;

 private:
  CellBasis scalar_;
};

/// Values and gradients of a basis at a set of points, one row per point.
struct BasisTable {
  Eigen::MatrixXd values;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
};

/// Orthonormal basis of P_degree for the mean inner product
/// (1/|T|) sum_q w_q f(x_q) g(x_q) of a cell quadrature rule exact to
/// 2 * degree. Built by a Stieltjes-Arnoldi recurrence: each new function is
/// x or y (scaled about `center` by `scale`) times an earlier one,
/// orthogonalized twice against all previous functions. Functions are graded
/// by degree in the same order as CellBasis, so the first poly_dim(d) of them
/// span P_d. Evaluation replays the recurrence and never forms monomial
/// coefficients, which keeps high degrees usable on cells where the scaled
/// monomial Gram matrix is hopelessly ill-conditioned.
class OrthonormalBasis {
 public:
  OrthonormalBasis() = default;
  /// Throws `GramSingular` when a new direction is numerically dependent on
  /// the previous ones. `at_points`, when given, receives the table at the
  /// rule's points.
  OrthonormalBasis(int degree, Point center, double scale, std::span<const Point> points,
                   std::span<const double> weights, BasisTable* at_points = nullptr);

  int degree() const { return degree_; }
  int size() const { return poly_dim(degree_); }

  void eval(Point p, std::span<double> out) const;
  std::vector<double> eval(Point p) const;
  void eval_gradient(Point p, std::span<double> values, std::span<double> dx, std::span<double> dy) const;

 private:
  int degree_ = 0;
  Point center_;
  double scale_ = 1.0;
  std::vector<int> parent_;
  std::vector<int> along_y_;
  std::vector<double> coeffs_;  // row i holds i projection coefficients, packed
  std::vector<double> norm_;
};

/// Shifted Legendre polynomial P_n(2t - 1) on [0, 1].
double shifted_legendre(int n, double t);

/// Shifted Legendre polynomials in the arclength fraction t along an edge,
/// running from `start` (t = 0) to `end` (t = 1).
class EdgeBasis {
 public:
  EdgeBasis(int degree, Point start, Point end);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  double length() const { return length_; }

  void eval(double t, std::span<double> out) const;
  std::vector<double> eval(double t) const;
  /// Arclength fraction of the projection of p onto the edge.
  double parameter(Point p) const;

 private:
  int degree_;
  Point start_;
  Point end_;
  double length_;
};

}  // namespace wgpoly
