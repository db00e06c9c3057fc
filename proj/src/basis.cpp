// SPDX-License-Identifier: Apache-2.0
#include "wgpoly/basis.hpp"

#include <cmath>
#include <string>

#include "wgpoly/error.hpp"

namespace wgpoly {

namespace {

struct ExponentTable {
  std::array<std::vector<std::array<int, 2>>, kMaxDegree + 1> by_degree;
  ExponentTable() {
    for (int deg = 0; deg <= kMaxDegree; ++deg)
      for (int total = 0; total <= deg; ++total)
        for (int a = total; a >= 0; --a) by_degree[deg].push_back({a, total - a});
  }
};

const ExponentTable& table() {
  static const ExponentTable t;
  return t;
}

void check_degree(int degree) {
  if (degree < 0 || degree > kMaxDegree)
    throw Error(ErrorCode::Config, "polynomial degree " + std::to_string(degree) +
                                       " outside supported range [0, " +
                                       std::to_string(kMaxDegree) + "]");
}

}  // namespace

std::span<const std::array<int, 2>> monomial_exponents(int degree) {
  check_degree(degree);
  return table().by_degree[degree];
}

CellBasis::CellBasis(int degree, Point center, double scale)
    : degree_(degree), center_(center), scale_(scale) {
  check_degree(degree);
}

void CellBasis::eval(Point p, std::span<double> out) const {
  std::array<double, kMaxDegree + 1> px, py;
  const double sx = (p.x - center_.x) / scale_;
  const double sy = (p.y - center_.y) / scale_;
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= degree_; ++i) {
    px[i] = px[i - 1] * sx;
    py[i] = py[i - 1] * sy;
  }
  const auto exps = table().by_degree[degree_];
  for (std::size_t m = 0; m < exps.size(); ++m) out[m] = px[exps[m][0]] * py[exps[m][1]];
}

std::vector<double> CellBasis::eval(Point p) const {
  std::vector<double> out(size());
  eval(p, out);
  return out;
}

void CellBasis::eval_gradient(Point p, std::span<double> dx, std::span<double> dy) const {
  std::array<double, kMaxDegree + 1> px, py;
  const double sx = (p.x - center_.x) / scale_;
  const double sy = (p.y - center_.y) / scale_;
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= degree_; ++i) {
    px[i] = px[i - 1] * sx;
    py[i] = py[i - 1] * sy;
  }
  const auto exps = table().by_degree[degree_];
  for (std::size_t m = 0; m < exps.size(); ++m) {
    const int a = exps[m][0], b = exps[m][1];
    dx[m] = a > 0 ? a * px[a - 1] * py[b] / scale_ : 0.0;
    dy[m] = b > 0 ? b * px[a] * py[b - 1] / scale_ : 0.0;
  }
}

void VectorCellBasis::eval_divergence(Point p, std::span<double> out) const {
  const int n = scalar_.size();
  scalar_.eval_gradient(p, out.first(n), out.subspan(n, n));
}

std::vector<double> VectorCellBasis::eval_divergence(Point p) const {
  std::vector<double> out(size());
  eval_divergence(p, out);
  return out;
}

void VectorCellBasis::eval_normal_trace(Point p, Point normal, std::span<double> out) const {
  const int n = scalar_.size();
  scalar_.eval(p, out.first(n));
  for (int m = 0; m < n; ++m) {
    out[n + m] = out[m] * normal.y;
    out[m] *= normal.x;
  }
}

std::vector<double> VectorCellBasis::eval_normal_trace(Point p, Point normal) const {
  std::vector<double> out(size());
  eval_normal_trace(p, normal, out);
  return out;
}

namespace {

constexpr double kDependenceRatio = 1e-10;

std::size_t packed_row(int i) { return static_cast<std::size_t>(i) * (i - 1) / 2; }

}  // namespace

OrthonormalBasis::OrthonormalBasis(int degree, Point center, double scale, std::span<const Point> points,
                                   std::span<const double> weights, BasisTable* at_points)
    : degree_(degree), center_(center), scale_(scale) {
  check_degree(degree);
  const int n = poly_dim(degree);
  const Eigen::Index np = static_cast<Eigen::Index>(points.size());
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw Error(ErrorCode::GramSingular, "quadrature rule has no positive measure");

  Eigen::VectorXd w(np), sx(np), sy(np);
  for (Eigen::Index q = 0; q < np; ++q) {
    w[q] = weights[q] / total;
    sx[q] = (points[q].x - center.x) / scale;
    sy[q] = (points[q].y - center.y) / scale;
  }

  parent_.assign(n, -1);
  along_y_.assign(n, 0);
  norm_.assign(n, 1.0);
  coeffs_.assign(packed_row(n), 0.0);
  for (int d = 1; d <= degree; ++d) {
    const int base = poly_dim(d - 1), prev = poly_dim(d - 2);
    // x^a y^b = x * x^(a-1) y^b while a > 0; the last one is y * y^(d-1).
    for (int i = 0; i <= d; ++i) {
      parent_[base + i] = i < d ? prev + i : prev + d - 1;
      along_y_[base + i] = i == d;
    }
  }

  Eigen::MatrixXd v(np, n), gx, gy;
  v.col(0).setOnes();
  const bool table = at_points != nullptr;
  if (table) {
    gx = Eigen::MatrixXd::Zero(np, n);
    gy = Eigen::MatrixXd::Zero(np, n);
  }
  Eigen::VectorXd t(np), h(n);
  for (int i = 1; i < n; ++i) {
    const int p = parent_[i];
    const Eigen::VectorXd& s = along_y_[i] ? sy : sx;
    t = s.cwiseProduct(v.col(p));
    const double before = std::sqrt(w.dot(t.cwiseAbs2()));
    h.head(i).setZero();
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd proj = v.leftCols(i).transpose() * w.cwiseProduct(t);
      t.noalias() -= v.leftCols(i) * proj;
      h.head(i) += proj;
    }
    const double after = std::sqrt(w.dot(t.cwiseAbs2()));
    if (!(after > kDependenceRatio * before))
      throw Error(ErrorCode::GramSingular, "basis direction " + std::to_string(i) + " of P_" +
                                               std::to_string(degree) + " is numerically dependent");
    v.col(i) = t / after;
    norm_[i] = after;
    std::copy(h.data(), h.data() + i, coeffs_.begin() + packed_row(i));
    if (table) {
      const Eigen::Map<const Eigen::VectorXd> c(h.data(), i);
      Eigen::VectorXd dgx = s.cwiseProduct(gx.col(p)) - gx.leftCols(i) * c;
      Eigen::VectorXd dgy = s.cwiseProduct(gy.col(p)) - gy.leftCols(i) * c;
      (along_y_[i] ? dgy : dgx) += v.col(p) / scale;
      gx.col(i) = dgx / after;
      gy.col(i) = dgy / after;
    }
  }
  if (table) *at_points = {std::move(v), std::move(gx), std::move(gy)};
}

void OrthonormalBasis::eval(Point p, std::span<double> out) const {
  const double s[2] = {(p.x - center_.x) / scale_, (p.y - center_.y) / scale_};
  const int n = size();
  out[0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const double* c = coeffs_.data() + packed_row(i);
    double acc = s[along_y_[i]] * out[parent_[i]];
    for (int r = 0; r < i; ++r) acc -= c[r] * out[r];
    out[i] = acc / norm_[i];
  }
}

std::vector<double> OrthonormalBasis::eval(Point p) const {
  std::vector<double> out(size());
  eval(p, out);
  return out;
}

void OrthonormalBasis::eval_gradient(Point p, std::span<double> values, std::span<double> dx,
                                     std::span<double> dy) const {
  const double s[2] = {(p.x - center_.x) / scale_, (p.y - center_.y) / scale_};
  const int n = size();
  values[0] = 1.0;
  dx[0] = dy[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    const double* c = coeffs_.data() + packed_row(i);
    const int par = parent_[i];
    const double si = s[along_y_[i]];
    double v = si * values[par], gx = si * dx[par], gy = si * dy[par];
    (along_y_[i] ? gy : gx) += values[par] / scale_;
    for (int r = 0; r < i; ++r) {
      v -= c[r] * values[r];
      gx -= c[r] * dx[r];
      gy -= c[r] * dy[r];
    }
    values[i] = v / norm_[i];
    dx[i] = gx / norm_[i];
    dy[i] = gy / norm_[i];
  }
}

double shifted_legendre(int n, double t) {
  const double x = 2.0 * t - 1.0;
  double prev = 1.0, cur = x;
  if (n == 0) return prev;
  for (int i = 1; i < n; ++i) {
    const double next = ((2.0 * i + 1.0) * x * cur - i * prev) / (i + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

EdgeBasis::EdgeBasis(int degree, Point start, Point end)
    : degree_(degree), start_(start), end_(end), length_(distance(start, end)) {
  check_degree(degree);
}

void EdgeBasis::eval(double t, std::span<double> out) const {
  const double x = 2.0 * t - 1.0;
  out[0] = 1.0;
  if (degree_ >= 1) out[1] = x;
  for (int i = 1; i < degree_; ++i)
    out[i + 1] = ((2.0 * i + 1.0) * x * out[i] - i * out[i - 1]) / (i + 1.0);
}

std::vector<double> EdgeBasis::eval(double t) const {
  std::vector<double> out(size());
  eval(t, out);
  return out;
}

double EdgeBasis::parameter(Point p) const {
  const Point d = end_ - start_;
  return dot(p - start_, d) / dot(d, d);
}

}  // namespace wgpoly
