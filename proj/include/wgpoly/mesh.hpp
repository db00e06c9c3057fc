// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace wgpoly {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double distance(Point a, Point b);

/// Absolute geometric tolerance on the unit square.
inline constexpr double kGeomTol = 1e-12;

/// Largest level accepted by the grid generators.
inline constexpr int kMaxGridLevel = 11;

/// An edge stored in canonical orientation: `v[0] < v[1]`.
struct Edge {
  std::array<int, 2> v{};
  bool boundary = false;
};

/// A cell is a counter-clockwise vertex loop. Local edge i joins vertices[i]
/// and vertices[i+1]; `sign[i]` is +1 when that traversal matches the edge's
/// canonical orientation, -1 otherwise.
struct Cell {
  std::vector<int> vertices;
  std::vector<int> edges;
  std::vector<int> sign;

  int size() const { return static_cast<int>(vertices.size()); }
};

struct EdgeGeometry {
  double length = 0.0;
  Point normal;  // unit, outward from the owning cell
  Point midpoint;
};

struct CellGeometry {
  Point centroid;
  double diameter = 0.0;
  double area = 0.0;
  std::vector<EdgeGeometry> edges;  // in the cell's local edge order
};

/// Planar polygonal mesh with public fields. The factory functions always
/// produce valid meshes; hand-built ones can be checked with `validate`.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<Edge> edges;
  std::vector<Cell> cells;
  double h_max = 0.0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }

  CellGeometry cell_geometry(int cell) const;
  std::vector<Point> cell_points(int cell) const;

  /// Builds a mesh from CCW vertex loops, deriving edges, orientation signs,
  /// boundary flags and h_max.
  static Mesh from_polygons(std::vector<Point> vertices,
                            const std::vector<std::vector<int>>& loops);
};

double polygon_area(const std::vector<Point>& loop);
double polygon_diameter(const std::vector<Point>& loop);

/// Unit square cut by the forward-slash diagonal at level 1, refined
/// uniformly `level - 1` times.
Mesh build_triangle_grid(int level);

/// Splits every triangle into four through its edge midpoints. Existing
/// vertices keep their indices. Throws `NonTriangleCell`.
Mesh refine_uniform(const Mesh& mesh);

/// Bounded centroid dual of `build_triangle_grid(level + 1)`. Interior cells
/// are hexagons; cells touching the boundary are pentagons or quadrilaterals.
Mesh build_polygon_grid(int level);

enum class DefectKind {
  Incidence,
  Orientation,
  NonSimple,
  EdgeMismatch,
  BoundaryFlag,
  Euler,
  Diameter,
  IndexRange,
};

struct Defect {
  DefectKind kind;
  int entity;  // cell or edge index, -1 when global
  std::string message;
};

struct ValidationReport {
  std::vector<Defect> defects;

  bool ok() const { return defects.empty(); }
  bool has(DefectKind kind, int entity) const;
  std::string to_string() const;
};

ValidationReport validate(const Mesh& mesh);

/// Text format: `wgmesh 1`, `V n` + n lines `x y`, `C m` + m lines
/// `n i0 ... i(n-1)`. Throws `ParseError` or a validation `Error`.
Mesh load_mesh(std::string_view text);
std::string save_mesh(const Mesh& mesh);
Mesh load_mesh_file(const std::string& path);
void save_mesh_file(const Mesh& mesh, const std::string& path);

}  // namespace wgpoly
