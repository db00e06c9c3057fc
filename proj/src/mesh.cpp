// SPDX-License-Identifier: Apache-2.0
#include "wgpoly/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <unordered_map>

#include "wgpoly/error.hpp"

namespace wgpoly {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  auto orient = [](Point a, Point b, Point c) { return cross(b - a, c - a); };
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > kGeomTol && d2 < -kGeomTol) || (d1 < -kGeomTol && d2 > kGeomTol)) &&
      ((d3 > kGeomTol && d4 < -kGeomTol) || (d3 < -kGeomTol && d4 > kGeomTol)))
    return true;
  auto on_segment = [](Point a, Point b, Point c) {
    return std::abs(cross(b - a, c - a)) <= kGeomTol &&
           std::min(a.x, b.x) - kGeomTol <= c.x && c.x <= std::max(a.x, b.x) + kGeomTol &&
           std::min(a.y, b.y) - kGeomTol <= c.y && c.y <= std::max(a.y, b.y) + kGeomTol;
  };
  return on_segment(q1, q2, p1) || on_segment(q1, q2, p2) || on_segment(p1, p2, q1) ||
         on_segment(p1, p2, q2);
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double polygon_area(const std::vector<Point>& loop) {
  double twice = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(loop[i], loop[(i + 1) % n]);
  return 0.5 * twice;
}

double polygon_diameter(const std::vector<Point>& loop) {
  double d = 0.0;
  for (std::size_t a = 0; a < loop.size(); ++a)
    for (std::size_t b = a + 1; b < loop.size(); ++b) d = std::max(d, distance(loop[a], loop[b]));
  return d;
}

std::vector<Point> Mesh::cell_points(int cell) const {
  std::vector<Point> pts;
  pts.reserve(cells[cell].vertices.size());
  for (int v : cells[cell].vertices) pts.push_back(vertices[v]);
  return pts;
}

CellGeometry Mesh::cell_geometry(int cell) const {
  const auto pts = cell_points(cell);
  const std::size_t n = pts.size();
  CellGeometry g;
  // Centroid relative to the first vertex keeps cancellation small.
  const Point o = pts[0];
  double twice_area = 0.0;
  Point moment;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = pts[i] - o;
    const Point b = pts[(i + 1) % n] - o;
    const double c = cross(a, b);
    twice_area += c;
    moment = moment + c * (a + b);
  }
  g.area = 0.5 * twice_area;
  g.centroid = o + (1.0 / (3.0 * twice_area)) * moment;
  g.diameter = polygon_diameter(pts);
  g.edges.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = pts[i];
    const Point b = pts[(i + 1) % n];
    const Point d = b - a;
    const double len = std::hypot(d.x, d.y);
    g.edges[i] = {len, {d.y / len, -d.x / len}, 0.5 * (a + b)};
  }
  return g;
}

Mesh Mesh::from_polygons(std::vector<Point> vertices,
                         const std::vector<std::vector<int>>& loops) {
  Mesh m;
  m.vertices = std::move(vertices);
  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(loops.size() * 4);
  std::vector<int> count;
  m.cells.reserve(loops.size());
  for (const auto& loop : loops) {
    Cell c;
    c.vertices = loop;
    const int n = static_cast<int>(loop.size());
    c.edges.resize(n);
    c.sign.resize(n);
    for (int i = 0; i < n; ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % n];
      auto [it, inserted] = lookup.try_emplace(edge_key(a, b), m.num_edges());
      if (inserted) {
        m.edges.push_back({{std::min(a, b), std::max(a, b)}, false});
        count.push_back(0);
      }
      ++count[it->second];
      c.edges[i] = it->second;
      c.sign[i] = a < b ? 1 : -1;
    }
    m.cells.push_back(std::move(c));
  }
  for (int e = 0; e < m.num_edges(); ++e) m.edges[e].boundary = count[e] == 1;
  for (int c = 0; c < m.num_cells(); ++c)
    m.h_max = std::max(m.h_max, polygon_diameter(m.cell_points(c)));
  return m;
}

Mesh build_triangle_grid(int level) {
  if (level < 1 || level > kMaxGridLevel)
    throw Error(ErrorCode::Config, "triangle grid level must be in [1, " +
                                       std::to_string(kMaxGridLevel) + "], got " +
                                       std::to_string(level));
  Mesh m = Mesh::from_polygons({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}});
  for (int l = 1; l < level; ++l) m = refine_uniform(m);
  return m;
}

Mesh refine_uniform(const Mesh& mesh) {
  for (int c = 0; c < mesh.num_cells(); ++c)
    if (mesh.cells[c].size() != 3)
      throw Error(ErrorCode::NonTriangleCell,
                  "cell " + std::to_string(c) + " has " +
                      std::to_string(mesh.cells[c].size()) + " vertices");
  std::vector<Point> pts = mesh.vertices;
  std::vector<int> midpoint(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& ed = mesh.edges[e];
    midpoint[e] = static_cast<int>(pts.size());
    pts.push_back(0.5 * (mesh.vertices[ed.v[0]] + mesh.vertices[ed.v[1]]));
  }
  std::vector<std::vector<int>> loops;
  loops.reserve(4 * mesh.cells.size());
  for (const auto& c : mesh.cells) {
    const int a = c.vertices[0], b = c.vertices[1], d = c.vertices[2];
    const int ab = midpoint[c.edges[0]], bd = midpoint[c.edges[1]], da = midpoint[c.edges[2]];
    loops.push_back({a, ab, da});
    loops.push_back({ab, b, bd});
    loops.push_back({da, bd, d});
    loops.push_back({ab, bd, da});
  }
  return Mesh::from_polygons(std::move(pts), loops);
}

Mesh build_polygon_grid(int level) {
  if (level < 1 || level + 1 > kMaxGridLevel)
    throw Error(ErrorCode::Config, "polygon grid level must be in [1, " +
                                       std::to_string(kMaxGridLevel - 1) + "], got " +
                                       std::to_string(level));
  const Mesh primal = build_triangle_grid(level + 1);

  std::vector<Point> pts;
  std::vector<int> centroid_id(primal.num_cells());
  for (int c = 0; c < primal.num_cells(); ++c) {
    const auto& v = primal.cells[c].vertices;
    centroid_id[c] = static_cast<int>(pts.size());
    pts.push_back((1.0 / 3.0) *
                  (primal.vertices[v[0]] + primal.vertices[v[1]] + primal.vertices[v[2]]));
  }
  std::vector<int> midpoint_id(primal.num_edges(), -1);
  for (int e = 0; e < primal.num_edges(); ++e) {
    if (!primal.edges[e].boundary) continue;
    midpoint_id[e] = static_cast<int>(pts.size());
    const auto& ed = primal.edges[e];
    pts.push_back(0.5 * (primal.vertices[ed.v[0]] + primal.vertices[ed.v[1]]));
  }

  std::vector<std::vector<int>> vertex_cells(primal.num_vertices());
  std::vector<std::vector<int>> vertex_bedges(primal.num_vertices());
  for (int c = 0; c < primal.num_cells(); ++c)
    for (int v : primal.cells[c].vertices) vertex_cells[v].push_back(c);
  for (int e = 0; e < primal.num_edges(); ++e)
    if (primal.edges[e].boundary)
      for (int v : primal.edges[e].v) vertex_bedges[v].push_back(e);

  std::vector<std::vector<int>> loops;
  loops.reserve(primal.vertices.size());
  for (int v = 0; v < primal.num_vertices(); ++v) {
    std::vector<int> ids;
    for (int c : vertex_cells[v]) ids.push_back(centroid_id[c]);
    const auto& be = vertex_bedges[v];
    if (!be.empty()) {
      for (int e : be) ids.push_back(midpoint_id[e]);
      const Point p = primal.vertices[v];
      auto far_end = [&](int e) {
        const auto& ed = primal.edges[e];
        return primal.vertices[ed.v[0] == v ? ed.v[1] : ed.v[0]] - p;
      };
      if (std::abs(cross(far_end(be[0]), far_end(be[1]))) > kGeomTol) {
        ids.push_back(static_cast<int>(pts.size()));
        pts.push_back(p);
      }
    }
    // Every dual cell is convex, so sorting by angle about the vertex average
    // gives the counter-clockwise loop.
    Point mean;
    for (int id : ids) mean = mean + pts[id];
    mean = (1.0 / static_cast<double>(ids.size())) * mean;
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      return std::atan2(pts[a].y - mean.y, pts[a].x - mean.x) <
             std::atan2(pts[b].y - mean.y, pts[b].x - mean.x);
    });
    loops.push_back(std::move(ids));
  }
  return Mesh::from_polygons(std::move(pts), loops);
}

bool ValidationReport::has(DefectKind kind, int entity) const {
  return std::any_of(defects.begin(), defects.end(),
                     [&](const Defect& d) { return d.kind == kind && d.entity == entity; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& d : defects) os << d.message << '\n';
  return os.str();
}

ValidationReport validate(const Mesh& mesh) {
  ValidationReport report;
  auto add = [&](DefectKind kind, int entity, std::string msg) {
    report.defects.push_back({kind, entity, std::move(msg)});
  };
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_edges();

  for (int e = 0; e < ne; ++e) {
    const auto& ed = mesh.edges[e];
    if (ed.v[0] < 0 || ed.v[1] < 0 || ed.v[0] >= nv || ed.v[1] >= nv)
      add(DefectKind::IndexRange, e, "edge " + std::to_string(e) + ": vertex index out of range");
    else if (ed.v[0] >= ed.v[1])
      add(DefectKind::EdgeMismatch, e, "edge " + std::to_string(e) + ": not in canonical orientation");
  }
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const std::string tag = "cell " + std::to_string(c) + ": ";
    if (cell.size() < 3) {
      add(DefectKind::NonSimple, c, tag + "fewer than 3 vertices");
      continue;
    }
    bool in_range = true;
    for (int v : cell.vertices) in_range &= v >= 0 && v < nv;
    for (int e : cell.edges) in_range &= e >= 0 && e < ne;
    if (!in_range || cell.edges.size() != cell.vertices.size() ||
        cell.sign.size() != cell.vertices.size()) {
      add(DefectKind::IndexRange, c, tag + "vertex/edge index out of range or size mismatch");
    }
  }
  if (!report.ok()) return report;

  std::vector<int> incidence(ne, 0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cells[c];
    const std::string tag = "cell " + std::to_string(c) + ": ";
    const int n = cell.size();
    for (int i = 0; i < n; ++i) {
      const int a = cell.vertices[i];
      const int b = cell.vertices[(i + 1) % n];
      const auto& ed = mesh.edges[cell.edges[i]];
      ++incidence[cell.edges[i]];
      if (ed.v[0] != std::min(a, b) || ed.v[1] != std::max(a, b) ||
          cell.sign[i] != (a < b ? 1 : -1))
        add(DefectKind::EdgeMismatch, c,
            tag + "local edge " + std::to_string(i) + " does not match its vertex pair");
    }
    const auto pts = mesh.cell_points(c);
    bool simple = true;
    for (int i = 0; i < n && simple; ++i)
      for (int j = i + 1; j < n && simple; ++j) {
        if (cell.vertices[i] == cell.vertices[j]) simple = false;
        const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
        if (!adjacent && segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]))
          simple = false;
      }
    if (!simple) add(DefectKind::NonSimple, c, tag + "vertex loop is not simple");
    if (polygon_area(pts) <= kGeomTol * kGeomTol)
      add(DefectKind::Orientation, c, tag + "loop is not counter-clockwise with positive area");
  }
  for (int e = 0; e < ne; ++e) {
    const std::string tag = "edge " + std::to_string(e) + ": ";
    if (incidence[e] < 1 || incidence[e] > 2)
      add(DefectKind::Incidence, e,
          tag + "referenced by " + std::to_string(incidence[e]) + " cells");
    if (mesh.edges[e].boundary != (incidence[e] == 1))
      add(DefectKind::BoundaryFlag, e, tag + "boundary flag disagrees with cell incidence");
  }
  const long euler = static_cast<long>(nv) - ne + mesh.num_cells() + 1;
  if (euler != 2)
    add(DefectKind::Euler, -1, "Euler characteristic V - E + F = " + std::to_string(euler));
  double h = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) h = std::max(h, polygon_diameter(mesh.cell_points(c)));
  if (std::abs(h - mesh.h_max) > kGeomTol)
    add(DefectKind::Diameter, -1, "h_max does not equal the largest cell diameter");
  return report;
}

}  // namespace wgpoly
