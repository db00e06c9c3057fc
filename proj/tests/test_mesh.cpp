// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>
#include <sstream>

#include "wgpoly/error.hpp"
#include "wgpoly/mesh.hpp"

using namespace wgpoly;

namespace {

int numeric_lines_with_fields(const std::string& text, int fields) {
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    int count = 0;
    bool numeric = true;
    while (ls >> tok) {
      ++count;
      numeric = numeric && (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '-' || tok[0] == '.');
    }
    if (numeric && count == fields) ++n;
  }
  return n;
}

// Cells compared as sorted lists of vertex coordinates, independent of labels.
std::multiset<std::vector<std::pair<double, double>>> cell_shapes(const Mesh& m) {
  std::multiset<std::vector<std::pair<double, double>>> out;
  for (int c = 0; c < m.num_cells(); ++c) {
    std::vector<std::pair<double, double>> pts;
    for (Point p : m.cell_points(c)) pts.emplace_back(p.x, p.y);
    std::sort(pts.begin(), pts.end());
    out.insert(pts);
  }
  return out;
}

bool is_interior(const Mesh& m, int c) {
  for (int e : m.cells[c].edges)
    if (m.edges[e].boundary) return false;
  return true;
}

double area_sum(const Mesh& m) {
  double s = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) s += m.cell_geometry(c).area;
  return s;
}

}  // namespace

TEST_CASE("triangle grid entity counts") {
  const Mesh l1 = build_triangle_grid(1);
  CHECK(l1.num_cells() == 2);
  CHECK(l1.num_vertices() == 4);
  CHECK(l1.num_edges() == 5);

  const Mesh l2 = build_triangle_grid(2);
  CHECK(l2.num_cells() == 8);
  CHECK(l2.num_vertices() == 9);
  CHECK(l2.num_edges() == 16);
  CHECK(l2.num_vertices() - l2.num_edges() + l2.num_cells() + 1 == 2);

  CHECK(build_triangle_grid(3).num_cells() == 32);
  for (int level = 1; level <= 5; ++level)
    CHECK(build_triangle_grid(level).num_cells() == 2 * static_cast<int>(std::pow(4, level - 1)));
}

TEST_CASE("level 1 is the forward-slash split of the unit square") {
  const Mesh m = build_triangle_grid(1);
  std::set<std::pair<double, double>> diagonal_ends;
  for (const Edge& e : m.edges) {
    if (e.boundary) continue;
    for (int v : e.v) diagonal_ends.emplace(m.vertices[v].x, m.vertices[v].y);
  }
  CHECK(diagonal_ends == std::set<std::pair<double, double>>{{0.0, 0.0}, {1.0, 1.0}});
  CHECK(m.h_max == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("grid level guard") {
  CHECK_THROWS_AS(build_triangle_grid(0), Error);
  CHECK_THROWS_AS(build_triangle_grid(kMaxGridLevel + 1), Error);
  CHECK_THROWS_AS(build_polygon_grid(kMaxGridLevel), Error);
  try {
    build_triangle_grid(0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
  }
}

TEST_CASE("refinement") {
  const Mesh l1 = build_triangle_grid(1);
  const Mesh r = refine_uniform(l1);
  CHECK(cell_shapes(r) == cell_shapes(build_triangle_grid(2)));
  CHECK(r.num_cells() == 4 * l1.num_cells());
  CHECK(validate(r).ok());

  SUBCASE("unit triangle children halve the diameter") {
    const Mesh tri = Mesh::from_polygons({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    CHECK(tri.h_max == doctest::Approx(std::sqrt(2.0)));
    const Mesh kids = refine_uniform(tri);
    REQUIRE(kids.num_cells() == 4);
    for (int c = 0; c < 4; ++c)
      CHECK(kids.cell_geometry(c).diameter == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
  }

  SUBCASE("boundary flags are inherited") {
    for (const Edge& e : r.edges) {
      const Point a = r.vertices[e.v[0]], b = r.vertices[e.v[1]];
      const bool on_side = (a.x == b.x && (a.x == 0.0 || a.x == 1.0)) ||
                           (a.y == b.y && (a.y == 0.0 || a.y == 1.0));
      CHECK(e.boundary == on_side);
    }
  }

  SUBCASE("polygons cannot be refined") {
    try {
      refine_uniform(build_polygon_grid(1));
      FAIL("expected NonTriangleCell");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonTriangleCell);
    }
  }
}

TEST_CASE("triangle levels are nested") {
  Mesh coarse = build_triangle_grid(1);
  for (int level = 2; level <= 5; ++level) {
    const Mesh fine = build_triangle_grid(level);
    std::set<std::pair<double, double>> fine_pts;
    for (Point p : fine.vertices) fine_pts.emplace(p.x, p.y);
    for (Point p : coarse.vertices) CHECK(fine_pts.count({p.x, p.y}) == 1);
    coarse = fine;
  }
}

TEST_CASE("polygon family") {
  double prev_h = 0.0;
  for (int level = 1; level <= 6; ++level) {
    CAPTURE(level);
    const Mesh m = build_polygon_grid(level);
    const ValidationReport report = validate(m);
    CHECK_MESSAGE(report.ok(), report.to_string());
    CHECK(area_sum(m) == doctest::Approx(1.0).epsilon(1e-12));
    int interior = 0;
    for (int c = 0; c < m.num_cells(); ++c) {
      if (!is_interior(m, c)) continue;
      ++interior;
      CHECK(m.cells[c].size() >= 5);
    }
    if (level >= 2) CHECK(interior > 0);
    if (prev_h > 0.0) CHECK(std::abs(m.h_max / prev_h - 0.5) <= 1e-12);
    prev_h = m.h_max;
  }
}

TEST_CASE("generated meshes satisfy every invariant") {
  for (int level = 1; level <= 6; ++level) {
    CAPTURE(level);
    const Mesh m = build_triangle_grid(level);
    CHECK(validate(m).ok());
    CHECK(area_sum(m) == doctest::Approx(1.0).epsilon(1e-12));
    double h = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) h = std::max(h, m.cell_geometry(c).diameter);
    CHECK(m.h_max == h);
  }
}

TEST_CASE("cell geometry closes up") {
  for (const Mesh& m : {build_triangle_grid(3), build_polygon_grid(3)}) {
    for (int c = 0; c < m.num_cells(); ++c) {
      const CellGeometry g = m.cell_geometry(c);
      Point sum{};
      for (const EdgeGeometry& e : g.edges) {
        CHECK(std::hypot(e.normal.x, e.normal.y) == doctest::Approx(1.0).epsilon(1e-14));
        sum = sum + e.length * e.normal;
      }
      CHECK(std::abs(sum.x) < 1e-14);
      CHECK(std::abs(sum.y) < 1e-14);
      // Outward: the normal points away from the centroid.
      for (const EdgeGeometry& e : g.edges) CHECK(dot(e.normal, e.midpoint - g.centroid) > 0.0);
    }
  }
}

TEST_CASE("canonical edge orientation and signs") {
  const Mesh m = build_polygon_grid(2);
  for (const Edge& e : m.edges) CHECK(e.v[0] < e.v[1]);
  for (const Cell& c : m.cells) {
    for (int i = 0; i < c.size(); ++i) {
      const int a = c.vertices[i], b = c.vertices[(i + 1) % c.size()];
      const Edge& e = m.edges[c.edges[i]];
      CHECK(std::min(a, b) == e.v[0]);
      CHECK(std::max(a, b) == e.v[1]);
      CHECK(c.sign[i] == (a < b ? 1 : -1));
    }
  }
}

TEST_CASE("validation defects") {
  const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};

  SUBCASE("reversed loop") {
    const Mesh m = Mesh::from_polygons(square, {{0, 1, 2}, {0, 3, 2}});
    const ValidationReport r = validate(m);
    CHECK(r.has(DefectKind::Orientation, 1));
    CHECK_FALSE(r.has(DefectKind::Orientation, 0));
  }

  SUBCASE("dangling edge") {
    Mesh m = Mesh::from_polygons(square, {{0, 1, 2}, {0, 2, 3}});
    m.edges.push_back(Edge{{1, 3}, false});
    const ValidationReport r = validate(m);
    CHECK(r.has(DefectKind::Incidence, m.num_edges() - 1));
    CHECK_FALSE(r.ok());
  }

  SUBCASE("wrong boundary flag") {
    Mesh m = build_triangle_grid(1);
    int diagonal = -1;
    for (int e = 0; e < m.num_edges(); ++e)
      if (!m.edges[e].boundary) diagonal = e;
    m.edges[diagonal].boundary = true;
    CHECK(validate(m).has(DefectKind::BoundaryFlag, diagonal));
  }

  SUBCASE("self-intersecting loop") {
    const Mesh m = Mesh::from_polygons(square, {{0, 2, 1, 3}});
    CHECK_FALSE(validate(m).ok());
    CHECK(validate(m).has(DefectKind::NonSimple, 0));
  }

  SUBCASE("stale h_max") {
    Mesh m = build_triangle_grid(2);
    m.h_max *= 2.0;
    CHECK(validate(m).has(DefectKind::Diameter, -1));
  }

  SUBCASE("vertex index out of range") {
    Mesh m = build_triangle_grid(1);
    m.cells[0].vertices[1] = 17;
    CHECK(validate(m).has(DefectKind::IndexRange, 0));
  }

  SUBCASE("report text lists each defect") {
    const Mesh m = Mesh::from_polygons(square, {{0, 1, 2}, {0, 3, 2}});
    const ValidationReport r = validate(m);
    const std::string text = r.to_string();
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(r.defects.size()));
  }
}

TEST_CASE("mesh text format") {
  SUBCASE("level 1 layout") {
    const std::string text = save_mesh(build_triangle_grid(1));
    CHECK(text.rfind("wgmesh 1\n", 0) == 0);
    CHECK(numeric_lines_with_fields(text, 2) == 4);
    CHECK(numeric_lines_with_fields(text, 4) == 2);
  }

  SUBCASE("round trip is exact") {
    for (const Mesh& m : {build_polygon_grid(2), build_triangle_grid(4)}) {
      const Mesh back = load_mesh(save_mesh(m));
      REQUIRE(back.num_vertices() == m.num_vertices());
      for (int v = 0; v < m.num_vertices(); ++v) {
        CHECK(std::memcmp(&back.vertices[v].x, &m.vertices[v].x, sizeof(double)) == 0);
        CHECK(std::memcmp(&back.vertices[v].y, &m.vertices[v].y, sizeof(double)) == 0);
      }
      REQUIRE(back.num_cells() == m.num_cells());
      for (int c = 0; c < m.num_cells(); ++c) {
        CHECK(back.cells[c].vertices == m.cells[c].vertices);
        CHECK(back.cells[c].edges == m.cells[c].edges);
        CHECK(back.cells[c].sign == m.cells[c].sign);
      }
      CHECK(back.h_max == m.h_max);
    }
  }

  SUBCASE("comments and blank lines") {
    const Mesh m = load_mesh("# unit square\nwgmesh 1\n\nV 4\n0 0\n1 0 # corner\n1 1\n0 1\nC 1\n4 0 1 2 3\n");
    CHECK(m.num_cells() == 1);
    CHECK(m.num_edges() == 4);
  }

  SUBCASE("out-of-range index names its line") {
    const std::string text =
        "wgmesh 1\nV 5\n0 0\n1 0\n1 1\n0.5 1.5\n0 1\nC 1\n5 0 1 2 3 5\n";
    try {
      load_mesh(text);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 9);
      CHECK(e.code() == ErrorCode::Parse);
    }
  }

  SUBCASE("malformed input") {
    CHECK_THROWS_AS(load_mesh("wgmesh 2\nV 0\nC 0\n"), ParseError);
    CHECK_THROWS_AS(load_mesh("wgmesh 1\nV 3\n0 0\n1 0\n"), ParseError);
    CHECK_THROWS_AS(load_mesh("wgmesh 1\nV 3\n0 0\n1 x\n0 1\nC 1\n3 0 1 2\n"), ParseError);
    CHECK_THROWS_AS(load_mesh("wgmesh 1\nV 3\n0 0\n1 0\n0 1\nC 1\n3 0 1 2\nextra\n"), ParseError);
  }

  SUBCASE("loaded meshes are validated") {
    try {
      load_mesh("wgmesh 1\nV 3\n0 0\n1 0\n0 1\nC 1\n3 0 2 1\n");
      FAIL("expected a validation error");
    } catch (const ParseError&) {
      FAIL("clockwise loop is well-formed text");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Validation);
    }
  }

  SUBCASE("files") {
    const auto path = std::filesystem::temp_directory_path() / "wgpoly_mesh_roundtrip.wgmesh";
    const Mesh m = build_polygon_grid(1);
    save_mesh_file(m, path.string());
    CHECK(save_mesh(load_mesh_file(path.string())) == save_mesh(m));
    std::filesystem::remove(path);
    try {
      load_mesh_file((std::filesystem::temp_directory_path() / "wgpoly_missing" / "x.wgmesh").string());
      FAIL("expected an I/O error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Io);
    }
  }
}
