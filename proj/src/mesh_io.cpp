// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "wgpoly/error.hpp"
#include "wgpoly/mesh.hpp"

namespace wgpoly {

namespace {

/// Splits the input into significant lines: comments stripped, blanks dropped.
struct LineReader {
  std::string_view text;
  std::size_t pos = 0;
  int line_no = 0;

  bool next(std::vector<std::string_view>& tokens) {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      tokens.clear();
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
      }
      if (!tokens.empty()) return true;
    }
    ++line_no;
    return false;
  }
};

template <class T>
T parse_number(std::string_view tok, int line) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError(line, "invalid number '" + std::string(tok) + "'");
  return value;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

Mesh load_mesh(std::string_view text) {
  LineReader in{text};
  std::vector<std::string_view> tok;
  if (!in.next(tok) || tok.size() != 2 || tok[0] != "wgmesh" || tok[1] != "1")
    throw ParseError(in.line_no, "expected header 'wgmesh 1'");

  if (!in.next(tok) || tok.size() != 2 || tok[0] != "V")
    throw ParseError(in.line_no, "expected 'V <count>'");
  const int nv = parse_number<int>(tok[1], in.line_no);
  if (nv < 0) throw ParseError(in.line_no, "negative vertex count");
  std::vector<Point> vertices(nv);
  for (int i = 0; i < nv; ++i) {
    if (!in.next(tok)) throw ParseError(in.line_no, "unexpected end of file in vertex block");
    if (tok.size() != 2) throw ParseError(in.line_no, "vertex line needs 2 coordinates");
    vertices[i] = {parse_number<double>(tok[0], in.line_no), parse_number<double>(tok[1], in.line_no)};
  }

  if (!in.next(tok) || tok.size() != 2 || tok[0] != "C")
    throw ParseError(in.line_no, "expected 'C <count>'");
  const int nc = parse_number<int>(tok[1], in.line_no);
  if (nc < 0) throw ParseError(in.line_no, "negative cell count");
  std::vector<std::vector<int>> loops(nc);
  for (int c = 0; c < nc; ++c) {
    if (!in.next(tok)) throw ParseError(in.line_no, "unexpected end of file in cell block");
    const int n = parse_number<int>(tok[0], in.line_no);
    if (n < 3) throw ParseError(in.line_no, "cell needs at least 3 vertices");
    if (static_cast<int>(tok.size()) != n + 1)
      throw ParseError(in.line_no, "cell declares " + std::to_string(n) + " vertices but lists " +
                                       std::to_string(tok.size() - 1));
    loops[c].resize(n);
    for (int i = 0; i < n; ++i) {
      const int v = parse_number<int>(tok[i + 1], in.line_no);
      if (v < 0 || v >= nv)
        throw ParseError(in.line_no, "vertex index " + std::to_string(v) + " out of range");
      loops[c][i] = v;
    }
  }
  if (in.next(tok)) throw ParseError(in.line_no, "trailing content after cell block");

  Mesh mesh = Mesh::from_polygons(std::move(vertices), loops);
  if (auto report = validate(mesh); !report.ok())
    throw Error(ErrorCode::Validation, "mesh failed validation:\n" + report.to_string());
  return mesh;
}

std::string save_mesh(const Mesh& mesh) {
  std::string out = "wgmesh 1\nV " + std::to_string(mesh.num_vertices()) + "\n";
  for (const auto& p : mesh.vertices) {
    append_double(out, p.x);
    out += ' ';
    append_double(out, p.y);
    out += '\n';
  }
  out += "C " + std::to_string(mesh.num_cells()) + "\n";
  for (const auto& c : mesh.cells) {
    out += std::to_string(c.size());
    for (int v : c.vertices) out += ' ' + std::to_string(v);
    out += '\n';
  }
  return out;
}

Mesh load_mesh_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open mesh file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_mesh(buf.str());
}

void save_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write mesh file '" + path + "'");
  out << save_mesh(mesh);
}

}  // namespace wgpoly
