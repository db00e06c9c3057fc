// SPDX-License-Identifier: Apache-2.0
#include "wgpoly/harness.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "wgpoly/analysis.hpp"
#include "wgpoly/assembly.hpp"
#include "wgpoly/basis.hpp"
#include "wgpoly/error.hpp"
#include "wgpoly/mesh.hpp"
#include "wgpoly/solve.hpp"

namespace wgpoly {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, what); }

int parse_int(std::string_view s, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    config_error(std::string("invalid ") + what + " '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_rate(const std::optional<double>& rate) {
  if (!rate) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *rate);
  return buf;
}

}  // namespace

int StudyConfig::level_cap() const {
  if (max_level) return *max_level;
  return k <= 3 ? 8 : 7;
}

void StudyConfig::validate() const {
  if (k < 1) config_error("k must be at least 1");
  if (k > 10) config_error("k must be at most 10");
  if (level_min < 1 || level_max < level_min)
    config_error("levels must be a nonempty range a..b with 1 <= a <= b");
  if (level_max > level_cap())
    config_error("level " + std::to_string(level_max) + " exceeds the cap " +
                 std::to_string(level_cap()) + " for k = " + std::to_string(k) +
                 " (set max_level to override)");
  if (j) {
    if (*j < 0) config_error("j must be nonnegative or auto");
    if (*j <= k && !expect_singular)
      config_error("j = " + std::to_string(*j) + " <= k is inadmissible; pass --expect-singular to study it");
  }
  if (family == Family::File && mesh_path.empty()) config_error("family 'file' requires a mesh path");
  if (!(tol > 0.0)) config_error("tol must be positive");
  exact_solution(exact);
}

std::pair<int, int> parse_level_range(std::string_view text) {
  if (const auto pos = text.find(".."); pos != std::string_view::npos)
    return {parse_int(text.substr(0, pos), "level"), parse_int(text.substr(pos + 2), "level")};
  const int l = parse_int(text, "level");
  return {l, l};
}

StudyConfig parse_config_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("config JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("config JSON must be an object");
  StudyConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "family") {
        const auto f = value.get<std::string>();
        if (f == "triangle") cfg.family = Family::Triangle;
        else if (f == "polygon") cfg.family = Family::Polygon;
        else if (f == "file") cfg.family = Family::File;
        else {
          cfg.family = Family::File;
          cfg.mesh_path = f;
        }
      } else if (key == "mesh") {
        cfg.mesh_path = value.get<std::string>();
        cfg.family = Family::File;
      } else if (key == "k") {
        cfg.k = value.get<int>();
      } else if (key == "j") {
        if (value.is_string()) {
          if (value.get<std::string>() != "auto") config_error("j must be an integer or \"auto\"");
          cfg.j.reset();
        } else {
          cfg.j = value.get<int>();
        }
      } else if (key == "levels") {
        if (value.is_string()) {
          std::tie(cfg.level_min, cfg.level_max) = parse_level_range(value.get<std::string>());
        } else if (value.is_array() && value.size() == 2) {
          cfg.level_min = value[0].get<int>();
          cfg.level_max = value[1].get<int>();
        } else {
          config_error("levels must be \"a..b\" or [a, b]");
        }
      } else if (key == "tol") {
        cfg.tol = value.get<double>();
      } else if (key == "format") {
        const auto f = value.get<std::string>();
        if (f == "csv") cfg.format = OutputFormat::Csv;
        else if (f == "markdown") cfg.format = OutputFormat::Markdown;
        else config_error("format must be csv or markdown");
      } else if (key == "exact") {
        cfg.exact = value.get<std::string>();
      } else if (key == "expect_singular") {
        cfg.expect_singular = value.get<bool>();
      } else if (key == "export_matrix") {
        cfg.export_matrix = value.get<std::string>();
      } else if (key == "out") {
        cfg.out = value.get<std::string>();
      } else if (key == "max_level") {
        cfg.max_level = value.get<int>();
      } else {
        config_error("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    config_error(std::string("config JSON: ") + e.what());
  }
  return cfg;
}

const char* to_string(LevelStatus status) {
  switch (status) {
    case LevelStatus::Ok: return "ok";
    case LevelStatus::Singular: return "singular";
    case LevelStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

int StudyResult::exit_code() const {
  for (const auto& r : levels) {
    if (config.expect_singular && r.status != LevelStatus::Singular) return 2;
    if (!config.expect_singular && r.status != LevelStatus::Ok) return 2;
  }
  return 0;
}

namespace {

Mesh initial_mesh(const StudyConfig& config, int level) {
  switch (config.family) {
    case Family::Triangle: return build_triangle_grid(level);
    case Family::Polygon: return build_polygon_grid(level);
    case Family::File: {
      Mesh mesh = load_mesh_file(config.mesh_path);
      for (int l = 1; l < level; ++l) mesh = refine_uniform(mesh);
      return mesh;
    }
  }
  return {};
}

Mesh next_mesh(const StudyConfig& config, const Mesh& mesh, int level) {
  if (config.family == Family::Polygon) return build_polygon_grid(level);
  return refine_uniform(mesh);
}

/// Assemble, solve and measure one level; rates are left to the caller.
LevelRecord solve_level(const Mesh& mesh, int level, const StudyConfig& config,
                        const WeakDegreePolicy& policy, const std::string& export_path) {
  const ExactSolution& exact = exact_solution(config.exact);
  LevelRecord rec;
  rec.level = level;
  rec.cells = mesh.num_cells();
  const GlobalSystem sys = assemble(mesh, config.k, policy, exact.f);
  rec.dofs = sys.dofs.total;
  if (!export_path.empty()) {
    std::ofstream out(export_path);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + export_path + "'");
    write_matrix_market(sys.matrix, out);
  }

  SolveOptions opts;
  opts.tol = config.tol;
  opts.block_starts = sys.block_starts;
  const SolveReport report = solve_condensed(sys.matrix, sys.rhs, sys.interior_size, opts);
  rec.iterations = report.iterations;
  switch (report.status) {
    case SolveStatus::Converged: {
      rec.status = LevelStatus::Ok;
      const ErrorReport err = compute_errors(mesh, sys.dofs, sys.expand(report.solution), exact, policy);
      rec.l2_error = err.l2_error;
      rec.energy_error = err.energy_error;
      break;
    }
    case SolveStatus::SingularSystem: rec.status = LevelStatus::Singular; break;
    case SolveStatus::MaxIterations: rec.status = LevelStatus::MaxIterations; break;
  }
  return rec;
}

}  // namespace

StudyResult run_study(const StudyConfig& config) {
  config.validate();
  StudyResult result;
  result.config = config;
  const WeakDegreePolicy policy{config.j};

  Mesh mesh;
  for (int level = config.level_min; level <= config.level_max; ++level) {
    const auto start = std::chrono::steady_clock::now();
    mesh = level == config.level_min ? initial_mesh(config, level) : next_mesh(config, mesh, level);
    LevelRecord rec = solve_level(mesh, level, config, policy,
                                  level == config.level_max ? config.export_matrix : std::string());
    if (!result.levels.empty() && result.levels.back().status == LevelStatus::Ok &&
        rec.status == LevelStatus::Ok) {
      const auto& prev = result.levels.back();
      rec.l2_rate = compute_rates(std::vector<double>{prev.l2_error, rec.l2_error})[0];
      rec.energy_rate = compute_rates(std::vector<double>{prev.energy_error, rec.energy_error})[0];
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.levels.push_back(rec);
  }
  return result;
}

std::vector<SweepRecord> run_j_sweep(const StudyConfig& config, int j_min, int j_max) {
  StudyConfig base = config;
  base.j.reset();
  base.validate();
  if (j_min < 0 || j_max < j_min || j_max > kMaxDegree)
    config_error("j range must satisfy 0 <= a <= b <= " + std::to_string(kMaxDegree));

  const Mesh mesh = initial_mesh(base, base.level_max);
  std::vector<SweepRecord> out;
  for (int j = j_min; j <= j_max; ++j) {
    const auto start = std::chrono::steady_clock::now();
    SweepRecord rec;
    rec.j = j;
    rec.record = solve_level(mesh, base.level_max, base, WeakDegreePolicy{j}, {});
    rec.record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(rec);
  }
  return out;
}

std::string emit_sweep(std::span<const SweepRecord> records) {
  std::ostringstream os;
  os << "j,level,cells,dofs,l2_error,energy_error,iterations,status\n";
  for (const auto& [j, r] : records) {
    const bool ok = r.status == LevelStatus::Ok;
    os << j << ',' << r.level << ',' << r.cells << ',' << r.dofs << ','
       << (ok ? format_error(r.l2_error) : "") << ',' << (ok ? format_error(r.energy_error) : "") << ','
       << r.iterations << ',' << to_string(r.status) << '\n';
  }
  return os.str();
}

std::vector<double> compute_rates(std::span<const double> errors) {
  for (double e : errors)
    if (!(e > 0.0)) throw Error(ErrorCode::NonPositive, "convergence rates need positive errors");
  std::vector<double> rates;
  for (std::size_t i = 1; i < errors.size(); ++i) rates.push_back(std::log2(errors[i - 1] / errors[i]));
  return rates;
}

std::string format_error(double value) {
  if (value == 0.0) return "0.0000E+00";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3E", value);  // d.dddE+xx, correctly rounded
  std::string s(buf);
  const bool negative = s[0] == '-';
  if (negative) s.erase(0, 1);
  const auto epos = s.find('E');
  const int exponent = std::stoi(s.substr(epos + 1)) + 1;
  const std::string digits = s.substr(0, 1) + s.substr(2, 3);
  std::snprintf(buf, sizeof buf, "%s0.%sE%+03d", negative ? "-" : "", digits.c_str(), exponent);
  return buf;
}

std::string emit_table(std::span<const LevelRecord> records, OutputFormat format,
                       std::string_view caption) {
  std::ostringstream os;
  if (format == OutputFormat::Csv) {
    os << "level,cells,dofs,l2_error,l2_rate,energy_error,energy_rate,status\n";
    for (const auto& r : records) {
      const bool ok = r.status == LevelStatus::Ok;
      os << r.level << ',' << r.cells << ',' << r.dofs << ','
         << (ok ? format_error(r.l2_error) : "") << ',' << (ok ? format_rate(r.l2_rate) : "") << ','
         << (ok ? format_error(r.energy_error) : "") << ','
         << (ok ? format_rate(r.energy_rate) : "") << ',' << to_string(r.status) << '\n';
    }
    return os.str();
  }
  os << "| level | ‖u_h − Q₀u‖ | rate | \\|\\|\\|u_h − u\\|\\|\\| | rate |\n";
  os << "|---:|---:|---:|---:|---:|\n";
  if (!caption.empty()) os << "| | " << caption << " | | | |\n";
  for (const auto& r : records) {
    if (r.status == LevelStatus::Ok)
      os << "| " << r.level << " | " << format_error(r.l2_error) << " | " << format_rate(r.l2_rate)
         << " | " << format_error(r.energy_error) << " | " << format_rate(r.energy_rate) << " |\n";
    else
      os << "| " << r.level << " | ⇒ " << to_string(r.status) << " | | | |\n";
  }
  return os.str();
}

std::string emit_table(const StudyResult& result) {
  const auto& c = result.config;
  std::string caption = "by P_" + std::to_string(c.k) + " elements with " +
                        (c.j ? "P_" + std::to_string(*c.j) + "^2"
                              : c.family == Family::Triangle ? "P_" + std::to_string(c.k + 1) + "^2"
                                                             : std::string("P_{n+k-1}^2")) +
                        " weak gradient";
  return emit_table(result.levels, c.format, caption);
}

std::vector<LevelRecord> parse_csv(std::string_view text) {
  std::vector<LevelRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "level,cells,dofs,l2_error,l2_rate,energy_error,energy_rate,status")
    throw ParseError(1, "unexpected CSV header");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw ParseError(line_no, "expected 8 fields");
    LevelRecord r;
    try {
      r.level = parse_int(f[0], "level");
      r.cells = parse_int(f[1], "cells");
      r.dofs = parse_int(f[2], "dofs");
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
    auto num = [&](std::string_view s) { return std::stod(std::string(s)); };
    if (f[7] == "ok") r.status = LevelStatus::Ok;
    else if (f[7] == "singular") r.status = LevelStatus::Singular;
    else if (f[7] == "max_iterations") r.status = LevelStatus::MaxIterations;
    else throw ParseError(line_no, "unknown status '" + std::string(f[7]) + "'");
    if (!f[3].empty()) r.l2_error = num(f[3]);
    if (!f[4].empty()) r.l2_rate = num(f[4]);
    if (!f[5].empty()) r.energy_error = num(f[5]);
    if (!f[6].empty()) r.energy_rate = num(f[6]);
    out.push_back(r);
  }
  return out;
}

}  // namespace wgpoly
