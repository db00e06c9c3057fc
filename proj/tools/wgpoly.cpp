// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Talks to the solver only through the C API.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wgpoly/wgpoly.h"

namespace {

constexpr int kExitConfig = 1;

struct ConfigDeleter {
  void operator()(wgp_config* c) const { wgp_config_free(c); }
};
struct StudyDeleter {
  void operator()(wgp_study* s) const { wgp_study_free(s); }
};
struct MeshDeleter {
  void operator()(wgp_mesh* m) const { wgp_mesh_free(m); }
};
struct StringDeleter {
  void operator()(char* s) const { wgp_string_free(s); }
};

using ConfigPtr = std::unique_ptr<wgp_config, ConfigDeleter>;
using StudyPtr = std::unique_ptr<wgp_study, StudyDeleter>;
using MeshPtr = std::unique_ptr<wgp_mesh, MeshDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

bool check(wgp_status status) {
  if (status == WGP_OK) return true;
  std::cerr << "wgpoly: " << wgp_status_name(status) << ": " << wgp_last_error() << '\n';
  return false;
}

bool write_output(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::fputs(text, stdout);
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "wgpoly: cannot write '" << path << "'\n";
    return false;
  }
  out << text;
  return static_cast<bool>(out);
}

struct StudyArgs {
  std::string config_path;
  std::string family = "triangle";
  std::string mesh;
  int k = 1;
  std::string j = "auto";
  std::string levels = "1..1";
  int max_level = 0;
  double tol = 1e-12;
  std::string format = "csv";
  std::string exact = "sin";
  std::string out;
  std::string export_matrix;
  bool expect_singular = false;
};

/// Builds the config from --config plus explicitly given flags. Returns
/// nullptr after printing a diagnostic.
ConfigPtr build_config(const StudyArgs& args, const CLI::App& cmd) {
  auto given = [&](const char* name) {
    const CLI::Option* opt = cmd.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  wgp_config* raw = nullptr;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      std::cerr << "wgpoly: cannot read config '" << args.config_path << "'\n";
      return nullptr;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    if (!check(wgp_config_from_json(buf.str().c_str(), &raw))) return nullptr;
  } else if (!check(wgp_config_new(&raw))) {
    return nullptr;
  }
  ConfigPtr cfg(raw);

  bool ok = true;
  const bool from_file = !args.config_path.empty();
  if (!from_file || given("--family")) {
    if (args.family == "triangle") ok &= check(wgp_config_set_family(cfg.get(), WGP_FAMILY_TRIANGLE));
    else if (args.family == "polygon") ok &= check(wgp_config_set_family(cfg.get(), WGP_FAMILY_POLYGON));
    else ok &= check(wgp_config_set_mesh_path(cfg.get(), args.family.c_str()));
  }
  if (given("--mesh")) ok &= check(wgp_config_set_mesh_path(cfg.get(), args.mesh.c_str()));
  if (!from_file || given("--k")) ok &= check(wgp_config_set_k(cfg.get(), args.k));
  if (!from_file || given("--j")) {
    if (args.j == "auto") {
      ok &= check(wgp_config_set_j(cfg.get(), WGP_J_AUTO));
    } else {
      try {
        std::size_t pos = 0;
        const int j = std::stoi(args.j, &pos);
        if (pos != args.j.size() || j < 0) throw std::invalid_argument("j");
        ok &= check(wgp_config_set_j(cfg.get(), j));
      } catch (const std::exception&) {
        std::cerr << "wgpoly: --j must be a nonnegative integer or 'auto'\n";
        return nullptr;
      }
    }
  }
  if (!from_file || given("--levels")) ok &= check(wgp_config_set_levels_text(cfg.get(), args.levels.c_str()));
  if (given("--max-level")) ok &= check(wgp_config_set_max_level(cfg.get(), args.max_level));
  if (!from_file || given("--tol")) ok &= check(wgp_config_set_tol(cfg.get(), args.tol));
  if (!from_file || given("--format"))
    ok &= check(wgp_config_set_format(cfg.get(), args.format == "markdown" ? WGP_FORMAT_MARKDOWN : WGP_FORMAT_CSV));
  if (!from_file || given("--exact")) ok &= check(wgp_config_set_exact(cfg.get(), args.exact.c_str()));
  if (given("--expect-singular")) ok &= check(wgp_config_set_expect_singular(cfg.get(), 1));
  if (given("--export-matrix")) ok &= check(wgp_config_set_export_matrix(cfg.get(), args.export_matrix.c_str()));
  if (given("--out")) ok &= check(wgp_config_set_out(cfg.get(), args.out.c_str()));
  if (!ok) return nullptr;
  return cfg;
}

void add_config_options(CLI::App& cmd, StudyArgs& args) {
  cmd.add_option("--config", args.config_path, "JSON config file (flags override its fields)");
  cmd.add_option("--family", args.family, "triangle | polygon | <mesh file>");
  cmd.add_option("--mesh", args.mesh, "Mesh file in wgmesh format (refined uniformly per level)");
  cmd.add_option("--k", args.k, "Polynomial degree of v0 and vb");
  cmd.add_option("--levels", args.levels, "Inclusive level range a..b");
  cmd.add_option("--max-level", args.max_level, "Override the level cap");
  cmd.add_option("--tol", args.tol, "Relative residual tolerance for CG");
  cmd.add_option("--exact", args.exact, "Exact solution id");
  cmd.add_option("--out", args.out, "Output file (stdout when omitted)");
}

int run_study(const StudyArgs& args, const CLI::App& cmd) {
  ConfigPtr cfg = build_config(args, cmd);
  if (!cfg || !check(wgp_config_validate(cfg.get()))) return kExitConfig;

  wgp_study* study_raw = nullptr;
  if (!check(wgp_study_run(cfg.get(), &study_raw))) return kExitConfig;
  StudyPtr study(study_raw);

  char* text_raw = nullptr;
  if (!check(wgp_study_emit(study.get(), &text_raw))) return kExitConfig;
  StringPtr text(text_raw);
  if (!write_output(wgp_config_out(cfg.get()), text.get())) return kExitConfig;

  const int code = wgp_study_exit_code(study.get());
  if (code != 0) std::cerr << "wgpoly: study outcome did not match expectation (singular or unconverged level)\n";
  return code;
}

int run_sweep(const StudyArgs& args, const CLI::App& cmd, const std::string& j_range) {
  ConfigPtr cfg = build_config(args, cmd);
  if (!cfg) return kExitConfig;
  int j_min = 0, j_max = 0;
  const auto dots = j_range.find("..");
  try {
    std::size_t pos = 0;
    if (dots == std::string::npos) {
      j_min = j_max = std::stoi(j_range, &pos);
      if (pos != j_range.size()) throw std::invalid_argument("j");
    } else {
      j_min = std::stoi(j_range.substr(0, dots), &pos);
      if (pos != dots) throw std::invalid_argument("j");
      const std::string tail = j_range.substr(dots + 2);
      j_max = std::stoi(tail, &pos);
      if (pos != tail.size()) throw std::invalid_argument("j");
    }
  } catch (const std::exception&) {
    std::cerr << "wgpoly: --j-range must be a..b\n";
    return kExitConfig;
  }
  char* text_raw = nullptr;
  if (!check(wgp_j_sweep(cfg.get(), j_min, j_max, &text_raw))) return kExitConfig;
  StringPtr text(text_raw);
  return write_output(wgp_config_out(cfg.get()), text.get()) ? 0 : kExitConfig;
}

int run_mesh(const std::string& family, int level, const std::string& out) {
  wgp_mesh* raw = nullptr;
  const wgp_status st = family == "polygon" ? wgp_mesh_polygon_grid(level, &raw)
                                            : wgp_mesh_triangle_grid(level, &raw);
  if (!check(st)) return kExitConfig;
  MeshPtr mesh(raw);
  char* text_raw = nullptr;
  if (!check(wgp_mesh_save(mesh.get(), &text_raw))) return kExitConfig;
  StringPtr text(text_raw);
  return write_output(out, text.get()) ? 0 : kExitConfig;
}

int run_validate(const std::string& path) {
  wgp_mesh* raw = nullptr;
  if (!check(wgp_mesh_load_file(path.c_str(), &raw))) return kExitConfig;
  MeshPtr mesh(raw);
  int vertices = 0, edges = 0, cells = 0;
  double h = 0.0;
  wgp_mesh_counts(mesh.get(), &vertices, &edges, &cells);
  wgp_mesh_h_max(mesh.get(), &h);
  std::printf("ok: %d vertices, %d edges, %d cells, h_max %.6g\n", vertices, edges, cells, h);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilizer-free weak Galerkin solver for the Poisson equation on polygonal meshes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wgp_version());

  StudyArgs args;
  auto* study = app.add_subcommand("study", "Run a convergence study over refinement levels");
  add_config_options(*study, args);
  study->add_option("--j", args.j, "Weak gradient degree, or 'auto'");
  study->add_option("--format", args.format, "csv | markdown")->check(CLI::IsMember({"csv", "markdown"}));
  study->add_option("--export-matrix", args.export_matrix, "Write the finest-level matrix in MatrixMarket format");
  study->add_flag("--expect-singular", args.expect_singular, "Singular systems are the expected outcome");

  StudyArgs sweep_args;
  std::string j_range;
  auto* sweep = app.add_subcommand("sweep", "Solve at the last level of --levels for each weak gradient degree");
  add_config_options(*sweep, sweep_args);
  sweep->add_option("--j-range", j_range, "Inclusive range of j values a..b")->required();

  std::string mesh_family = "triangle", mesh_out;
  int mesh_level = 1;
  auto* mesh = app.add_subcommand("mesh", "Write a generated mesh in wgmesh format");
  mesh->add_option("--family", mesh_family, "triangle | polygon")->check(CLI::IsMember({"triangle", "polygon"}));
  mesh->add_option("--level", mesh_level, "Grid level")->required();
  mesh->add_option("--out", mesh_out, "Output file (stdout when omitted)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Load and validate a wgmesh file");
  validate->add_option("file", validate_path, "Mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (study->parsed()) return run_study(args, *study);
  if (sweep->parsed()) return run_sweep(sweep_args, *sweep, j_range);
  if (mesh->parsed()) return run_mesh(mesh_family, mesh_level, mesh_out);
  return run_validate(validate_path);
}
