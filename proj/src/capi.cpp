// SPDX-License-Identifier: Apache-2.0
#include "wgpoly/wgpoly.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>
#include <tuple>

#include "wgpoly/error.hpp"
#include "wgpoly/harness.hpp"
#include "wgpoly/mesh.hpp"

struct wgp_mesh {
  wgpoly::Mesh mesh;
};

struct wgp_config {
  wgpoly::StudyConfig config;
};

struct wgp_study {
  wgpoly::StudyResult result;
};

namespace {

thread_local std::string last_error;

wgp_status map_code(wgpoly::ErrorCode code) {
  using wgpoly::ErrorCode;
  switch (code) {
    case ErrorCode::Parse: return WGP_ERR_PARSE;
    case ErrorCode::Validation: return WGP_ERR_VALIDATION;
    case ErrorCode::Config: return WGP_ERR_CONFIG;
    case ErrorCode::NonTriangleCell: return WGP_ERR_NON_TRIANGLE_CELL;
    case ErrorCode::DegenerateCell: return WGP_ERR_DEGENERATE_CELL;
    case ErrorCode::GramSingular: return WGP_ERR_GRAM_SINGULAR;
    case ErrorCode::DimensionMismatch: return WGP_ERR_DIMENSION_MISMATCH;
    case ErrorCode::DegenerateInput: return WGP_ERR_DEGENERATE_INPUT;
    case ErrorCode::NonPositive: return WGP_ERR_NON_POSITIVE;
    case ErrorCode::Io: return WGP_ERR_IO;
  }
  return WGP_ERR_INTERNAL;
}

template <class F>
wgp_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return WGP_OK;
  } catch (const wgpoly::Error& e) {
    last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return WGP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return WGP_ERR_INTERNAL;
  }
}

wgp_status invalid(const char* what) {
  last_error = what;
  return WGP_ERR_INVALID_ARGUMENT;
}

char* duplicate(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Make>
wgp_status make_mesh(wgp_mesh** out, Make&& make) {
  if (!out) return invalid("null output handle");
  *out = nullptr;
  return guarded([&] { *out = new wgp_mesh{make()}; });
}

}  // namespace

extern "C" {

const char* wgp_version(void) { return "0.1.0"; }
const char* wgp_last_error(void) { return last_error.c_str(); }

const char* wgp_status_name(wgp_status status) {
  switch (status) {
    case WGP_OK: return "ok";
    case WGP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WGP_ERR_PARSE: return "parse error";
    case WGP_ERR_VALIDATION: return "validation error";
    case WGP_ERR_CONFIG: return "configuration error";
    case WGP_ERR_NON_TRIANGLE_CELL: return "non-triangle cell";
    case WGP_ERR_DEGENERATE_CELL: return "degenerate cell";
    case WGP_ERR_GRAM_SINGULAR: return "singular Gram matrix";
    case WGP_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case WGP_ERR_DEGENERATE_INPUT: return "degenerate input";
    case WGP_ERR_NON_POSITIVE: return "non-positive value";
    case WGP_ERR_IO: return "I/O error";
    case WGP_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void wgp_string_free(char* s) { delete[] s; }

wgp_status wgp_mesh_triangle_grid(int level, wgp_mesh** out) {
  return make_mesh(out, [&] { return wgpoly::build_triangle_grid(level); });
}

wgp_status wgp_mesh_polygon_grid(int level, wgp_mesh** out) {
  return make_mesh(out, [&] { return wgpoly::build_polygon_grid(level); });
}

wgp_status wgp_mesh_refine(const wgp_mesh* mesh, wgp_mesh** out) {
  if (!mesh) return invalid("null mesh");
  return make_mesh(out, [&] { return wgpoly::refine_uniform(mesh->mesh); });
}

wgp_status wgp_mesh_load(const char* text, wgp_mesh** out) {
  if (!text) return invalid("null text");
  return make_mesh(out, [&] { return wgpoly::load_mesh(text); });
}

wgp_status wgp_mesh_load_file(const char* path, wgp_mesh** out) {
  if (!path) return invalid("null path");
  return make_mesh(out, [&] { return wgpoly::load_mesh_file(path); });
}

wgp_status wgp_mesh_save(const wgp_mesh* mesh, char** text) {
  if (!mesh || !text) return invalid("null argument");
  return guarded([&] { *text = duplicate(wgpoly::save_mesh(mesh->mesh)); });
}

wgp_status wgp_mesh_save_file(const wgp_mesh* mesh, const char* path) {
  if (!mesh || !path) return invalid("null argument");
  return guarded([&] { wgpoly::save_mesh_file(mesh->mesh, path); });
}

wgp_status wgp_mesh_counts(const wgp_mesh* mesh, int* vertices, int* edges, int* cells) {
  if (!mesh) return invalid("null mesh");
  if (vertices) *vertices = mesh->mesh.num_vertices();
  if (edges) *edges = mesh->mesh.num_edges();
  if (cells) *cells = mesh->mesh.num_cells();
  return WGP_OK;
}

wgp_status wgp_mesh_h_max(const wgp_mesh* mesh, double* h_max) {
  if (!mesh || !h_max) return invalid("null argument");
  *h_max = mesh->mesh.h_max;
  return WGP_OK;
}

wgp_status wgp_mesh_validate(const wgp_mesh* mesh, int* defects, char** report) {
  if (!mesh || !defects) return invalid("null argument");
  return guarded([&] {
    const auto r = wgpoly::validate(mesh->mesh);
    *defects = static_cast<int>(r.defects.size());
    if (report) *report = duplicate(r.to_string());
  });
}

void wgp_mesh_free(wgp_mesh* mesh) { delete mesh; }

wgp_status wgp_config_new(wgp_config** out) {
  if (!out) return invalid("null output handle");
  return guarded([&] { *out = new wgp_config{}; });
}

wgp_status wgp_config_from_json(const char* json, wgp_config** out) {
  if (!json || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new wgp_config{wgpoly::parse_config_json(json)}; });
}

#define WGP_CFG_SETTER(name, type, stmt)              \
  wgp_status name(wgp_config* cfg, type value) {      \
    if (!cfg) return invalid("null config");          \
    return guarded([&] { auto& c = cfg->config; stmt; }); \
  }

WGP_CFG_SETTER(wgp_config_set_family, wgp_family,
               if (value < WGP_FAMILY_TRIANGLE || value > WGP_FAMILY_FILE) throw wgpoly::Error(wgpoly::ErrorCode::Config, "unknown family");
               c.family = static_cast<wgpoly::Family>(value))
WGP_CFG_SETTER(wgp_config_set_k, int, c.k = value)
WGP_CFG_SETTER(wgp_config_set_j, int,
               if (value == WGP_J_AUTO) c.j.reset(); else c.j = value)
WGP_CFG_SETTER(wgp_config_set_max_level, int, c.max_level = value)
WGP_CFG_SETTER(wgp_config_set_tol, double, c.tol = value)
WGP_CFG_SETTER(wgp_config_set_format, wgp_format,
               c.format = value == WGP_FORMAT_MARKDOWN ? wgpoly::OutputFormat::Markdown : wgpoly::OutputFormat::Csv)
WGP_CFG_SETTER(wgp_config_set_expect_singular, int, c.expect_singular = value != 0)

#undef WGP_CFG_SETTER

wgp_status wgp_config_set_mesh_path(wgp_config* cfg, const char* path) {
  if (!cfg || !path) return invalid("null argument");
  cfg->config.mesh_path = path;
  cfg->config.family = wgpoly::Family::File;
  return WGP_OK;
}

wgp_status wgp_config_set_levels(wgp_config* cfg, int first, int last) {
  if (!cfg) return invalid("null config");
  cfg->config.level_min = first;
  cfg->config.level_max = last;
  return WGP_OK;
}

wgp_status wgp_config_set_levels_text(wgp_config* cfg, const char* range) {
  if (!cfg || !range) return invalid("null argument");
  return guarded([&] {
    std::tie(cfg->config.level_min, cfg->config.level_max) = wgpoly::parse_level_range(range);
  });
}

wgp_status wgp_config_set_exact(wgp_config* cfg, const char* id) {
  if (!cfg || !id) return invalid("null argument");
  cfg->config.exact = id;
  return WGP_OK;
}

wgp_status wgp_config_set_export_matrix(wgp_config* cfg, const char* path) {
  if (!cfg || !path) return invalid("null argument");
  cfg->config.export_matrix = path;
  return WGP_OK;
}

wgp_status wgp_config_set_out(wgp_config* cfg, const char* path) {
  if (!cfg || !path) return invalid("null argument");
  cfg->config.out = path;
  return WGP_OK;
}

const char* wgp_config_out(const wgp_config* cfg) { return cfg ? cfg->config.out.c_str() : ""; }

wgp_status wgp_config_validate(const wgp_config* cfg) {
  if (!cfg) return invalid("null config");
  return guarded([&] { cfg->config.validate(); });
}

void wgp_config_free(wgp_config* cfg) { delete cfg; }

wgp_status wgp_study_run(const wgp_config* cfg, wgp_study** out) {
  if (!cfg || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] { *out = new wgp_study{wgpoly::run_study(cfg->config)}; });
}

int wgp_study_num_levels(const wgp_study* study) {
  return study ? static_cast<int>(study->result.levels.size()) : 0;
}

wgp_status wgp_study_level(const wgp_study* study, int index, wgp_level_record* out) {
  if (!study || !out) return invalid("null argument");
  if (index < 0 || index >= wgp_study_num_levels(study)) return invalid("level index out of range");
  const auto& r = study->result.levels[index];
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  *out = {r.level,
          r.cells,
          r.dofs,
          static_cast<wgp_level_status>(r.status),
          r.l2_error,
          r.l2_rate.value_or(nan),
          r.energy_error,
          r.energy_rate.value_or(nan),
          r.iterations,
          r.wall_seconds};
  return WGP_OK;
}

wgp_status wgp_study_emit(const wgp_study* study, char** text) {
  if (!study || !text) return invalid("null argument");
  return guarded([&] { *text = duplicate(wgpoly::emit_table(study->result)); });
}

int wgp_study_exit_code(const wgp_study* study) { return study ? study->result.exit_code() : 1; }

void wgp_study_free(wgp_study* study) { delete study; }

wgp_status wgp_j_sweep(const wgp_config* cfg, int j_min, int j_max, char** csv) {
  if (!cfg || !csv) return invalid("null argument");
  *csv = nullptr;
  return guarded([&] { *csv = duplicate(wgpoly::emit_sweep(wgpoly::run_j_sweep(cfg->config, j_min, j_max))); });
}

wgp_status wgp_compute_rates(const double* errors, size_t n, double* rates) {
  if (!errors || (n > 1 && !rates)) return invalid("null argument");
  return guarded([&] {
    const auto r = wgpoly::compute_rates({errors, n});
    std::copy(r.begin(), r.end(), rates);
  });
}

}  // extern "C"
