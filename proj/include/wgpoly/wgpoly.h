/* SPDX-License-Identifier: Apache-2.0 */
/*
 * C interface to the wgpoly stabilizer-free weak Galerkin solver.
 *
 * Every function returns a wgp_status. On failure the message is available
 * from wgp_last_error() until the next call on the same thread. Objects are
 * opaque handles released with their matching *_free function; strings
 * returned through char** are released with wgp_string_free.
 */
#ifndef WGPOLY_WGPOLY_H
#define WGPOLY_WGPOLY_H

#include <stddef.h>

#if defined(WGPOLY_BUILDING_LIBRARY)
#define WGP_API __attribute__((visibility("default")))
#else
#define WGP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wgp_status {
  WGP_OK = 0,
  WGP_ERR_INVALID_ARGUMENT = 1,
  WGP_ERR_PARSE = 2,
  WGP_ERR_VALIDATION = 3,
  WGP_ERR_CONFIG = 4,
  WGP_ERR_NON_TRIANGLE_CELL = 5,
  WGP_ERR_DEGENERATE_CELL = 6,
  WGP_ERR_GRAM_SINGULAR = 7,
  WGP_ERR_DIMENSION_MISMATCH = 8,
  WGP_ERR_DEGENERATE_INPUT = 9,
  WGP_ERR_NON_POSITIVE = 10,
  WGP_ERR_IO = 11,
  WGP_ERR_INTERNAL = 12
} wgp_status;

typedef enum wgp_family {
  WGP_FAMILY_TRIANGLE = 0,
  WGP_FAMILY_POLYGON = 1,
  WGP_FAMILY_FILE = 2
} wgp_family;

typedef enum wgp_format { WGP_FORMAT_CSV = 0, WGP_FORMAT_MARKDOWN = 1 } wgp_format;

typedef enum wgp_level_status {
  WGP_LEVEL_OK = 0,
  WGP_LEVEL_SINGULAR = 1,
  WGP_LEVEL_MAX_ITERATIONS = 2
} wgp_level_status;

/* j value meaning "choose per cell" (n + k - 1, or k + 1 on triangles). */
#define WGP_J_AUTO (-1)

typedef struct wgp_mesh wgp_mesh;
typedef struct wgp_config wgp_config;
typedef struct wgp_study wgp_study;

typedef struct wgp_level_record {
  int level;
  int cells;
  int dofs;
  wgp_level_status status;
  double l2_error;
  double l2_rate;     /* NaN when undefined */
  double energy_error;
  double energy_rate; /* NaN when undefined */
  int iterations;
  double wall_seconds;
} wgp_level_record;

WGP_API const char* wgp_version(void);
WGP_API const char* wgp_last_error(void);
WGP_API const char* wgp_status_name(wgp_status status);
WGP_API void wgp_string_free(char* s);

/* Meshes */
WGP_API wgp_status wgp_mesh_triangle_grid(int level, wgp_mesh** out);
WGP_API wgp_status wgp_mesh_polygon_grid(int level, wgp_mesh** out);
WGP_API wgp_status wgp_mesh_refine(const wgp_mesh* mesh, wgp_mesh** out);
WGP_API wgp_status wgp_mesh_load(const char* text, wgp_mesh** out);
WGP_API wgp_status wgp_mesh_load_file(const char* path, wgp_mesh** out);
WGP_API wgp_status wgp_mesh_save(const wgp_mesh* mesh, char** text);
WGP_API wgp_status wgp_mesh_save_file(const wgp_mesh* mesh, const char* path);
WGP_API wgp_status wgp_mesh_counts(const wgp_mesh* mesh, int* vertices, int* edges, int* cells);
WGP_API wgp_status wgp_mesh_h_max(const wgp_mesh* mesh, double* h_max);
/* Number of defects; the textual report (may be NULL) lists one per line. */
WGP_API wgp_status wgp_mesh_validate(const wgp_mesh* mesh, int* defects, char** report);
WGP_API void wgp_mesh_free(wgp_mesh* mesh);

/* Study configuration */
WGP_API wgp_status wgp_config_new(wgp_config** out);
WGP_API wgp_status wgp_config_from_json(const char* json, wgp_config** out);
WGP_API wgp_status wgp_config_set_family(wgp_config* cfg, wgp_family family);
WGP_API wgp_status wgp_config_set_mesh_path(wgp_config* cfg, const char* path);
WGP_API wgp_status wgp_config_set_k(wgp_config* cfg, int k);
WGP_API wgp_status wgp_config_set_j(wgp_config* cfg, int j);
WGP_API wgp_status wgp_config_set_levels(wgp_config* cfg, int first, int last);
WGP_API wgp_status wgp_config_set_levels_text(wgp_config* cfg, const char* range);
WGP_API wgp_status wgp_config_set_max_level(wgp_config* cfg, int max_level);
WGP_API wgp_status wgp_config_set_tol(wgp_config* cfg, double tol);
WGP_API wgp_status wgp_config_set_format(wgp_config* cfg, wgp_format format);
WGP_API wgp_status wgp_config_set_exact(wgp_config* cfg, const char* id);
WGP_API wgp_status wgp_config_set_expect_singular(wgp_config* cfg, int expect);
WGP_API wgp_status wgp_config_set_export_matrix(wgp_config* cfg, const char* path);
WGP_API wgp_status wgp_config_set_out(wgp_config* cfg, const char* path);
/* Output path from the config, "" when unset. Valid while cfg lives. */
WGP_API const char* wgp_config_out(const wgp_config* cfg);
WGP_API wgp_status wgp_config_validate(const wgp_config* cfg);
WGP_API void wgp_config_free(wgp_config* cfg);

/* Convergence studies */
WGP_API wgp_status wgp_study_run(const wgp_config* cfg, wgp_study** out);
WGP_API int wgp_study_num_levels(const wgp_study* study);
WGP_API wgp_status wgp_study_level(const wgp_study* study, int index, wgp_level_record* out);
WGP_API wgp_status wgp_study_emit(const wgp_study* study, char** text);
/* 0 on success, 2 on unexpected singularity or non-convergence. */
WGP_API int wgp_study_exit_code(const wgp_study* study);
WGP_API void wgp_study_free(wgp_study* study);

/* Solves at the config's last level once per j in [j_min, j_max] and returns
   the CSV table (j,level,cells,dofs,l2_error,energy_error,iterations,status).
   The config's own j is ignored. Free the text with wgp_string_free. */
WGP_API wgp_status wgp_j_sweep(const wgp_config* cfg, int j_min, int j_max, char** csv);

/* rates[i] = log2(errors[i] / errors[i + 1]); rates holds n - 1 entries. */
WGP_API wgp_status wgp_compute_rates(const double* errors, size_t n, double* rates);

#ifdef __cplusplus
}
#endif

#endif /* WGPOLY_WGPOLY_H */
