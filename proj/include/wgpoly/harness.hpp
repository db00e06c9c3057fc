// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wgpoly {

enum class Family { Triangle, Polygon, File };
enum class OutputFormat { Csv, Markdown };

struct StudyConfig {
  Family family = Family::Triangle;
  std::string mesh_path;      // Family::File only
  int k = 1;
  std::optional<int> j;       // unset: per-cell default_weak_degree
  int level_min = 1;
  int level_max = 1;
  double tol = 1e-12;
  OutputFormat format = OutputFormat::Csv;
  std::string exact = "sin";
  bool expect_singular = false;
  std::string export_matrix;  // MatrixMarket path for the finest level, optional
  std::string out;            // output path, empty for stdout
  std::optional<int> max_level;

  /// 8 for k <= 3, 7 above, unless `max_level` overrides it.
  int level_cap() const;
  /// Throws a config error describing the first violated constraint.
  void validate() const;
};

/// Parses `a..b` (or a single level `a`).
std::pair<int, int> parse_level_range(std::string_view text);

/// JSON object with the StudyConfig field names. Throws a config error on
/// unknown keys or bad values.
StudyConfig parse_config_json(std::string_view json);

enum class LevelStatus { Ok, Singular, MaxIterations };

const char* to_string(LevelStatus status);

struct LevelRecord {
  int level = 0;
  int cells = 0;
  int dofs = 0;
  LevelStatus status = LevelStatus::Ok;
  double l2_error = 0.0;
  std::optional<double> l2_rate;
  double energy_error = 0.0;
  std::optional<double> energy_rate;
  int iterations = 0;
  double wall_seconds = 0.0;
};

struct StudyResult {
  StudyConfig config;
  std::vector<LevelRecord> levels;

  /// 0 on success (including expected singularity), 2 when a level is
  /// singular or unconverged unexpectedly, or nonsingular under
  /// `expect_singular`.
  int exit_code() const;
};

StudyResult run_study(const StudyConfig& config);

/// One row of a weak-gradient degree sweep at a fixed level.
struct SweepRecord {
  int j = 0;
  LevelRecord record;
};

/// Solves at `config.level_max` for every j in [j_min, j_max], ignoring
/// `config.j`. Singular outcomes are recorded, not thrown.
std::vector<SweepRecord> run_j_sweep(const StudyConfig& config, int j_min, int j_max);

/// CSV: `j,level,cells,dofs,l2_error,energy_error,iterations,status`.
std::string emit_sweep(std::span<const SweepRecord> records);

/// rate_i = log2(e_{i-1} / e_i); one entry fewer than the input. Throws
/// `NonPositive`.
std::vector<double> compute_rates(std::span<const double> errors);

/// 4 significant digits in the 0.dddd E+-xx style, e.g. 0.4295E-03.
std::string format_error(double value);

/// CSV: `level,cells,dofs,l2_error,l2_rate,energy_error,energy_rate,status`.
/// Markdown: one row per level under a caption line.
std::string emit_table(std::span<const LevelRecord> records, OutputFormat format,
                       std::string_view caption = {});
std::string emit_table(const StudyResult& result);

/// Inverse of the CSV emitter at printed precision.
std::vector<LevelRecord> parse_csv(std::string_view text);

}  // namespace wgpoly
