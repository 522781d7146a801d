#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "roa/attraction.hpp"
#include "roa/families.hpp"
#include "roa/model.hpp"
#include "roa/orbit.hpp"
#include "roa/sweep.hpp"

namespace roa::cli {

/// Malformed or invalid configuration. `line`/`column` are 1-based and 0
/// when the error is not tied to a text position.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
  [[nodiscard]] std::size_t line() const noexcept { return line_; }
  [[nodiscard]] std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct ModelConfig {
  /// swing | scalar-cubic | linear | file
  std::string name = "swing";
  double tau = 20.0;
  double a = 0.05;
  double a_tilde = 0.125;
  double w = 0.5;
  /// linear model ẋ = lin_a x + lin_b x(t−τ)
  double lin_a = 0.0;
  double lin_b = -1.0;
  std::string file;
  bool operator==(const ModelConfig&) const = default;
};

struct TablePieceConfig {
  double from = 0.0;
  double to = 0.0;
  std::vector<double> coeffs;
  bool operator==(const TablePieceConfig&) const = default;
};

struct FamilyConfig {
  std::string shape = "constant";
  double omega = 0.0;
  int degree = 1;
  /// Apply the shape to every component with one parameter each instead of
  /// the model-aware layout.
  bool scalar = false;
  std::vector<TablePieceConfig> table;
  bool operator==(const FamilyConfig&) const = default;
};

inline FamilyConfig family_config(std::string shape) {
  FamilyConfig f;
  f.shape = std::move(shape);
  return f;
}

struct PixelMapConfig {
  bool enabled = false;
  std::size_t family = 0;
  double p1_min = -1.5, p1_max = 1.5;
  double p2_min = -1.5, p2_max = 1.5;
  std::size_t resolution = 41;
  bool operator==(const PixelMapConfig&) const = default;
};

struct ScanOptions {
  int directions = 32;
  double radial_step = 0.05;
  double radial_tol = 1e-3;
  double max_radius = 20.0;
  std::vector<std::vector<double>> direction_list;
  bool use_symmetry = true;
  bool compute_secondary = true;
  PixelMapConfig pixel_map;
  bool operator==(const ScanOptions&) const = default;
};

struct SimulateOptions {
  std::size_t family = 0;
  std::vector<double> params = {0.1, 0.0};
  std::size_t csv_points = 2001;
  bool operator==(const SimulateOptions&) const = default;
};

struct SpectrumOptions {
  double tau_max = 25.0;
  int n_cheb = 32;
  int branches = 4;
  std::size_t roots = 6;
  bool operator==(const SpectrumOptions&) const = default;
};

struct OrbitOptions {
  /// Target delay; 0 uses the model delay.
  double tau = 0.0;
  int intervals = 40;
  int degree = 4;
  double initial_step = 0.05;
  double min_step = 1e-4;
  double max_step = 0.25;
  std::size_t phases = 256;
  bool operator==(const OrbitOptions&) const = default;
};

struct BasinOptions {
  std::size_t family = 0;
  double radius = 1.0;
  std::size_t samples = 1000;
  bool operator==(const BasinOptions&) const = default;
};

struct SweepOptions {
  double tau_max = 20.0;
  double tau_step = 0.5;
  bool operator==(const SweepOptions&) const = default;
};

struct RunConfig {
  ModelConfig model;
  /// c | m2 | q
  std::string norm = "q";
  int grid_density = 128;
  double rtol = 1e-6;
  double atol = 1e-9;
  double max_step = 0.0;
  double delta_num = 0.05;
  double horizon = 0.0;
  double trend_window = 5.0;
  double min_trend_time = 20.0;
  std::vector<FamilyConfig> families = {family_config("constant"), family_config("jump"), family_config("cosine"),
                                       family_config("sine")};
  ScanOptions scan;
  SimulateOptions simulate;
  SpectrumOptions spectrum;
  OrbitOptions orbit;
  BasinOptions basin;
  SweepOptions sweep;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string out = "roa_out";
  bool operator==(const RunConfig&) const = default;
};

/// Parses a JSON config. Missing keys keep their defaults; unknown keys,
/// wrong types and syntax errors raise ConfigError (with position for
/// syntax errors).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Canonical JSON (sorted keys, two-space indent); parse_config inverts it.
std::string dump_config(const RunConfig& cfg);
/// 64-bit FNV-1a of the canonical JSON, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Semantic checks that need no computation (ranges, family indices).
void validate_config(const RunConfig& cfg);

Model build_model(const RunConfig& cfg);
NormSpace build_space(const RunConfig& cfg, const Model& model);
SimulationSettings build_settings(const RunConfig& cfg, const Model& model);
FamilySpec build_family(const FamilyConfig& fc, const Model& model);
ScanConfig build_scan(const RunConfig& cfg, const Model& model);

/// Built-in configurations: example1, fig3, fig4, fig5, fig7.
RunConfig preset(const std::string& name);
const std::vector<std::string>& preset_names();

}  // namespace roa::cli
