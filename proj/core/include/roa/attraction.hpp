#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "roa/dde_solver.hpp"
#include "roa/families.hpp"
#include "roa/model.hpp"
#include "roa/norms.hpp"

namespace roa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Verdict { Convergent, NonConvergent, Undecided };
std::string to_string(Verdict v);

/// Numerical zero-convergence settings shared by every simulation-based
/// estimate.
struct SimulationSettings {
  NormSpace space;
  double delta_num = 0.05;
  /// 0 selects max(50τ, 100).
  double horizon = 0.0;
  SolverOptions solver;
  /// Trailing window (in delays) for the non-convergence trend test.
  double trend_window = 5.0;
  /// Lower bound on the trend window in time units, so short delays still
  /// cover a few oscillation periods.
  double min_trend_time = 20.0;

  [[nodiscard]] double horizon_for(double tau) const {
    return horizon > 0.0 ? horizon : std::max(50.0 * tau, 100.0);
  }
  void validate(std::size_t dim) const;
};

struct Classification {
  Verdict verdict = Verdict::Undecided;
  double final_norm = 0.0;
  std::string reason;
};

/// Convergent when the stop ball was entered or the trace dropped below
/// δ_num; NonConvergent on blowup, or when the final norm is ≥ δ_num and the
/// trailing trend is non-decreasing (min over the second half of the window
/// ≥ min over the first half); Undecided otherwise. The window spans
/// max(trend_window·τ, min_trend_time).
Classification classify_detailed(const Trajectory& traj, const NormSpace& space, double delta_num,
                                 double trend_window = 5.0, const NormTrace* trace = nullptr,
                                 double min_trend_time = 20.0);
Verdict classify(const Trajectory& traj, const NormSpace& space, double delta_num);

/// Integrates from x_e + φ with the stop ball configured from `settings`.
Trajectory simulate(const Model& model, const Segment& deviation, const SimulationSettings& settings);

struct SecondaryBound {
  double value = kInf;
  std::size_t index = 0;  // trajectory index
  double t = 0.0;
};
/// min over trajectories and t of ‖x_t − x_e‖. Empty input gives +∞.
SecondaryBound secondary_bound(const std::vector<Trajectory>& trajectories, const NormSpace& space);

struct ScanConfig {
  std::vector<FamilySpec> families;
  SimulationSettings sim;
  int directions = 32;
  double radial_step = 0.05;
  double radial_tol = 1e-3;
  double max_radius = 20.0;
  /// Optional explicit unit directions in parameter space (overrides the
  /// automatic set for families of matching parameter dimension).
  std::vector<std::vector<double>> direction_list;
  /// Seed for random directions when the parameter dimension exceeds 2.
  std::uint64_t seed = 1;
  /// Halve the direction set when the model is odd-symmetric.
  bool use_symmetry = true;
  bool compute_secondary = true;
  int workers = 0;

  void validate(std::size_t dim) const;
};

struct RadialSample {
  double modulus = 0.0;
  Verdict verdict = Verdict::Undecided;
};

struct DirectionResult {
  std::vector<double> direction;
  /// Smallest modulus found NonConvergent (+∞ if none up to r_max).
  double modulus = kInf;
  /// Norm of the initial function at that modulus.
  double witness_norm = kInf;
  std::vector<RadialSample> samples;
  std::size_t undecided = 0;
  /// Minimum trace norm over this direction's non-convergent runs.
  double secondary = kInf;
  double secondary_modulus = 0.0;
  double secondary_time = 0.0;
};

struct FamilyResult {
  std::string name;
  FamilySpec spec;
  std::vector<DirectionResult> directions;
  double primary = kInf;
  std::vector<double> primary_params;
  double secondary = kInf;
  std::vector<double> secondary_params;
  double secondary_time = 0.0;
  std::size_t trajectories = 0;
  std::size_t undecided = 0;
  std::vector<std::string> warnings;
};

struct ScanResult {
  std::vector<FamilyResult> families;
  double merged_primary = kInf;
  std::string primary_family;
  double merged_secondary = kInf;
  std::string secondary_family;
  /// Witness initial function (deviation from x_e) of the merged primary bound.
  std::optional<Segment> primary_witness;
  /// Minimizing state x_t* − x_e of the merged secondary bound.
  std::optional<Segment> secondary_witness;
};

/// Unit directions used for a family with `param_dim` parameters.
std::vector<std::vector<double>> scan_directions(std::size_t param_dim, const ScanConfig& cfg,
                                                 bool odd_symmetric);

/// Star-like scan: along each direction the modulus grows by Δr until the
/// first NonConvergent verdict, then bisection down to ε_r. Undecided runs
/// never stop the search and never serve as witnesses.
ScanResult star_scan(const Model& model, const ScanConfig& cfg);

struct BasinConfig {
  FamilySpec family;
  SimulationSettings sim;
  double radius = 1.0;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  int workers = 0;

  void validate(std::size_t dim) const;
};

struct BasinResult {
  std::size_t samples = 0;
  std::size_t convergent = 0;
  std::size_t nonconvergent = 0;
  std::size_t undecided = 0;
  double fraction = 0.0;
  double lower = 0.0;  // Wilson 95 % interval
  double upper = 0.0;
};

/// Convergent fraction of parameters drawn uniformly from the ball of radius
/// ρ. Sample i uses its own generator seeded from (seed, i), so the result
/// is independent of the worker count.
BasinResult basin_stability(const Model& model, const BasinConfig& cfg);

/// Wilson score interval for k successes out of n at z = 1.959964.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n);

/// Point in the unit ball of ℝ^m drawn uniformly for (seed, index).
std::vector<double> sample_ball(std::size_t m, std::uint64_t seed, std::uint64_t index);

struct PixelMap {
  std::vector<double> p1;
  std::vector<double> p2;
  std::vector<Verdict> verdict;  // row-major, p2 outer
};
/// Exhaustive verdict grid over a two-parameter family.
PixelMap pixel_map(const Model& model, const FamilySpec& family, const SimulationSettings& sim,
                   double p1_min, double p1_max, double p2_min, double p2_max, std::size_t resolution,
                   int workers = 0);
std::string pixel_map_csv(const PixelMap& map);

}  // namespace roa
