#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roa/model.hpp"
#include "roa/norms.hpp"
#include "roa/segment.hpp"
#include "roa/spectral.hpp"

namespace roa {

struct CollocationOptions {
  int intervals = 40;  // L
  int degree = 4;      // m
  double residual_tol = 1e-9;
  double step_tol = 1e-10;
  int max_iterations = 40;

  void validate() const;
};

/// Periodic solution z on the normalized period t̂ ∈ [0, 1]: x(t) = z(t/T).
/// Stored as nodal values of a continuous piecewise polynomial of degree m
/// on L uniform intervals (L·m + 1 equidistant nodes, last node = z(1)).
class PeriodicOrbit {
 public:
  PeriodicOrbit() = default;
  /// `nodes` is row-major: node k occupies entries [k·n, (k+1)·n).
  PeriodicOrbit(std::size_t dim, double tau, double period, int intervals, int degree,
                std::vector<double> nodes, std::vector<double> equilibrium);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] double tau() const noexcept { return tau_; }
  [[nodiscard]] double period() const noexcept { return period_; }
  [[nodiscard]] int intervals() const noexcept { return intervals_; }
  [[nodiscard]] int degree() const noexcept { return degree_; }
  [[nodiscard]] std::size_t node_count() const noexcept { return static_cast<std::size_t>(intervals_ * degree_ + 1); }
  [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<double>& equilibrium() const noexcept { return xe_; }
  /// Max collocation residual at acceptance (NaN for an unsolved guess).
  [[nodiscard]] double residual() const noexcept { return residual_; }
  [[nodiscard]] double phase_residual() const noexcept { return phase_residual_; }
  [[nodiscard]] int iterations() const noexcept { return iterations_; }
  [[nodiscard]] bool converged() const noexcept { return converged_; }

  /// z(t̂) with t̂ taken modulo 1.
  void profile(double that, std::span<double> out) const;
  [[nodiscard]] std::vector<double> profile(double that) const;
  /// dz/dt̂.
  void profile_derivative(double that, std::span<double> out) const;
  /// |z(0) − z(1)|₂.
  [[nodiscard]] double closure() const;
  /// (∫₀¹ |z − x_e|² dt̂)^{1/2}.
  [[nodiscard]] double amplitude() const;
  /// max over nodes of |z − x_e|₂ and min over a fine grid of |z − x_e|₂.
  [[nodiscard]] double max_deviation() const;
  [[nodiscard]] double min_deviation(std::size_t samples = 2048) const;

  /// The state x_t^LC − x_e of the periodic solution at physical time t,
  /// on [−τ, 0], unrolled by periodicity.
  [[nodiscard]] Segment deviation_segment(double t) const;

  /// CSV with header `t_hat,z_1,...,z_n` on a uniform grid over [0, 1].
  [[nodiscard]] std::string csv(std::size_t points = 401) const;

  void set_solution_info(double residual, double phase_residual, int iterations, bool converged);
  void set_tau(double tau) { tau_ = tau; }
  void set_period(double period) { period_ = period; }
  std::vector<double>& mutable_nodes() { return nodes_; }

 private:
  std::size_t dim_ = 0;
  double tau_ = 0.0;
  double period_ = 0.0;
  int intervals_ = 0;
  int degree_ = 0;
  std::vector<double> nodes_;
  std::vector<double> xe_;
  double residual_ = std::numeric_limits<double>::quiet_NaN();
  double phase_residual_ = std::numeric_limits<double>::quiet_NaN();
  int iterations_ = 0;
  bool converged_ = false;
};

struct HopfPoint {
  double tau = 0.0;
  double omega = 0.0;
};

/// Regain-of-stability endpoints below tau_max.
std::vector<HopfPoint> hopf_points(const Model& model, double tau_max, int n_cheb = 32);

/// z⁰(t̂) = x_e + ε(Re v cos 2πt̂ − Im v sin 2πt̂), T⁰ = 2π/ω_H, at τ = τ_H.
/// A negative ε gives the same orbit shifted by half a period.
PeriodicOrbit hopf_seed(const Model& model, const HopfPoint& hopf, const Eigen::VectorXcd& v, double epsilon,
                        const CollocationOptions& opts = {});
/// 1e−2·(1 + |x_e|).
double default_hopf_amplitude(const Model& model);

/// Newton on the collocation system with periodicity and the integral phase
/// condition ∫ ż_refᵀ z dt̂ = 0 (ż_ref from `guess`). Throws ConvergenceError
/// on divergence; the flag fold_suspect marks a singular Jacobian.
PeriodicOrbit solve_periodic(const Model& model, double tau, const PeriodicOrbit& guess,
                             const CollocationOptions& opts = {});

/// Same system with τ free and the extra constraint ∫|z − x_e|² dt̂ = A².
PeriodicOrbit solve_periodic_amplitude(const Model& model, double amplitude, const PeriodicOrbit& guess,
                                       const CollocationOptions& opts = {});

/// `orbit` interpolated onto a different collocation mesh.
PeriodicOrbit remesh(const PeriodicOrbit& orbit, int intervals, int degree);

struct StepPolicy {
  double initial_step = 0.05;
  double min_step = 1e-4;
  double max_step = 0.25;
  /// Accept a step only if max nodal change ≤ this·(1 + max|z − x_e|).
  double max_profile_change = 0.5;
  std::size_t max_points = 20000;
};

struct Branch {
  std::vector<PeriodicOrbit> points;
  std::size_t failures = 0;
  bool completed = false;
  bool fold_suspect = false;
  std::string message;
};

/// Natural-parameter continuation in τ from a converged orbit to τ_target
/// with a secant predictor and step halving.
Branch continue_branch(const Model& model, const PeriodicOrbit& start, double tau_target,
                       const StepPolicy& policy = {}, const CollocationOptions& opts = {});

/// Starts on the small-amplitude cycle near a Hopf point (amplitude
/// parametrization with τ free), then continues naturally in τ.
Branch hopf_branch(const Model& model, const HopfPoint& hopf, double tau_target,
                   const StepPolicy& policy = {}, const CollocationOptions& opts = {});

struct CycleMinimum {
  double value = 0.0;
  double t = 0.0;  // physical phase time in [0, T)
};
/// min over t ∈ [0, T) of ‖x_t^LC − x_e‖ with parabolic refinement. Throws
/// ArgumentError when the orbit touches the equilibrium.
CycleMinimum min_norm_on_cycle(const PeriodicOrbit& orbit, const NormSpace& space, std::size_t phases = 256);

}  // namespace roa
