#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "roa/model.hpp"
#include "roa/segment.hpp"

namespace roa {

/// Norm used for the convergence stop ball; receives the deviation x_t − x_e.
using StopNorm = std::function<double(const Segment&)>;

struct SolverOptions {
  double rtol = 1e-6;
  double atol = 1e-9;
  /// 0 selects τ/4. Never allowed above τ (explicit treatment of the delay).
  double max_step = 0.0;
  /// 0 selects an automatic initial step.
  double initial_step = 0.0;
  /// Steps below min_step_factor·ε·max(1,|t|) abort with SolverError.
  double min_step_factor = 16.0;
  /// δ_num; 0 disables the convergence stop.
  double stop_radius = 0.0;
  /// Norm for the stop ball; required when stop_radius > 0.
  StopNorm stop_norm;
  /// Minimum spacing between stop-norm evaluations, as a fraction of τ.
  double stop_check_fraction = 1.0 / 16.0;
  /// R_div, measured as |x(t) − x_e|₂.
  double blowup_radius = 1e3;
  /// Number of delay multiples over which history breakpoints are tracked.
  int smoothing_depth = 4;
  std::size_t max_steps = 50'000'000;

  void validate() const;
};

/// Accepted steps of a Bogacki–Shampine run with cubic Hermite interpolants.
/// Append-only while integrating, immutable afterwards.
class DenseOutput {
 public:
  explicit DenseOutput(std::size_t dim) : dim_(dim) {}

  void start(double t0, std::span<const double> y0);
  void append(double t1, std::span<const double> y1, std::span<const double> d_left,
              std::span<const double> d_right);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t steps() const noexcept { return t_.empty() ? 0 : t_.size() - 1; }
  [[nodiscard]] const std::vector<double>& mesh() const noexcept { return t_; }
  [[nodiscard]] double t_begin() const { return t_.front(); }
  [[nodiscard]] double t_end() const { return t_.back(); }
  [[nodiscard]] std::span<const double> node(std::size_t k) const {
    return {y_.data() + k * dim_, dim_};
  }

  /// x(t) for t ∈ [t_begin, t_end]. `hint` caches the last step index.
  void evaluate(double t, std::span<double> out, std::size_t* hint = nullptr) const;
  /// ẋ(t) from the interpolant.
  void derivative(double t, std::span<double> out, std::size_t* hint = nullptr) const;

 private:
  std::size_t locate(double t, std::size_t* hint) const;

  std::size_t dim_;
  std::vector<double> t_;
  std::vector<double> y_;
  std::vector<double> dl_;
  std::vector<double> dr_;
};

enum class Termination { ConvergedAt, HorizonReached, Blowup };
std::string to_string(Termination t);

/// Forward solution of the Cauchy problem from an initial segment.
class Trajectory {
 public:
  Trajectory(Model model, Segment initial, std::shared_ptr<const DenseOutput> dense,
             Termination termination, double termination_time, std::vector<double> forced_times);

  [[nodiscard]] const Model& model() const noexcept { return model_; }
  [[nodiscard]] const Segment& initial() const noexcept { return initial_; }
  [[nodiscard]] const DenseOutput& dense() const noexcept { return *dense_; }
  [[nodiscard]] std::shared_ptr<const DenseOutput> dense_ptr() const noexcept { return dense_; }
  [[nodiscard]] const std::vector<double>& mesh() const noexcept { return dense_->mesh(); }
  [[nodiscard]] Termination termination() const noexcept { return termination_; }
  [[nodiscard]] double termination_time() const noexcept { return termination_time_; }
  /// Propagated discontinuity times that were forced into the mesh.
  [[nodiscard]] const std::vector<double>& forced_times() const noexcept { return forced_; }
  [[nodiscard]] double t_end() const { return dense_->t_end(); }
  [[nodiscard]] double tau() const noexcept { return model_.tau; }

  /// x(t) for t ∈ [−τ, t_end]; negative times read the initial segment.
  [[nodiscard]] std::vector<double> at(double t) const;
  void at(double t, std::span<double> out, Side side = Side::Right) const;

 private:
  Model model_;
  Segment initial_;
  std::shared_ptr<const DenseOutput> dense_;
  Termination termination_;
  double termination_time_;
  std::vector<double> forced_;
};

/// Integrates ẋ = f(x(t), x(t−τ)) on [0, horizon] from `initial`.
/// Throws ArgumentError for invalid horizon/tolerances and SolverError on
/// step-size underflow.
Trajectory integrate(const Model& model, const Segment& initial, double horizon,
                     const SolverOptions& opts = {});

/// The state x_t as a segment on [−τ, 0]. For t < τ it splices the initial
/// function with the dense output. Throws RangeError for t ∉ [0, t_end].
Segment segment_at(const Trajectory& traj, double t);

/// Segment view x_t over a dense output whose history is `initial`; used
/// while the dense output is still growing.
Segment window_segment(const Segment& initial, std::shared_ptr<const DenseOutput> dense, double t);

/// CSV with header `t,x_1,...,x_n`: a uniform grid over [−τ, t_end] merged
/// with all mesh points.
std::string trajectory_csv(const Trajectory& traj, std::size_t uniform_points = 2001);

}  // namespace roa
