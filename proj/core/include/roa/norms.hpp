#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "roa/dde_solver.hpp"
#include "roa/model.hpp"
#include "roa/segment.hpp"

namespace roa {

enum class NormKind { UniformC, M2, QuotientQ };

std::string to_string(NormKind kind);
/// Accepts "c", "pc", "uniform", "m2", "q", "quotient".
NormKind parse_norm_kind(const std::string& name);

/// A state-space norm on segments.
///
/// * UniformC:  ‖φ‖_C  = max_θ |φ(θ)|₂ (also the PC norm).
/// * M2:        ‖φ‖_M² = |φ(0)|₂ + (∫|φ(θ)|₂² dθ)^{1/2}.
/// * QuotientQ: ‖φ‖_Q  = (‖φ^I‖_C² + |φ^II(0)|₂²)^{1/2}, where block I are the
///   components whose history enters the dynamics and block II those that only
///   enter instantaneously.
struct NormSpace {
  NormKind kind = NormKind::UniformC;
  Partition partition;  // QuotientQ only
  int grid_density = 128;

  static NormSpace uniform(int grid_density = 128);
  static NormSpace m2(int grid_density = 128);
  static NormSpace quotient(Partition partition, int grid_density = 128);
  /// Quotient space using the model's partition metadata.
  static NormSpace quotient_for(const Model& model, int grid_density = 128);

  /// Throws ArgumentError on an invalid partition or grid density < 16.
  void validate(std::size_t dim) const;
  bool operator==(const NormSpace&) const = default;
};

/// Evaluates the norm. Sup norms sample grid_density points per delay
/// interval plus both limits at every breakpoint, then refine the largest
/// local maxima by golden-section search.
double norm(const NormSpace& space, const Segment& seg);

/// sup_θ of the Euclidean norm of the selected components.
double sup_norm(const Segment& seg, const std::vector<std::size_t>& components, int grid_density);

/// (∫_{−τ}^{0} |φ(θ)|₂² dθ)^{1/2} by composite Simpson split at breakpoints.
double l2_norm(const Segment& seg, int grid_density);

/// Delay-normalizing reparametrization: returns φ̂ on [−τ_new, 0] with
/// φ̂(θ̂) = φ(θ̂·τ/τ_new).
Segment rescale_delay(const Segment& seg, double tau_new);

/// Sampled norm trace t ↦ ‖x_t − x_e‖ over [0, t_end] with step τ/grid_density.
/// The values come from sliding-window reductions over a sampled solution;
/// use `refine_trace_minimum` for exact minima.
struct NormTrace {
  std::vector<double> t;
  std::vector<double> value;
};
NormTrace norm_trace(const Trajectory& traj, const NormSpace& space);

struct TraceMinimum {
  double value = 0.0;
  double t = 0.0;
};
/// Minimum of t ↦ ‖x_t − x_e‖: exact norms at the three grid points around
/// each of the best discrete minima, with parabolic refinement. Never larger
/// than the exact norm of the initial state.
TraceMinimum refine_trace_minimum(const Trajectory& traj, const NormSpace& space,
                                  const NormTrace& trace, std::size_t candidates = 3);

std::string norm_trace_csv(const NormTrace& trace);

}  // namespace roa
