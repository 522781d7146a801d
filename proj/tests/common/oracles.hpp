#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "roa/segment.hpp"

namespace roa::testing {

/// Solution of ẋ = a·x + b·x(t−τ) with a polynomial history, built by the
/// method of steps: on the k-th delay interval, in local time u = t − kτ, the
/// solution is a power series in u evaluated in long double (exact to
/// rounding for |a|, |b|, τ of order one).
class MethodOfSteps {
 public:
  /// `history` holds power coefficients of φ(θ) in θ ∈ [−τ, 0].
  MethodOfSteps(double a, double b, double tau, std::vector<double> history, int intervals);
  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] double tau() const { return tau_; }

 private:
  double tau_;
  std::vector<double> history_;
  std::vector<std::vector<long double>> pieces_;
};

/// Crossing frequencies of λ² + aλ + c + ãλe^{−λτ}: positive roots of
/// ω⁴ + (a² − ã² − 2c)ω² + c² = 0, via the quadratic formula in ω².
std::vector<double> swing_crossing_frequencies(double a, double a_tilde, double c);

/// Random piecewise-linear segment with up to `max_jumps` jumps.
Segment random_segment(std::mt19937_64& rng, double tau, std::size_t dim, int max_jumps = 2);

}  // namespace roa::testing
