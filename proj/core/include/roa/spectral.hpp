#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roa/model.hpp"

namespace roa {

/// Linear problem ẋ = A₀x + A₁x(t−τ) with optional scalar reduction h.
struct CharacteristicProblem {
  Eigen::MatrixXd a0;
  Eigen::MatrixXd a1;
  double tau = 1.0;
  std::optional<QuasiPolynomial> h;

  static CharacteristicProblem from_model(const Model& model);
  [[nodiscard]] CharacteristicProblem with_tau(double new_tau) const;
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(a0.rows()); }

  /// h(λ) when present, else det(λI − A₀ − A₁e^{−λτ}).
  [[nodiscard]] std::complex<double> eval(std::complex<double> lambda) const;
  [[nodiscard]] std::complex<double> det(std::complex<double> lambda) const;
  /// |value| / max(1, |λ|^deg) with deg the polynomial degree of the
  /// characteristic function.
  [[nodiscard]] double scaled_residual(std::complex<double> lambda) const;

  /// Square matrices of equal size, τ > 0, and (if present) h agreeing with
  /// the determinant on random samples to 1e−8 relative.
  void validate() const;
};

struct CharacteristicRoot {
  std::complex<double> lambda;
  double residual = 0.0;
  bool refined = false;
};

/// Rightmost `count` roots: eigenvalues of the Chebyshev pseudospectral
/// discretization (N+1 nodes) of the infinitesimal generator, each
/// Newton-refined on the characteristic function. Sorted by decreasing real
/// part; nonreal roots appear with their conjugates.
std::vector<CharacteristicRoot> rightmost_roots(const CharacteristicProblem& prob, int n_cheb = 32,
                                                std::size_t count = 6);
double spectral_abscissa(const CharacteristicProblem& prob, int n_cheb = 32);

struct Crossing {
  double omega = 0.0;
  /// τ_k for k = 0..K, ascending.
  std::vector<double> taus;
  /// +1: roots move into the right half-plane with increasing τ; −1: back.
  int direction = 0;
};

/// Imaginary-axis crossings λ = ±iω of h(λ, τ) = P(λ) + Q(λ)e^{−λτ}.
/// Frequencies solve |P(iω)|² = |Q(iω)|² (scan of 2000 points per decade
/// plus refinement); delays follow from the phase condition. `omega_max`
/// ≤ 0 selects an automatic bound.
std::vector<Crossing> crossings(const QuasiPolynomial& h, int branches, double omega_max = 0.0);

struct CrossingEvent {
  double tau = 0.0;
  double omega = 0.0;
  int direction = 0;
};
/// All crossing delays below tau_max, sorted.
std::vector<CrossingEvent> crossing_events(const std::vector<Crossing>& set, double tau_max);

struct StabilityWindow {
  double from = 0.0;
  double to = 0.0;
  /// Roots in the open right half-plane predicted by counting crossings.
  int unstable_roots = 0;
  [[nodiscard]] bool stable() const { return unstable_roots == 0; }
  /// Midpoint check against rightmost_roots agrees with the prediction.
  bool consistent = true;
  /// Left endpoint is a regain of stability by a pair crossing leftward.
  bool hopf_at_from = false;
  double hopf_omega = 0.0;
};

/// Partition of (0, τ_max] into intervals between consecutive crossing
/// delays; stable() marks the windows with negative spectral abscissa.
std::vector<StabilityWindow> stability_windows(const CharacteristicProblem& prob, double tau_max,
                                               int n_cheb = 32);

/// Null vector v of iω I − A₀ − A₁e^{−iωτ} (unit norm). Throws ArgumentError
/// when the critical eigenvalue is not simple.
Eigen::VectorXcd critical_eigenvector(const CharacteristicProblem& prob, double omega);

/// All complex roots of a real polynomial (ascending coefficients), from
/// the eigenvalues of its companion matrix.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

}  // namespace roa
