#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace roa {

/// f(x(t), x(t−τ)) written into dx.
using RhsFn = std::function<void(std::span<const double> x, std::span<const double> xd,
                                 std::span<double> dx)>;

/// ∂f/∂x and ∂f/∂x_d at an arbitrary point.
using JacobianFn = std::function<void(std::span<const double> x, std::span<const double> xd,
                                      Eigen::Ref<Eigen::MatrixXd> dfdx,
                                      Eigen::Ref<Eigen::MatrixXd> dfdxd)>;

/// Split of the state components into the block whose history matters
/// (`delayed`, block I) and the block entering only through its current value
/// (`instantaneous`, block II). Indices are zero-based.
struct Partition {
  std::vector<std::size_t> delayed;
  std::vector<std::size_t> instantaneous;

  /// Disjoint, covering {0..n−1}.
  [[nodiscard]] bool valid_for(std::size_t n) const;
  bool operator==(const Partition&) const = default;
};

/// Scalar quasi-polynomial h(λ, τ) = P(λ) + Q(λ)·e^{−λτ} with real
/// coefficients in ascending powers.
struct QuasiPolynomial {
  std::vector<double> p;
  std::vector<double> q;

  [[nodiscard]] std::complex<double> eval(std::complex<double> lambda, double tau) const;
  /// ∂h/∂λ
  [[nodiscard]] std::complex<double> dlambda(std::complex<double> lambda, double tau) const;
  /// ∂h/∂τ
  [[nodiscard]] std::complex<double> dtau(std::complex<double> lambda, double tau) const;
  [[nodiscard]] std::size_t degree() const;

  /// Reduction of det(λI − A₀ − A₁e^{−λτ}) for n ≤ 2 when det A₁ = 0 (so no
  /// e^{−2λτ} term appears). Returns nullopt otherwise.
  static std::optional<QuasiPolynomial> from_matrices(const Eigen::MatrixXd& a0,
                                                      const Eigen::MatrixXd& a1);
};

std::complex<double> poly_eval(std::span<const double> coeffs, std::complex<double> x);
std::complex<double> poly_derivative(std::span<const double> coeffs, std::complex<double> x);

/// Linear part at the equilibrium: ẋ ≈ A₀x + A₁x(t−τ).
struct Linearization {
  Eigen::MatrixXd a0;
  Eigen::MatrixXd a1;
};

/// Single-delay retarded system ẋ = f(x(t), x(t−τ)).
struct Model {
  std::string name;
  std::size_t dim = 1;
  double tau = 1.0;
  RhsFn rhs;
  std::vector<double> equilibrium;  // empty means the origin
  std::optional<JacobianFn> jacobian;
  std::optional<QuasiPolynomial> characteristic;
  std::optional<Partition> partition;
  /// f(−x, −x_d) = −f(x, x_d) about the equilibrium; lets scans use p ↦ −p.
  bool odd_symmetric = false;
  /// Numeric parameters for provenance (serialized with results).
  std::vector<std::pair<std::string, double>> parameters;

  /// Checks τ > 0, n ≥ 1, equilibrium dimension and f(x_e, x_e) = 0.
  void validate() const;
  [[nodiscard]] std::vector<double> equilibrium_point() const;
  [[nodiscard]] Model with_tau(double new_tau) const;

  /// Analytic Jacobian when supplied, else central differences with step
  /// 1e−6·(1+|x_i|).
  void jacobian_at(std::span<const double> x, std::span<const double> xd,
                   Eigen::Ref<Eigen::MatrixXd> dfdx, Eigen::Ref<Eigen::MatrixXd> dfdxd) const;
  [[nodiscard]] Linearization linearize() const;
};

/// Central finite-difference Jacobians of `rhs`.
void finite_difference_jacobian(const RhsFn& rhs, std::size_t n, std::span<const double> x,
                                std::span<const double> xd, Eigen::Ref<Eigen::MatrixXd> dfdx,
                                Eigen::Ref<Eigen::MatrixXd> dfdxd);

}  // namespace roa
