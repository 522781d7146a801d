#include "roa/models.hpp"

#include <cmath>

#include "roa/errors.hpp"

namespace roa {

Model make_swing(double a, double a_tilde, double w, double tau) {
  if (!(a > 0.0) || !(a_tilde > 0.0)) throw ArgumentError("swing damping coefficients must be positive");
  if (!(w > 0.0 && w < 1.0)) throw ArgumentError("swing drive w must lie in (0, 1)");
  if (!(tau > 0.0)) throw ArgumentError("swing delay must be positive");
  const double ye = std::asin(w);
  const double c = std::cos(ye);

  Model m;
  m.name = "swing";
  m.dim = 2;
  m.tau = tau;
  m.rhs = [a, a_tilde, w, ye](std::span<const double> x, std::span<const double> xd,
                              std::span<double> dx) {
    dx[0] = x[1];
    dx[1] = -a * x[1] - a_tilde * xd[1] + w - std::sin(x[0] + ye);
  };
  m.jacobian = [a, a_tilde, ye](std::span<const double> x, std::span<const double>,
                                Eigen::Ref<Eigen::MatrixXd> dfdx, Eigen::Ref<Eigen::MatrixXd> dfdxd) {
    dfdx << 0.0, 1.0, -std::cos(x[0] + ye), -a;
    dfdxd << 0.0, 0.0, 0.0, -a_tilde;
  };
  m.characteristic = QuasiPolynomial{{c, a, 1.0}, {0.0, a_tilde}};
  m.partition = Partition{{1}, {0}};
  m.parameters = {{"a", a}, {"a_tilde", a_tilde}, {"w", w}, {"tau", tau}};
  return m;
}

Model make_scalar_cubic(double tau) {
  if (!(tau > 0.0)) throw ArgumentError("delay must be positive");
  Model m;
  m.name = "scalar-cubic";
  m.dim = 1;
  m.tau = tau;
  m.rhs = [](std::span<const double> x, std::span<const double> xd, std::span<double> dx) {
    dx[0] = -x[0] - xd[0] + x[0] * x[0] * x[0];
  };
  m.jacobian = [](std::span<const double> x, std::span<const double>,
                  Eigen::Ref<Eigen::MatrixXd> dfdx, Eigen::Ref<Eigen::MatrixXd> dfdxd) {
    dfdx(0, 0) = -1.0 + 3.0 * x[0] * x[0];
    dfdxd(0, 0) = -1.0;
  };
  m.characteristic = QuasiPolynomial{{1.0, 1.0}, {1.0}};
  m.partition = Partition{{0}, {}};
  m.odd_symmetric = true;
  m.parameters = {{"tau", tau}};
  return m;
}

Model make_linear_scalar(double a, double b, double tau) {
  if (!(tau > 0.0)) throw ArgumentError("delay must be positive");
  Model m;
  m.name = "linear-scalar";
  m.dim = 1;
  m.tau = tau;
  m.rhs = [a, b](std::span<const double> x, std::span<const double> xd, std::span<double> dx) {
    dx[0] = a * x[0] + b * xd[0];
  };
  m.jacobian = [a, b](std::span<const double>, std::span<const double>,
                      Eigen::Ref<Eigen::MatrixXd> dfdx, Eigen::Ref<Eigen::MatrixXd> dfdxd) {
    dfdx(0, 0) = a;
    dfdxd(0, 0) = b;
  };
  m.characteristic = QuasiPolynomial{{-a, 1.0}, {-b}};
  m.partition = Partition{{0}, {}};
  m.odd_symmetric = true;
  m.parameters = {{"a", a}, {"b", b}, {"tau", tau}};
  return m;
}

}  // namespace roa
