#include "roa/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roa/errors.hpp"

namespace roa {

bool Partition::valid_for(std::size_t n) const {
  std::vector<int> seen(n, 0);
  for (auto idx : delayed) {
    if (idx >= n) return false;
    ++seen[idx];
  }
  for (auto idx : instantaneous) {
    if (idx >= n) return false;
    ++seen[idx];
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

std::complex<double> poly_eval(std::span<const double> coeffs, std::complex<double> x) {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<double> poly_derivative(std::span<const double> coeffs, std::complex<double> x) {
  std::complex<double> acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * coeffs[k];
  return acc;
}

std::complex<double> QuasiPolynomial::eval(std::complex<double> lambda, double tau) const {
  return poly_eval(p, lambda) + poly_eval(q, lambda) * std::exp(-lambda * tau);
}

std::complex<double> QuasiPolynomial::dlambda(std::complex<double> lambda, double tau) const {
  const auto e = std::exp(-lambda * tau);
  return poly_derivative(p, lambda) + (poly_derivative(q, lambda) - tau * poly_eval(q, lambda)) * e;
}

std::complex<double> QuasiPolynomial::dtau(std::complex<double> lambda, double tau) const {
  return -lambda * poly_eval(q, lambda) * std::exp(-lambda * tau);
}

std::size_t QuasiPolynomial::degree() const {
  return p.empty() ? 0 : p.size() - 1;
}

std::optional<QuasiPolynomial> QuasiPolynomial::from_matrices(const Eigen::MatrixXd& a0,
                                                              const Eigen::MatrixXd& a1) {
  if (a0.rows() != a0.cols() || a1.rows() != a1.cols() || a0.rows() != a1.rows()) {
    throw ArgumentError("characteristic matrices must be square and of equal size");
  }
  const auto n = a0.rows();
  if (n == 1) return QuasiPolynomial{{-a0(0, 0), 1.0}, {-a1(0, 0)}};
  if (n != 2) return std::nullopt;
  const double det1 = a1(0, 0) * a1(1, 1) - a1(0, 1) * a1(1, 0);
  if (std::abs(det1) > 1e-14 * (1.0 + a1.cwiseAbs().maxCoeff())) return std::nullopt;
  QuasiPolynomial h;
  h.p = {a0(0, 0) * a0(1, 1) - a0(0, 1) * a0(1, 0), -(a0(0, 0) + a0(1, 1)), 1.0};
  h.q = {a0(0, 0) * a1(1, 1) + a1(0, 0) * a0(1, 1) - a0(0, 1) * a1(1, 0) - a1(0, 1) * a0(1, 0),
         -(a1(0, 0) + a1(1, 1))};
  return h;
}

void finite_difference_jacobian(const RhsFn& rhs, std::size_t n, std::span<const double> x,
                                std::span<const double> xd, Eigen::Ref<Eigen::MatrixXd> dfdx,
                                Eigen::Ref<Eigen::MatrixXd> dfdxd) {
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> xdp(xd.begin(), xd.end());
  std::vector<double> fp(n), fm(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double h = 1e-6 * (1.0 + std::abs(x[j]));
    xp[j] = x[j] + h;
    rhs(xp, xd, fp);
    xp[j] = x[j] - h;
    rhs(xp, xd, fm);
    xp[j] = x[j];
    for (std::size_t i = 0; i < n; ++i) dfdx(i, j) = (fp[i] - fm[i]) / (2.0 * h);

    const double hd = 1e-6 * (1.0 + std::abs(xd[j]));
    xdp[j] = xd[j] + hd;
    rhs(x, xdp, fp);
    xdp[j] = xd[j] - hd;
    rhs(x, xdp, fm);
    xdp[j] = xd[j];
    for (std::size_t i = 0; i < n; ++i) dfdxd(i, j) = (fp[i] - fm[i]) / (2.0 * hd);
  }
}

std::vector<double> Model::equilibrium_point() const {
  return equilibrium.empty() ? std::vector<double>(dim, 0.0) : equilibrium;
}

void Model::validate() const {
  if (dim == 0) throw ArgumentError("model dimension must be at least 1");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("model delay must be positive");
  if (!rhs) throw ArgumentError("model has no right-hand side");
  if (!equilibrium.empty() && equilibrium.size() != dim) {
    throw ArgumentError("equilibrium has wrong dimension");
  }
  if (partition && !partition->valid_for(dim)) {
    throw ArgumentError("partition blocks must be disjoint and cover all components");
  }
  const auto xe = equilibrium_point();
  std::vector<double> f(dim);
  rhs(xe, xe, f);
  double scale = 1.0;
  for (double v : xe) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < dim; ++i) {
    if (std::abs(f[i]) > 1e-10 * scale) {
      std::ostringstream msg;
      msg << "equilibrium is not a root of the right-hand side (component " << i + 1
          << " residual " << f[i] << ")";
      throw ArgumentError(msg.str());
    }
  }
}

Model Model::with_tau(double new_tau) const {
  Model m = *this;
  m.tau = new_tau;
  for (auto& [key, value] : m.parameters) {
    if (key == "tau") value = new_tau;
  }
  return m;
}

void Model::jacobian_at(std::span<const double> x, std::span<const double> xd,
                        Eigen::Ref<Eigen::MatrixXd> dfdx, Eigen::Ref<Eigen::MatrixXd> dfdxd) const {
  if (jacobian) {
    (*jacobian)(x, xd, dfdx, dfdxd);
  } else {
    finite_difference_jacobian(rhs, dim, x, xd, dfdx, dfdxd);
  }
}

Linearization Model::linearize() const {
  const auto xe = equilibrium_point();
  Linearization lin{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
  jacobian_at(xe, xe, lin.a0, lin.a1);
  return lin;
}

}  // namespace roa
