#include "roa/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "roa/errors.hpp"
#include "roa/parallel.hpp"

namespace roa {
namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::MatrixXcd char_matrix(const CharacteristicProblem& prob, cd lambda) {
  Eigen::MatrixXcd m = -prob.a0.cast<cd>() - prob.a1.cast<cd>() * std::exp(-lambda * prob.tau);
  m.diagonal().array() += lambda;
  return m;
}

Eigen::MatrixXd cheb_diff(int n) {
  Eigen::VectorXd x(n + 1);
  for (int j = 0; j <= n; ++j) x(j) = std::cos(std::numbers::pi * j / n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
  auto c = [n](int j) { return (j == 0 || j == n) ? 2.0 : 1.0; };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = c(i) / c(j) * sign / (x(i) - x(j));
    }
  }
  for (int i = 0; i <= n; ++i) d(i, i) = -d.row(i).sum();
  return d;
}

// Newton on the characteristic function; returns the refined root.
CharacteristicRoot newton_refine(const CharacteristicProblem& prob, cd lambda) {
  CharacteristicRoot r{lambda, prob.scaled_residual(lambda), false};
  const cd start = lambda;
  for (int it = 0; it < 60; ++it) {
    cd step;
    if (prob.h) {
      const cd d = prob.h->dlambda(lambda, prob.tau);
      if (d == cd(0.0)) break;
      step = prob.h->eval(lambda, prob.tau) / d;
    } else {
      const Eigen::MatrixXcd m = char_matrix(prob, lambda);
      Eigen::MatrixXcd dm = prob.tau * prob.a1.cast<cd>() * std::exp(-lambda * prob.tau);
      dm.diagonal().array() += 1.0;
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
      const cd tr = lu.solve(dm).trace();
      if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag()) || tr == cd(0.0)) break;
      step = 1.0 / tr;
    }
    lambda -= step;
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag())) break;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(lambda))) break;
  }
  if (std::isfinite(lambda.real()) && std::isfinite(lambda.imag())) {
    const double res = prob.scaled_residual(lambda);
    if (res < 1e-10 && std::abs(lambda - start) < 0.5 * (1.0 + std::abs(start))) {
      r = {lambda, res, true};
    }
  }
  return r;
}

double cauchy_bound(const QuasiPolynomial& h) {
  const double lead = std::abs(h.p.back());
  double m = 0.0;
  for (std::size_t k = 0; k + 1 < h.p.size(); ++k) m = std::max(m, std::abs(h.p[k]));
  for (double c : h.q) m = std::max(m, std::abs(c));
  return 1.0 + 2.0 * m / lead;
}

double modulus_gap(const QuasiPolynomial& h, double w) {
  const cd iw(0.0, w);
  return std::norm(poly_eval(h.p, iw)) - std::norm(poly_eval(h.q, iw));
}

}  // namespace

CharacteristicProblem CharacteristicProblem::from_model(const Model& model) {
  const auto lin = model.linearize();
  CharacteristicProblem prob{lin.a0, lin.a1, model.tau, model.characteristic};
  if (!prob.h) prob.h = QuasiPolynomial::from_matrices(lin.a0, lin.a1);
  return prob;
}

CharacteristicProblem CharacteristicProblem::with_tau(double new_tau) const {
  CharacteristicProblem p = *this;
  p.tau = new_tau;
  return p;
}

cd CharacteristicProblem::det(cd lambda) const { return char_matrix(*this, lambda).determinant(); }

cd CharacteristicProblem::eval(cd lambda) const { return h ? h->eval(lambda, tau) : det(lambda); }

double CharacteristicProblem::scaled_residual(cd lambda) const {
  const double deg = h ? static_cast<double>(h->degree()) : static_cast<double>(dim());
  return std::abs(eval(lambda)) / std::max(1.0, std::pow(std::abs(lambda), deg));
}

void CharacteristicProblem::validate() const {
  if (a0.rows() == 0 || a0.rows() != a0.cols() || a1.rows() != a1.cols() || a0.rows() != a1.rows()) {
    throw ArgumentError("characteristic matrices must be square, nonempty and of equal size");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ArgumentError("delay must be positive");
  if (!h) return;
  if (h->p.empty() || h->p.back() == 0.0) throw ArgumentError("quasi-polynomial needs a nonzero leading term");
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 10; ++k) {
    const cd lambda(u(rng), u(rng));
    const cd a = h->eval(lambda, tau);
    const cd b = det(lambda);
    if (std::abs(a - b) > 1e-8 * std::max({1.0, std::abs(a), std::abs(b)})) {
      throw ArgumentError("quasi-polynomial disagrees with det(lambda I - A0 - A1 exp(-lambda tau))");
    }
  }
}

std::vector<CharacteristicRoot> rightmost_roots(const CharacteristicProblem& prob, int n_cheb,
                                                std::size_t count) {
  prob.validate();
  if (n_cheb < 10) throw ArgumentError("pseudospectral discretization needs N >= 10");
  const auto n = prob.a0.rows();
  const int nodes = n_cheb + 1;
  const Eigen::MatrixXd d = cheb_diff(n_cheb) * (2.0 / prob.tau);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nodes * n, nodes * n);
  g.block(0, 0, n, n) += prob.a0;
  g.block(0, n_cheb * n, n, n) += prob.a1;
  for (int j = 1; j < nodes; ++j) {
    for (int k = 0; k < nodes; ++k) {
      g.block(j * n, k * n, n, n).diagonal().setConstant(d(j, k));
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(g, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver failed", 0.0);
  std::vector<cd> ev(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(ev.begin(), ev.end(), [](cd a, cd b) { return a.real() > b.real(); });

  std::vector<CharacteristicRoot> upper;
  const std::size_t want = 2 * count + 4;
  for (cd lambda : ev) {
    if (upper.size() >= want) break;
    if (lambda.imag() < -1e-9 * (1.0 + std::abs(lambda))) continue;
    if (std::abs(lambda.imag()) <= 1e-9 * (1.0 + std::abs(lambda))) lambda = lambda.real();
    auto r = newton_refine(prob, lambda);
    if (r.refined && std::abs(r.lambda.imag()) <= 1e-12 * (1.0 + std::abs(r.lambda))) {
      r.lambda = r.lambda.real();
    }
    if (r.refined && r.lambda.imag() < 0.0) r.lambda = std::conj(r.lambda);
    const bool dup = std::any_of(upper.begin(), upper.end(), [&](const CharacteristicRoot& o) {
      return std::abs(o.lambda - r.lambda) < 1e-8 * (1.0 + std::abs(r.lambda));
    });
    if (!dup) upper.push_back(r);
  }

  std::vector<CharacteristicRoot> all;
  for (const auto& r : upper) {
    all.push_back(r);
    if (r.lambda.imag() != 0.0) all.push_back({std::conj(r.lambda), r.residual, r.refined});
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() > b.lambda.real();
    return a.lambda.imag() > b.lambda.imag();
  });
  if (all.size() > count) {
    std::size_t keep = count;
    // Keep conjugate pairs together.
    if (all[keep - 1].lambda.imag() > 0.0) ++keep;
    all.resize(std::min(keep, all.size()));
  }
  return all;
}

double spectral_abscissa(const CharacteristicProblem& prob, int n_cheb) {
  const auto roots = rightmost_roots(prob, n_cheb, 2);
  return roots.empty() ? -std::numeric_limits<double>::infinity() : roots.front().lambda.real();
}

std::vector<Crossing> crossings(const QuasiPolynomial& h, int branches, double omega_max) {
  if (h.p.empty() || h.p.back() == 0.0) throw ArgumentError("quasi-polynomial needs a nonzero leading term");
  if (branches < 0) throw ArgumentError("branch count must be non-negative");
  std::vector<Crossing> out;
  if (std::all_of(h.q.begin(), h.q.end(), [](double c) { return c == 0.0; })) return out;
  const double wmax = omega_max > 0.0 ? omega_max : 10.0 * std::max(1.0, cauchy_bound(h));
  const double wmin = wmax * 1e-7;
  const double decades = std::log10(wmax / wmin);
  const auto npts = static_cast<std::size_t>(std::ceil(2000.0 * decades));

  double w_prev = wmin;
  double f_prev = modulus_gap(h, w_prev);
  std::vector<double> roots;
  for (std::size_t k = 1; k <= npts; ++k) {
    const double w = wmin * std::pow(10.0, decades * static_cast<double>(k) / static_cast<double>(npts));
    const double f = modulus_gap(h, w);
    if (f == 0.0) {
      roots.push_back(w);
    } else if (f_prev != 0.0 && (f < 0.0) != (f_prev < 0.0)) {
      double a = w_prev;
      double b = w;
      double fa = f_prev;
      for (int it = 0; it < 200 && b - a > 4e-16 * b; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = modulus_gap(h, m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    w_prev = w;
    f_prev = f;
  }

  for (double w : roots) {
    const cd iw(0.0, w);
    const cd pq = -poly_eval(h.p, iw) / poly_eval(h.q, iw);
    double t0 = std::fmod(-std::arg(pq), kTwoPi);
    if (t0 < 0.0) t0 += kTwoPi;
    Crossing c;
    c.omega = w;
    for (int k = 0; k <= branches; ++k) c.taus.push_back((t0 + kTwoPi * k) / w);
    if (c.taus.front() <= 0.0) c.taus.erase(c.taus.begin());
    const double tref = c.taus.empty() ? t0 / w : c.taus.front();
    const cd dl = -h.dtau(iw, tref) / h.dlambda(iw, tref);
    c.direction = dl.real() > 0.0 ? 1 : (dl.real() < 0.0 ? -1 : 0);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<CrossingEvent> crossing_events(const std::vector<Crossing>& set, double tau_max) {
  std::vector<CrossingEvent> ev;
  for (const auto& c : set) {
    for (double t : c.taus) {
      if (t <= tau_max) ev.push_back({t, c.omega, c.direction});
    }
  }
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });
  return ev;
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
  std::vector<double> c = coeffs;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.size() <= 1) return {};
  const auto deg = static_cast<Eigen::Index>(c.size() - 1);
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  return {es.eigenvalues().begin(), es.eigenvalues().end()};
}

std::vector<StabilityWindow> stability_windows(const CharacteristicProblem& prob, double tau_max, int n_cheb) {
  prob.validate();
  if (!(tau_max > 0.0)) throw ArgumentError("tau_max must be positive");
  if (!prob.h) throw ArgumentError("stability windows need a scalar quasi-polynomial reduction");
  const auto& h = *prob.h;

  // Roots of the delay-free polynomial P + Q in the right half-plane.
  std::vector<double> sum(std::max(h.p.size(), h.q.size()), 0.0);
  for (std::size_t k = 0; k < h.p.size(); ++k) sum[k] += h.p[k];
  for (std::size_t k = 0; k < h.q.size(); ++k) sum[k] += h.q[k];
  int count = 0;
  for (auto r : polynomial_roots(sum)) count += r.real() > 0.0 ? 1 : 0;

  auto set = crossings(h, 0);
  for (auto& c : set) {
    const int k = static_cast<int>(std::ceil(tau_max * c.omega / kTwoPi)) + 1;
    const double t0 = c.taus.empty() ? 0.0 : c.taus.front();
    c.taus.clear();
    for (int j = 0; j <= k; ++j) c.taus.push_back(t0 + kTwoPi * j / c.omega);
  }
  const auto events = crossing_events(set, tau_max);

  std::vector<StabilityWindow> windows;
  double from = 0.0;
  for (std::size_t i = 0; i <= events.size(); ++i) {
    const double to = i < events.size() ? events[i].tau : tau_max;
    if (to > from) {
      StabilityWindow w;
      w.from = from;
      w.to = to;
      w.unstable_roots = count;
      if (i > 0 && events[i - 1].direction < 0 && count == 0) {
        w.hopf_at_from = true;
        w.hopf_omega = events[i - 1].omega;
      }
      windows.push_back(w);
    }
    if (i < events.size()) {
      count += 2 * events[i].direction;
      from = to;
    }
  }

  parallel_for(windows.size(), 0, [&](std::size_t i) {
    auto& w = windows[i];
    if (w.unstable_roots < 0) {
      w.consistent = false;
      return;
    }
    const double mid = 0.5 * (w.from + w.to);
    const auto roots = rightmost_roots(prob.with_tau(mid), n_cheb, static_cast<std::size_t>(w.unstable_roots) + 4);
    int unstable = 0;
    for (const auto& r : roots) unstable += r.lambda.real() > 0.0 ? 1 : 0;
    w.consistent = unstable == w.unstable_roots;
  });
  return windows;
}

Eigen::VectorXcd critical_eigenvector(const CharacteristicProblem& prob, double omega) {
  const Eigen::MatrixXcd m = char_matrix(prob, cd(0.0, omega));
  const auto n = m.rows();
  if (n == 1) {
    if (std::abs(m(0, 0)) > 1e-8) throw ArgumentError("i*omega is not a characteristic root");
    return Eigen::VectorXcd::Ones(1);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s(0));
  if (s(n - 1) > 1e-8 * scale) throw ArgumentError("i*omega is not a characteristic root");
  if (s(n - 2) < 1e-6 * scale) throw ArgumentError("critical eigenvalue is not simple");
  Eigen::VectorXcd v = svd.matrixV().col(n - 1);
  return v / v.norm();
}

}  // namespace roa
