#include "roa/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "orbit_detail.hpp"
#include "roa/errors.hpp"

namespace roa {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Lagrange basis on the equidistant nodes k/m, k = 0..m.
void lagrange(int m, double s, double* val, double* der) {
  for (int k = 0; k <= m; ++k) {
    const double sk = static_cast<double>(k) / m;
    double v = 1.0;
    double d = 0.0;
    for (int j = 0; j <= m; ++j) {
      if (j == k) continue;
      const double sj = static_cast<double>(j) / m;
      const double factor = (s - sj) / (sk - sj);
      d = d * factor + v / (sk - sj);
      v *= factor;
    }
    val[k] = v;
    if (der) der[k] = d;
  }
}

// Gauss–Legendre nodes and weights on [0, 1] (Golub–Welsch).
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jm(k, k - 1) = b;
    jm(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
  x.resize(static_cast<std::size_t>(m));
  w.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    x[static_cast<std::size_t>(k)] = 0.5 * (es.eigenvalues()(k) + 1.0);
    const double v0 = es.eigenvectors()(0, k);
    w[static_cast<std::size_t>(k)] = v0 * v0;  // weights on [−1,1] are 2v0², halved for [0,1]
  }
}

struct Locator {
  int interval;
  double s;
};

Locator locate(double that, int intervals) {
  double w = that - std::floor(that);
  if (w >= 1.0) w = 0.0;
  int i = static_cast<int>(std::floor(w * intervals));
  i = std::clamp(i, 0, intervals - 1);
  return {i, w * intervals - i};
}

class OrbitSource final : public SegmentSource {
 public:
  OrbitSource(PeriodicOrbit orbit, double t) : orbit_(std::move(orbit)), t_(t) {}
  void evaluate(double theta, Side, std::span<double> out) const override {
    orbit_.profile((t_ + theta) / orbit_.period(), out);
    const auto& xe = orbit_.equilibrium();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= xe[i];
  }

 private:
  PeriodicOrbit orbit_;
  double t_;
};

// Collocation system. Unknowns: nodal values, T, and τ when `free_tau`.
class Collocation {
 public:
  Collocation(const Model& model, const CollocationOptions& opts, const PeriodicOrbit& ref, bool free_tau,
              double amplitude)
      : model_(model),
        n_(model.dim),
        l_(opts.intervals),
        m_(opts.degree),
        free_tau_(free_tau),
        amplitude_(amplitude),
        xe_(model.equilibrium_point()) {
    gauss_legendre(m_, g_, w_);
    const auto mm = static_cast<std::size_t>(m_);
    lv_.assign(mm * (mm + 1), 0.0);
    ld_.assign(mm * (mm + 1), 0.0);
    for (std::size_t j = 0; j < mm; ++j) lagrange(m_, g_[j], &lv_[j * (mm + 1)], &ld_[j * (mm + 1)]);
    // ż_ref at every collocation point.
    zref_.resize(static_cast<std::size_t>(l_) * mm * n_);
    for (int i = 0; i < l_; ++i) {
      for (std::size_t j = 0; j < mm; ++j) {
        const double c = (i + g_[j]) / l_;
        ref.profile_derivative(c, {&zref_[(static_cast<std::size_t>(i) * mm + j) * n_], n_});
      }
    }
  }

  [[nodiscard]] std::size_t nodes() const { return static_cast<std::size_t>(l_ * m_ + 1); }
  [[nodiscard]] std::size_t unknowns() const { return nodes() * n_ + 1 + (free_tau_ ? 1 : 0); }
  [[nodiscard]] std::size_t t_index() const { return nodes() * n_; }
  [[nodiscard]] std::size_t tau_index() const { return nodes() * n_ + 1; }
  [[nodiscard]] std::size_t colloc_rows() const { return static_cast<std::size_t>(l_ * m_) * n_; }

  // Fills F and (optionally) J; returns the max collocation residual.
  double assemble(const Eigen::VectorXd& x, double tau_fixed, Eigen::VectorXd& f, Eigen::MatrixXd* jac,
                  double* phase_value) const {
    const std::size_t nu = unknowns();
    const std::size_t n = n_;
    const double period = x(static_cast<Eigen::Index>(t_index()));
    const double tau = free_tau_ ? x(static_cast<Eigen::Index>(tau_index())) : tau_fixed;
    f.setZero(static_cast<Eigen::Index>(nu));
    if (jac) jac->setZero(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nu));
    const auto mm = static_cast<std::size_t>(m_);
    std::vector<double> z(n), zp(n), zd(n), zdp(n), rhs(n), lvd(mm + 1), ldd(mm + 1);
    Eigen::MatrixXd fx(n, n), fxd(n, n);
    double max_res = 0.0;
    double phase = 0.0;
    double amp = 0.0;
    auto node = [&](std::size_t k, std::size_t c) { return x(static_cast<Eigen::Index>(k * n + c)); };
    const double shift = tau / period;
    const std::size_t tcol = t_index();
    const std::size_t phase_row = colloc_rows() + n;
    const std::size_t amp_row = phase_row + 1;

    for (int i = 0; i < l_; ++i) {
      for (std::size_t j = 0; j < mm; ++j) {
        const double* lv = &lv_[j * (mm + 1)];
        const double* ld = &ld_[j * (mm + 1)];
        const std::size_t base = static_cast<std::size_t>(i) * mm;
        for (std::size_t c = 0; c < n; ++c) {
          double a = 0.0;
          double b = 0.0;
          for (std::size_t k = 0; k <= mm; ++k) {
            a += lv[k] * node(base + k, c);
            b += ld[k] * node(base + k, c);
          }
          z[c] = a;
          zp[c] = b * l_;
        }
        const double cpt = (i + g_[j]) / l_;
        const Locator dl = locate(cpt - shift, l_);
        lagrange(m_, dl.s, lvd.data(), ldd.data());
        const std::size_t dbase = static_cast<std::size_t>(dl.interval) * mm;
        for (std::size_t c = 0; c < n; ++c) {
          double a = 0.0;
          double b = 0.0;
          for (std::size_t k = 0; k <= mm; ++k) {
            a += lvd[k] * node(dbase + k, c);
            b += ldd[k] * node(dbase + k, c);
          }
          zd[c] = a;
          zdp[c] = b * l_;
        }
        model_.rhs(z, zd, rhs);
        const std::size_t row0 = (base + j) * n;
        for (std::size_t c = 0; c < n; ++c) {
          const double r = zp[c] - period * rhs[c];
          f(static_cast<Eigen::Index>(row0 + c)) = r;
          max_res = std::max(max_res, std::abs(r));
        }
        const double wq = w_[j] / l_;
        const double* zr = &zref_[(base + j) * n];
        for (std::size_t c = 0; c < n; ++c) {
          phase += wq * zr[c] * z[c];
          amp += wq * (z[c] - xe_[c]) * (z[c] - xe_[c]);
        }
        if (!jac) continue;
        model_.jacobian_at(z, zd, fx, fxd);
        auto& jm = *jac;
        for (std::size_t r = 0; r < n; ++r) {
          const auto row = static_cast<Eigen::Index>(row0 + r);
          for (std::size_t k = 0; k <= mm; ++k) {
            const std::size_t col = (base + k) * n;
            jm(row, static_cast<Eigen::Index>(col + r)) += l_ * ld[k];
            for (std::size_t c = 0; c < n; ++c) {
              jm(row, static_cast<Eigen::Index>(col + c)) -= period * fx(r, c) * lv[k];
            }
            const std::size_t dcol = (dbase + k) * n;
            for (std::size_t c = 0; c < n; ++c) {
              jm(row, static_cast<Eigen::Index>(dcol + c)) -= period * fxd(r, c) * lvd[k];
            }
          }
          double fxd_zdp = 0.0;
          for (std::size_t c = 0; c < n; ++c) fxd_zdp += fxd(r, c) * zdp[c];
          jm(row, static_cast<Eigen::Index>(tcol)) = -rhs[r] - fxd_zdp * shift;
          if (free_tau_) jm(row, static_cast<Eigen::Index>(tau_index())) = fxd_zdp;
        }
        for (std::size_t k = 0; k <= mm; ++k) {
          const std::size_t col = (base + k) * n;
          for (std::size_t c = 0; c < n; ++c) {
            jm(static_cast<Eigen::Index>(phase_row), static_cast<Eigen::Index>(col + c)) += wq * zr[c] * lv[k];
            if (free_tau_) {
              jm(static_cast<Eigen::Index>(amp_row), static_cast<Eigen::Index>(col + c)) +=
                  2.0 * wq * (z[c] - xe_[c]) * lv[k];
            }
          }
        }
      }
    }
    const std::size_t last = nodes() - 1;
    for (std::size_t c = 0; c < n; ++c) {
      const auto row = static_cast<Eigen::Index>(colloc_rows() + c);
      f(row) = node(0, c) - node(last, c);
      max_res = std::max(max_res, std::abs(f(row)));
      if (jac) {
        (*jac)(row, static_cast<Eigen::Index>(c)) = 1.0;
        (*jac)(row, static_cast<Eigen::Index>(last * n + c)) = -1.0;
      }
    }
    f(static_cast<Eigen::Index>(phase_row)) = phase;
    if (free_tau_) f(static_cast<Eigen::Index>(amp_row)) = amp - amplitude_ * amplitude_;
    if (phase_value) *phase_value = phase;
    return max_res;
  }

 private:
  const Model& model_;
  std::size_t n_;
  int l_;
  int m_;
  bool free_tau_;
  double amplitude_;
  std::vector<double> xe_;
  std::vector<double> g_;
  std::vector<double> w_;
  std::vector<double> lv_;
  std::vector<double> ld_;
  std::vector<double> zref_;
};

PeriodicOrbit newton_solve(const Model& model, double tau, const PeriodicOrbit& guess, const PeriodicOrbit& ref,
                           const CollocationOptions& opts, bool free_tau, double amplitude) {
  opts.validate();
  model.validate();
  if (guess.dim() != model.dim) throw ArgumentError("orbit guess dimension mismatch");
  PeriodicOrbit start = (guess.intervals() == opts.intervals && guess.degree() == opts.degree)
                            ? guess
                            : remesh(guess, opts.intervals, opts.degree);
  const PeriodicOrbit ref_mesh = ref;
  const Collocation sys(model, opts, ref_mesh, free_tau, amplitude);
  const auto nu = static_cast<Eigen::Index>(sys.unknowns());
  const auto nn = static_cast<Eigen::Index>(sys.nodes() * model.dim);

  Eigen::VectorXd x(nu);
  for (Eigen::Index k = 0; k < nn; ++k) x(k) = start.nodes()[static_cast<std::size_t>(k)];
  x(nn) = start.period();
  if (free_tau) x(nn + 1) = start.tau();

  Eigen::VectorXd f(nu), f_trial(nu);
  Eigen::MatrixXd jac(nu, nu);
  double last_step = std::numeric_limits<double>::infinity();
  double phase = 0.0;
  int it = 0;
  double res = sys.assemble(x, tau, f, &jac, &phase);
  double fnorm = f.lpNorm<Eigen::Infinity>();
  for (;; ++it) {
    if (!std::isfinite(fnorm)) throw ConvergenceError("collocation residual is not finite", fnorm);
    if (fnorm < opts.residual_tol && last_step < opts.step_tol) break;
    if (it >= opts.max_iterations) {
      throw ConvergenceError("collocation Newton did not converge", fnorm);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    if (!(lu.rcond() > 1e-14)) {
      throw ConvergenceError("collocation Jacobian is singular", fnorm, true);
    }
    const Eigen::VectorXd dx = lu.solve(-f);
    // Damped step: halve while the residual grows substantially.
    double lambda = 1.0;
    Eigen::VectorXd trial;
    double trial_norm = 0.0;
    for (int k = 0; k < 8; ++k) {
      trial = x + lambda * dx;
      sys.assemble(trial, tau, f_trial, nullptr, nullptr);
      trial_norm = f_trial.lpNorm<Eigen::Infinity>();
      if (std::isfinite(trial_norm) && (trial_norm < 2.0 * fnorm + 1e-12 || k == 7)) break;
      lambda *= 0.5;
    }
    x = trial;
    last_step = (lambda * dx).lpNorm<Eigen::Infinity>();
    if (!(x(nn) > 0.0)) throw ConvergenceError("period became non-positive", trial_norm);
    if (free_tau && !(x(nn + 1) > 0.0)) throw ConvergenceError("delay became non-positive", trial_norm);
    res = sys.assemble(x, tau, f, &jac, &phase);
    fnorm = f.lpNorm<Eigen::Infinity>();
  }

  std::vector<double> nodes(static_cast<std::size_t>(nn));
  for (Eigen::Index k = 0; k < nn; ++k) nodes[static_cast<std::size_t>(k)] = x(k);
  PeriodicOrbit out(model.dim, free_tau ? x(nn + 1) : tau, x(nn), opts.intervals, opts.degree, std::move(nodes),
                    model.equilibrium_point());
  out.set_solution_info(res, std::abs(phase), it, true);
  return out;
}

}  // namespace

void CollocationOptions::validate() const {
  if (intervals < 2) throw ArgumentError("collocation needs at least 2 intervals");
  if (degree < 1 || degree > 10) throw ArgumentError("collocation degree must lie in [1, 10]");
  if (!(residual_tol > 0.0) || !(step_tol > 0.0)) throw ArgumentError("Newton tolerances must be positive");
  if (max_iterations < 1) throw ArgumentError("Newton needs at least one iteration");
}

PeriodicOrbit::PeriodicOrbit(std::size_t dim, double tau, double period, int intervals, int degree,
                             std::vector<double> nodes, std::vector<double> equilibrium)
    : dim_(dim),
      tau_(tau),
      period_(period),
      intervals_(intervals),
      degree_(degree),
      nodes_(std::move(nodes)),
      xe_(std::move(equilibrium)) {
  if (dim == 0 || intervals < 1 || degree < 1) throw ArgumentError("invalid orbit mesh");
  if (nodes_.size() != dim * node_count()) throw ArgumentError("orbit node array has the wrong size");
  if (!(period > 0.0)) throw ArgumentError("orbit period must be positive");
  if (xe_.empty()) xe_.assign(dim, 0.0);
  if (xe_.size() != dim) throw ArgumentError("orbit equilibrium dimension mismatch");
}

void PeriodicOrbit::profile(double that, std::span<double> out) const {
  const Locator loc = locate(that, intervals_);
  double lv[16];
  lagrange(degree_, loc.s, lv, nullptr);
  const std::size_t base = static_cast<std::size_t>(loc.interval * degree_);
  for (std::size_t c = 0; c < dim_; ++c) {
    double a = 0.0;
    for (int k = 0; k <= degree_; ++k) a += lv[k] * nodes_[(base + static_cast<std::size_t>(k)) * dim_ + c];
    out[c] = a;
  }
}

std::vector<double> PeriodicOrbit::profile(double that) const {
  std::vector<double> v(dim_);
  profile(that, v);
  return v;
}

void PeriodicOrbit::profile_derivative(double that, std::span<double> out) const {
  const Locator loc = locate(that, intervals_);
  double lv[16];
  double ld[16];
  lagrange(degree_, loc.s, lv, ld);
  const std::size_t base = static_cast<std::size_t>(loc.interval * degree_);
  for (std::size_t c = 0; c < dim_; ++c) {
    double a = 0.0;
    for (int k = 0; k <= degree_; ++k) a += ld[k] * nodes_[(base + static_cast<std::size_t>(k)) * dim_ + c];
    out[c] = a * intervals_;
  }
}

double PeriodicOrbit::closure() const {
  const std::size_t last = node_count() - 1;
  double s = 0.0;
  for (std::size_t c = 0; c < dim_; ++c) {
    const double d = nodes_[c] - nodes_[last * dim_ + c];
    s += d * d;
  }
  return std::sqrt(s);
}

double PeriodicOrbit::amplitude() const {
  std::vector<double> g;
  std::vector<double> w;
  gauss_legendre(std::max(degree_, 2), g, w);
  std::vector<double> z(dim_);
  double acc = 0.0;
  for (int i = 0; i < intervals_; ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      profile((i + g[j]) / intervals_, z);
      for (std::size_t c = 0; c < dim_; ++c) acc += w[j] / intervals_ * (z[c] - xe_[c]) * (z[c] - xe_[c]);
    }
  }
  return std::sqrt(acc);
}

double PeriodicOrbit::max_deviation() const {
  double best = 0.0;
  for (std::size_t k = 0; k < node_count(); ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) {
      const double d = nodes_[k * dim_ + c] - xe_[c];
      s += d * d;
    }
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

double PeriodicOrbit::min_deviation(std::size_t samples) const {
  std::vector<double> z(dim_);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples; ++k) {
    profile(static_cast<double>(k) / static_cast<double>(samples), z);
    double s = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) s += (z[c] - xe_[c]) * (z[c] - xe_[c]);
    best = std::min(best, std::sqrt(s));
  }
  return best;
}

Segment PeriodicOrbit::deviation_segment(double t) const {
  if (!(tau_ > 0.0)) throw ArgumentError("orbit has no delay attached");
  return Segment(tau_, dim_, std::make_shared<OrbitSource>(*this, t));
}

std::string PeriodicOrbit::csv(std::size_t points) const {
  std::string out = "t_hat";
  for (std::size_t c = 0; c < dim_; ++c) out += ",z_" + std::to_string(c + 1);
  out += '\n';
  std::vector<double> z(dim_);
  char buf[64];
  for (std::size_t k = 0; k < points; ++k) {
    const double th = points > 1 ? static_cast<double>(k) / static_cast<double>(points - 1) : 0.0;
    if (k + 1 == points && points > 1) {
      const std::size_t last = node_count() - 1;
      for (std::size_t c = 0; c < dim_; ++c) z[c] = nodes_[last * dim_ + c];
    } else {
      profile(th, z);
    }
    std::snprintf(buf, sizeof buf, "%.12g", th);
    out += buf;
    for (double v : z) {
      std::snprintf(buf, sizeof buf, ",%.12g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void PeriodicOrbit::set_solution_info(double residual, double phase_residual, int iterations, bool converged) {
  residual_ = residual;
  phase_residual_ = phase_residual;
  iterations_ = iterations;
  converged_ = converged;
}

double default_hopf_amplitude(const Model& model) {
  double s = 0.0;
  for (double v : model.equilibrium_point()) s += v * v;
  return 1e-2 * (1.0 + std::sqrt(s));
}

PeriodicOrbit hopf_seed(const Model& model, const HopfPoint& hopf, const Eigen::VectorXcd& v, double epsilon,
                        const CollocationOptions& opts) {
  opts.validate();
  if (!(hopf.omega > 0.0) || !(hopf.tau > 0.0)) throw ArgumentError("Hopf point needs omega > 0 and tau > 0");
  if (static_cast<std::size_t>(v.size()) != model.dim) throw ArgumentError("eigenvector dimension mismatch");
  const auto xe = model.equilibrium_point();
  const std::size_t count = static_cast<std::size_t>(opts.intervals * opts.degree + 1);
  std::vector<double> nodes(count * model.dim);
  for (std::size_t k = 0; k < count; ++k) {
    const double th = static_cast<double>(k) / static_cast<double>(count - 1);
    const double c = std::cos(kTwoPi * th);
    const double s = std::sin(kTwoPi * th);
    for (std::size_t i = 0; i < model.dim; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      nodes[k * model.dim + i] = xe[i] + epsilon * (v(ii).real() * c - v(ii).imag() * s);
    }
  }
  return PeriodicOrbit(model.dim, hopf.tau, kTwoPi / hopf.omega, opts.intervals, opts.degree, std::move(nodes), xe);
}

PeriodicOrbit solve_periodic(const Model& model, double tau, const PeriodicOrbit& guess,
                             const CollocationOptions& opts) {
  if (!(tau > 0.0)) throw ArgumentError("delay must be positive");
  return newton_solve(model.with_tau(tau), tau, guess, guess, opts, false, 0.0);
}

PeriodicOrbit solve_periodic_amplitude(const Model& model, double amplitude, const PeriodicOrbit& guess,
                                       const CollocationOptions& opts) {
  if (!(amplitude > 0.0)) throw ArgumentError("amplitude must be positive");
  return newton_solve(model, guess.tau(), guess, guess, opts, true, amplitude);
}

PeriodicOrbit remesh(const PeriodicOrbit& orbit, int intervals, int degree) {
  const std::size_t count = static_cast<std::size_t>(intervals * degree + 1);
  std::vector<double> nodes(count * orbit.dim());
  for (std::size_t k = 0; k < count; ++k) {
    const double th = static_cast<double>(k) / static_cast<double>(count - 1);
    if (k + 1 == count) {
      orbit.profile(0.0, {&nodes[k * orbit.dim()], orbit.dim()});
    } else {
      orbit.profile(th, {&nodes[k * orbit.dim()], orbit.dim()});
    }
  }
  PeriodicOrbit out(orbit.dim(), orbit.tau(), orbit.period(), intervals, degree, std::move(nodes),
                    orbit.equilibrium());
  return out;
}

CycleMinimum min_norm_on_cycle(const PeriodicOrbit& orbit, const NormSpace& space, std::size_t phases) {
  if (phases < 8) throw ArgumentError("phase grid needs at least 8 points");
  if (orbit.min_deviation() < 1e-8) {
    throw ArgumentError("orbit touches the equilibrium; the invariant-set bound does not apply");
  }
  const double period = orbit.period();
  auto value = [&](double t) { return norm(space, orbit.deviation_segment(t)); };
  std::vector<double> v(phases);
  for (std::size_t k = 0; k < phases; ++k) v[k] = value(period * static_cast<double>(k) / static_cast<double>(phases));
  const std::size_t k0 = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
  const double h = period / static_cast<double>(phases);
  const double t0 = h * static_cast<double>(k0);
  const double fl = v[(k0 + phases - 1) % phases];
  const double f0 = v[k0];
  const double fr = v[(k0 + 1) % phases];
  CycleMinimum best{f0, t0};
  const double den = fl - 2.0 * f0 + fr;
  if (den > 0.0) {
    double ts = t0 + 0.5 * h * (fl - fr) / den;
    const double fs = value(ts);
    ts = std::fmod(ts, period);
    if (ts < 0.0) ts += period;
    if (fs < best.value) best = {fs, ts};
  }
  return best;
}

}  // namespace roa

namespace roa::detail {

PeriodicOrbit solve_with_reference(const Model& model, double tau, const PeriodicOrbit& guess,
                                   const PeriodicOrbit& ref, const CollocationOptions& opts) {
  return newton_solve(model.with_tau(tau), tau, guess, ref, opts, false, 0.0);
}

PeriodicOrbit solve_amplitude_with_reference(const Model& model, double amplitude, const PeriodicOrbit& guess,
                                             const PeriodicOrbit& ref, const CollocationOptions& opts) {
  return newton_solve(model, guess.tau(), guess, ref, opts, true, amplitude);
}

}  // namespace roa::detail
