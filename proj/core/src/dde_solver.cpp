#include "roa/dde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "roa/errors.hpp"

namespace roa {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

class WindowSource final : public SegmentSource {
 public:
  WindowSource(Segment initial, std::shared_ptr<const DenseOutput> dense, double t)
      : initial_(std::move(initial)), dense_(std::move(dense)), t_(t) {}

  void evaluate(double theta, Side side, std::span<double> out) const override {
    const double s = t_ + theta;
    if (s < 0.0 || (s == 0.0 && side == Side::Left)) {
      initial_.source().evaluate(std::max(s, -initial_.tau()), side, out);
    } else {
      dense_->evaluate(std::min(s, dense_->t_end()), out);
    }
  }

 private:
  Segment initial_;
  std::shared_ptr<const DenseOutput> dense_;
  double t_;
};

double max_abs_dev(std::span<const double> y, std::span<const double> xe) {
  double r = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) r += (y[i] - xe[i]) * (y[i] - xe[i]);
  return std::sqrt(r);
}

}  // namespace

void SolverOptions::validate() const {
  if (!(rtol > 0.0) || !(atol >= 0.0) || !std::isfinite(rtol) || !std::isfinite(atol)) {
    throw ArgumentError("solver tolerances must be positive");
  }
  if (rtol < 100.0 * kEps) throw ArgumentError("relative tolerance below machine precision");
  if (max_step < 0.0 || initial_step < 0.0) throw ArgumentError("step sizes must be non-negative");
  if (stop_radius < 0.0) throw ArgumentError("stop radius must be non-negative");
  if (stop_radius > 0.0 && !stop_norm) throw ArgumentError("stop radius given without a stop norm");
  if (!(blowup_radius > 0.0)) throw ArgumentError("blowup radius must be positive");
  if (smoothing_depth < 0) throw ArgumentError("smoothing depth must be non-negative");
}

void DenseOutput::start(double t0, std::span<const double> y0) {
  t_.assign(1, t0);
  y_.assign(y0.begin(), y0.end());
  dl_.clear();
  dr_.clear();
}

void DenseOutput::append(double t1, std::span<const double> y1, std::span<const double> d_left,
                         std::span<const double> d_right) {
  t_.push_back(t1);
  y_.insert(y_.end(), y1.begin(), y1.end());
  dl_.insert(dl_.end(), d_left.begin(), d_left.end());
  dr_.insert(dr_.end(), d_right.begin(), d_right.end());
}

std::size_t DenseOutput::locate(double t, std::size_t* hint) const {
  const std::size_t nsteps = steps();
  if (hint && *hint < nsteps && t_[*hint] <= t && t <= t_[*hint + 1]) return *hint;
  if (hint && *hint + 1 < nsteps && t_[*hint + 1] <= t && t <= t_[*hint + 2]) return ++*hint;
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t k = it == t_.begin() ? 0 : static_cast<std::size_t>(it - t_.begin()) - 1;
  if (k >= nsteps) k = nsteps - 1;
  if (hint) *hint = k;
  return k;
}

void DenseOutput::evaluate(double t, std::span<double> out, std::size_t* hint) const {
  if (t_.empty()) throw RangeError("dense output is empty");
  if (steps() == 0 || t == t_.front()) {
    if (std::abs(t - t_.front()) > 1e-12 * (1.0 + std::abs(t))) {
      throw RangeError("time outside dense output range");
    }
    std::copy_n(y_.begin(), dim_, out.begin());
    return;
  }
  const double slack = 1e-12 * (1.0 + std::abs(t_.back()));
  if (t < t_.front() - slack || t > t_.back() + slack) {
    std::ostringstream msg;
    msg << "time " << t << " outside dense output range [" << t_.front() << ", " << t_.back() << "]";
    throw RangeError(msg.str());
  }
  const std::size_t k = locate(t, hint);
  const double h = t_[k + 1] - t_[k];
  const double s = (t - t_[k]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  const double* y0 = y_.data() + k * dim_;
  const double* y1 = y0 + dim_;
  const double* d0 = dl_.data() + k * dim_;
  const double* d1 = dr_.data() + k * dim_;
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = h00 * y0[i] + h * h10 * d0[i] + h01 * y1[i] + h * h11 * d1[i];
  }
}

void DenseOutput::derivative(double t, std::span<double> out, std::size_t* hint) const {
  if (steps() == 0) throw RangeError("dense output has no steps");
  const std::size_t k = locate(std::clamp(t, t_.front(), t_.back()), hint);
  const double h = t_[k + 1] - t_[k];
  const double s = (std::clamp(t, t_.front(), t_.back()) - t_[k]) / h;
  const double s2 = s * s;
  const double g00 = (6 * s2 - 6 * s) / h;
  const double g10 = 3 * s2 - 4 * s + 1;
  const double g01 = (-6 * s2 + 6 * s) / h;
  const double g11 = 3 * s2 - 2 * s;
  const double* y0 = y_.data() + k * dim_;
  const double* y1 = y0 + dim_;
  const double* d0 = dl_.data() + k * dim_;
  const double* d1 = dr_.data() + k * dim_;
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = g00 * y0[i] + g10 * d0[i] + g01 * y1[i] + g11 * d1[i];
  }
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ConvergedAt: return "converged";
    case Termination::HorizonReached: return "horizon";
    case Termination::Blowup: return "blowup";
  }
  return "unknown";
}

Trajectory::Trajectory(Model model, Segment initial, std::shared_ptr<const DenseOutput> dense,
                       Termination termination, double termination_time,
                       std::vector<double> forced_times)
    : model_(std::move(model)),
      initial_(std::move(initial)),
      dense_(std::move(dense)),
      termination_(termination),
      termination_time_(termination_time),
      forced_(std::move(forced_times)) {}

void Trajectory::at(double t, std::span<double> out, Side side) const {
  if (t < 0.0 || (t == 0.0 && side == Side::Left)) {
    initial_.evaluate(t, out, side);
  } else {
    dense_->evaluate(t, out);
  }
}

std::vector<double> Trajectory::at(double t) const {
  std::vector<double> v(model_.dim);
  at(t, v);
  return v;
}

Segment window_segment(const Segment& initial, std::shared_ptr<const DenseOutput> dense, double t) {
  const double tau = initial.tau();
  std::vector<double> bps;
  for (double b : initial.breakpoints()) {
    const double theta = b - t;
    if (theta >= -tau) bps.push_back(theta);
  }
  if (t > 0.0 && t < tau) bps.push_back(-t);
  auto src = std::make_shared<WindowSource>(initial, std::move(dense), t);
  return Segment(tau, initial.dim(), std::move(src), std::move(bps));
}

Segment segment_at(const Trajectory& traj, double t) {
  if (!(t >= 0.0) || t > traj.t_end() * (1.0 + 1e-14) + 1e-300) {
    std::ostringstream msg;
    msg << "segment time " << t << " outside [0, " << traj.t_end() << "]";
    throw RangeError(msg.str());
  }
  return window_segment(traj.initial(), traj.dense_ptr(), std::min(t, traj.t_end()));
}

Trajectory integrate(const Model& model, const Segment& initial, double horizon,
                     const SolverOptions& opts) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ArgumentError("horizon must be positive");
  opts.validate();
  if (initial.dim() != model.dim) throw ArgumentError("initial segment dimension mismatch");
  const double tau = model.tau;
  if (std::abs(initial.tau() - tau) > 1e-12 * tau) {
    throw ArgumentError("initial segment domain does not match the model delay");
  }
  const std::size_t n = model.dim;
  const auto xe = model.equilibrium_point();
  const double max_step = opts.max_step > 0.0 ? std::min(opts.max_step, tau) : tau / 4.0;

  // History breakpoints (plus θ = 0) propagate to d + kτ.
  std::vector<double> sources = initial.breakpoints();
  sources.push_back(0.0);
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  std::vector<double> forced;
  for (double d : sources) {
    for (int k = 1; k <= opts.smoothing_depth; ++k) {
      const double tf = d + k * tau;
      if (tf > 0.0 && tf < horizon) forced.push_back(tf);
    }
  }
  std::sort(forced.begin(), forced.end());
  {
    std::vector<double> merged;
    for (double tf : forced) {
      if (merged.empty() || tf - merged.back() > 1e-12 * (tau + tf)) merged.push_back(tf);
    }
    forced.swap(merged);
  }
  const double snap_tol = 64.0 * kEps * (tau + horizon);

  auto dense = std::make_shared<DenseOutput>(n);
  std::vector<double> y(n), ynew(n), k1(n), k2(n), k3(n), k4(n), stage(n), xd(n);
  initial.evaluate(0.0, y, Side::Right);
  dense->start(0.0, y);

  auto finish = [&](Termination term, double t_term) {
    return Trajectory(model, initial, dense, term, t_term, forced);
  };

  if (opts.stop_radius > 0.0) {
    if (opts.stop_norm(shift(initial, xe)) < opts.stop_radius) {
      return finish(Termination::ConvergedAt, 0.0);
    }
  }
  if (max_abs_dev(y, xe) > opts.blowup_radius) return finish(Termination::Blowup, 0.0);

  std::size_t hint = 0;
  // Delayed value for a stage at time ts; `at_end` selects left limits so a
  // step ending on a propagated jump sees the history it integrated over.
  auto delayed = [&](double ts, bool at_end, std::span<double> out) {
    double s = ts - tau;
    if (s <= snap_tol) {
      for (double d : sources) {
        if (std::abs(s - d) <= snap_tol) {
          s = d;
          break;
        }
      }
    }
    if (s < 0.0 || (s == 0.0 && at_end)) {
      initial.source().evaluate(std::max(s, -tau), at_end ? Side::Left : Side::Right, out);
    } else {
      dense->evaluate(s, out, &hint);
    }
  };

  auto rhs = [&](double ts, bool at_end, std::span<const double> x, std::span<double> out) {
    delayed(ts, at_end, xd);
    model.rhs(x, xd, out);
  };

  double t = 0.0;
  rhs(t, false, y, k1);

  double h = opts.initial_step;
  if (h <= 0.0) {
    double d0 = 0.0;
    double d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = opts.atol + opts.rtol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * std::max(1.0, tau) : 0.01 * d0 / d1;
  }
  h = std::min(h, max_step);

  std::size_t next_forced = 0;
  double last_stop_check = -std::numeric_limits<double>::infinity();
  std::size_t accepted = 0;

  while (t < horizon) {
    h = std::min(h, max_step);
    double t_target = t + h;
    bool hit_forced = false;
    while (next_forced < forced.size() && forced[next_forced] <= t + snap_tol) ++next_forced;
    if (next_forced < forced.size() && t + 1.1 * h >= forced[next_forced]) {
      t_target = forced[next_forced];
      hit_forced = true;
    }
    if (!hit_forced && t + 1.1 * h >= horizon) t_target = horizon;
    h = t_target - t;

    const double hmin = opts.min_step_factor * kEps * std::max(1.0, std::abs(t));
    if (h < hmin) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t;
      throw SolverError(msg.str(), t);
    }

    for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, false, stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + 0.75 * h * k2[i];
    rhs(t + 0.75 * h, false, stage, k3);
    for (std::size_t i = 0; i < n; ++i) {
      ynew[i] = y[i] + h * (2.0 / 9.0 * k1[i] + 1.0 / 3.0 * k2[i] + 4.0 / 9.0 * k3[i]);
    }
    rhs(t_target, true, ynew, k4);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (-5.0 / 72.0 * k1[i] + 1.0 / 12.0 * k2[i] + 1.0 / 9.0 * k3[i] - 0.125 * k4[i]);
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / sc);
      finite = finite && std::isfinite(ynew[i]);
    }
    if (!finite) err = std::numeric_limits<double>::infinity();

    if (err <= 1.0) {
      dense->append(t_target, ynew, k1, k4);
      t = t_target;
      y.swap(ynew);
      if (hit_forced) {
        ++next_forced;
        rhs(t, false, y, k1);
      } else {
        k1.swap(k4);
      }
      if (++accepted > opts.max_steps) throw SolverError("maximum number of steps exceeded", t);

      const double dev = max_abs_dev(y, xe);
      if (dev > opts.blowup_radius) return finish(Termination::Blowup, t);
      if (opts.stop_radius > 0.0 && dev < opts.stop_radius &&
          t - last_stop_check >= opts.stop_check_fraction * tau) {
        last_stop_check = t;
        const Segment state = shift(window_segment(initial, dense, t), xe);
        if (opts.stop_norm(state) < opts.stop_radius) return finish(Termination::ConvergedAt, t);
      }
      const double fac = err == 0.0 ? 5.0 : std::min(5.0, 0.8 * std::pow(err, -1.0 / 3.0));
      h *= fac;
    } else {
      const double fac = std::isfinite(err) ? std::max(0.1, 0.8 * std::pow(err, -1.0 / 3.0)) : 0.1;
      h *= fac;
    }
  }
  return finish(Termination::HorizonReached, horizon);
}

std::string trajectory_csv(const Trajectory& traj, std::size_t uniform_points) {
  const double tau = traj.tau();
  const double t_end = traj.t_end();
  std::vector<double> times(traj.mesh());
  if (uniform_points >= 2) {
    for (std::size_t k = 0; k < uniform_points; ++k) {
      times.push_back(-tau + (t_end + tau) * static_cast<double>(k) / (uniform_points - 1));
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::string out = "t";
  for (std::size_t i = 0; i < traj.model().dim; ++i) out += ",x_" + std::to_string(i + 1);
  out += '\n';
  std::vector<double> v(traj.model().dim);
  char buf[64];
  for (double t : times) {
    traj.at(std::min(t, t_end), v);
    std::snprintf(buf, sizeof buf, "%.12g", t);
    out += buf;
    for (double x : v) {
      std::snprintf(buf, sizeof buf, ",%.12g", x);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace roa
