#include <algorithm>
#include <cmath>
#include <numbers>

#include "orbit_detail.hpp"
#include "roa/errors.hpp"
#include "roa/orbit.hpp"
#include "roa/spectral.hpp"

namespace roa {
namespace {

void validate_policy(const StepPolicy& p) {
  if (!(p.initial_step > 0.0) || !(p.min_step > 0.0) || !(p.max_step >= p.min_step)) {
    throw ArgumentError("continuation steps must satisfy 0 < min_step <= max_step and initial_step > 0");
  }
  if (!(p.max_profile_change > 0.0)) throw ArgumentError("max_profile_change must be positive");
  if (p.max_points < 2) throw ArgumentError("max_points must be at least 2");
}

double max_node_change(const PeriodicOrbit& a, const PeriodicOrbit& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.nodes().size(); ++k) d = std::max(d, std::abs(a.nodes()[k] - b.nodes()[k]));
  return d;
}

// prev + (cur − prev)·ratio in (nodes, T, τ).
PeriodicOrbit extrapolate(const PeriodicOrbit& prev, const PeriodicOrbit& cur, double ratio) {
  std::vector<double> nodes(cur.nodes().size());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    nodes[k] = cur.nodes()[k] + (cur.nodes()[k] - prev.nodes()[k]) * ratio;
  }
  const double period = std::max(cur.period() + (cur.period() - prev.period()) * ratio, 0.5 * cur.period());
  const double tau = cur.tau() + (cur.tau() - prev.tau()) * ratio;
  return PeriodicOrbit(cur.dim(), tau, period, cur.intervals(), cur.degree(), std::move(nodes), cur.equilibrium());
}

bool acceptable(const PeriodicOrbit& cand, const PeriodicOrbit& cur, const StepPolicy& policy) {
  if (cand.min_deviation(512) < 1e-6) return false;  // collapsed onto the equilibrium
  return max_node_change(cand, cur) <= policy.max_profile_change * (1.0 + cur.max_deviation());
}

// Extends `branch` in τ towards tau_target from its last point.
void extend(Branch& branch, const Model& model, double tau_target, const StepPolicy& policy,
            const CollocationOptions& opts) {
  const double dir = tau_target >= branch.points.back().tau() ? 1.0 : -1.0;
  double h = policy.initial_step;
  while (branch.points.size() < policy.max_points) {
    const PeriodicOrbit& cur = branch.points.back();
    const double remaining = std::abs(tau_target - cur.tau());
    if (remaining <= 1e-12) {
      branch.completed = true;
      return;
    }
    const double step = std::min(h, remaining);
    const double tau_new = (remaining - step <= 1e-12) ? tau_target : cur.tau() + dir * step;
    PeriodicOrbit guess = cur;
    if (branch.points.size() >= 2) {
      const PeriodicOrbit& prev = branch.points[branch.points.size() - 2];
      const double dtau = cur.tau() - prev.tau();
      if (std::abs(dtau) > 1e-3 * step && dtau * dir > 0.0) {
        guess = extrapolate(prev, cur, (tau_new - cur.tau()) / dtau);
      }
    }
    guess.set_tau(tau_new);
    bool ok = false;
    try {
      PeriodicOrbit next = detail::solve_with_reference(model, tau_new, guess, cur, opts);
      if (acceptable(next, cur, policy)) {
        branch.points.push_back(std::move(next));
        ok = true;
      }
    } catch (const ConvergenceError& e) {
      branch.fold_suspect = branch.fold_suspect || e.fold_suspect();
    }
    if (ok) {
      h = std::min(h * 1.5, policy.max_step);
      continue;
    }
    ++branch.failures;
    h *= 0.5;
    if (h < policy.min_step) {
      branch.message = "step size fell below the minimum near tau = " + std::to_string(cur.tau()) +
                       (branch.fold_suspect ? " (possible fold)" : "");
      return;
    }
  }
  branch.message = "point budget exhausted";
}

}  // namespace

std::vector<HopfPoint> hopf_points(const Model& model, double tau_max, int n_cheb) {
  const auto prob = CharacteristicProblem::from_model(model);
  std::vector<HopfPoint> out;
  for (const auto& w : stability_windows(prob, tau_max, n_cheb)) {
    if (w.hopf_at_from && w.from < tau_max) out.push_back({w.from, w.hopf_omega});
  }
  return out;
}

Branch continue_branch(const Model& model, const PeriodicOrbit& start, double tau_target, const StepPolicy& policy,
                       const CollocationOptions& opts) {
  validate_policy(policy);
  if (!(tau_target > 0.0)) throw ArgumentError("target delay must be positive");
  Branch branch;
  branch.points.push_back(start.converged() ? start : solve_periodic(model, start.tau(), start, opts));
  extend(branch, model, tau_target, policy, opts);
  return branch;
}

Branch hopf_branch(const Model& model, const HopfPoint& hopf, double tau_target, const StepPolicy& policy,
                   const CollocationOptions& opts) {
  validate_policy(policy);
  if (!(tau_target > 0.0)) throw ArgumentError("target delay must be positive");
  const auto prob = CharacteristicProblem::from_model(model).with_tau(hopf.tau);
  const Eigen::VectorXcd v = critical_eigenvector(prob, hopf.omega);
  const double eps = default_hopf_amplitude(model);
  // For a unit v the seed has L² amplitude ε/√2.
  double amp = eps / std::numbers::sqrt2;
  const PeriodicOrbit seed = hopf_seed(model, hopf, v, eps, opts);

  Branch branch;
  try {
    branch.points.push_back(detail::solve_amplitude_with_reference(model, amp, seed, seed, opts));
  } catch (const ConvergenceError& e) {
    branch.fold_suspect = e.fold_suspect();
    branch.message = std::string("no cycle near the Hopf point: ") + e.what();
    return branch;
  }
  // Grow the amplitude with τ free until the cycle has moved off the Hopf delay.
  const double factor = 1.4;
  for (int k = 0; k < 200 && std::abs(branch.points.back().tau() - hopf.tau) < policy.initial_step; ++k) {
    const PeriodicOrbit& cur = branch.points.back();
    PeriodicOrbit guess = cur;
    if (branch.points.size() >= 2) guess = extrapolate(branch.points[branch.points.size() - 2], cur, factor);
    try {
      branch.points.push_back(detail::solve_amplitude_with_reference(model, amp * factor, guess, cur, opts));
      amp *= factor;
    } catch (const ConvergenceError& e) {
      branch.fold_suspect = e.fold_suspect();
      branch.message = std::string("amplitude continuation failed: ") + e.what();
      return branch;
    }
  }
  if (std::abs(branch.points.back().tau() - hopf.tau) < policy.initial_step) {
    branch.message = "cycle did not leave the Hopf delay";
    return branch;
  }
  extend(branch, model, tau_target, policy, opts);
  return branch;
}

}  // namespace roa
