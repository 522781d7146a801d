#include "roa/sweep.hpp"

#include <cmath>

#include "roa/errors.hpp"
#include "roa/parallel.hpp"
#include "roa/serialize.hpp"
#include "roa/spectral.hpp"

namespace roa {
namespace {

struct WindowPlan {
  int branch = -1;
  HopfPoint hopf;
  std::vector<std::size_t> rows;  // indices into the result rows, ascending τ
};

}  // namespace

SweepResult tau_sweep(const Model& model, const SweepConfig& cfg) {
  if (!(cfg.tau_max > 0.0) || !(cfg.tau_step > 0.0)) throw ArgumentError("sweep needs tau_max > 0 and tau_step > 0");
  model.validate();
  SweepResult out;
  const auto windows = stability_windows(CharacteristicProblem::from_model(model), cfg.tau_max, cfg.n_cheb);

  std::vector<WindowPlan> plans;
  for (const auto& w : windows) {
    if (!w.stable()) continue;
    WindowPlan plan;
    if (w.hopf_at_from) {
      plan.branch = static_cast<int>(out.hopf.size());
      plan.hopf = {w.from, w.hopf_omega};
      out.hopf.push_back(plan.hopf);
    }
    const double hi = std::min(w.to, cfg.tau_max);
    std::vector<double> taus;
    for (long k = static_cast<long>(std::floor(w.from / cfg.tau_step)) + 1;; ++k) {
      const double t = static_cast<double>(k) * cfg.tau_step;
      if (t >= hi - 1e-9) break;
      if (t > w.from + 1e-9) taus.push_back(t);
    }
    if (cfg.tau_max <= w.to && cfg.tau_max > w.from) taus.push_back(cfg.tau_max);
    for (double t : taus) {
      plan.rows.push_back(out.rows.size());
      out.rows.push_back({t, plan.branch});
    }
    plans.push_back(std::move(plan));
  }

  const NormSpace q = NormSpace::quotient_for(model);
  const NormSpace c = NormSpace::uniform();
  std::vector<std::string> branch_notes(plans.size());
  parallel_for(plans.size(), cfg.workers, [&](std::size_t i) {
    const WindowPlan& plan = plans[i];
    if (plan.branch < 0 || plan.rows.empty()) return;
    Branch branch = hopf_branch(model, plan.hopf, out.rows[plan.rows.front()].tau, cfg.policy, cfg.collocation);
    for (std::size_t r = 0;; ++r) {
      if (!branch.completed) {
        branch_notes[i] = "branch from tau = " + format_number(plan.hopf.tau) + " stopped: " + branch.message;
        return;
      }
      SweepRow& row = out.rows[plan.rows[r]];
      const PeriodicOrbit& orbit = branch.points.back();
      row.period = orbit.period();
      if (orbit.min_deviation() >= 1e-8) {
        row.r_lc_q = min_norm_on_cycle(orbit, q).value;
        row.r_lc_c = min_norm_on_cycle(orbit, c).value;
      }
      if (r + 1 == plan.rows.size()) return;
      branch = continue_branch(model, orbit, out.rows[plan.rows[r + 1]].tau, cfg.policy, cfg.collocation);
    }
  });
  for (auto& note : branch_notes) {
    if (!note.empty()) out.warnings.push_back(std::move(note));
  }

  if (cfg.simulate) {
    ScanConfig scan = cfg.scan;
    if (scan.families.empty()) {
      scan.families.push_back(FamilySpec::for_model(model, Shape::Constant));
      std::vector<double> dir(scan.families.front().param_dim(), 0.0);
      dir.back() = -1.0;
      scan.direction_list = {dir};
    }
    scan.workers = 1;
    parallel_for(out.rows.size(), cfg.workers, [&](std::size_t i) {
      const ScanResult r = star_scan(model.with_tau(out.rows[i].tau), scan);
      out.rows[i].r_primary = r.merged_primary;
      out.rows[i].r_secondary = r.merged_secondary;
    });
  }
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::string s = "tau,branch,T,R_LC_Q,R_LC_PC,R_primary,R_secondary\n";
  for (const auto& r : result.rows) {
    s += format_number(r.tau) + ',' + std::to_string(r.branch) + ',' + format_number(r.period) + ',' +
         format_number(r.r_lc_q) + ',' + format_number(r.r_lc_c) + ',' + format_number(r.r_primary) + ',' +
         format_number(r.r_secondary) + '\n';
  }
  return s;
}

}  // namespace roa
