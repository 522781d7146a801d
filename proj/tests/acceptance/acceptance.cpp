// Acceptance checks; prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "roa/attraction.hpp"
#include "roa/dde_solver.hpp"
#include "roa/models.hpp"
#include "roa/norms.hpp"
#include "roa/orbit.hpp"
#include "roa/parallel.hpp"
#include "roa/serialize.hpp"
#include "roa/spectral.hpp"
#include "roa/sweep.hpp"
#include "roa_cli/commands.hpp"
#include "roa_cli/config.hpp"

using namespace roa;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %d %s:%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.str().c_str(), sec);
  std::fflush(stdout);
}

bool near(double v, double target, double tol) { return std::abs(v - target) <= tol; }

Segment polynomial_history(double tau, const std::vector<double>& c) {
  std::vector<double> shifted(c.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      shifted[j] += c[k] * binom * std::pow(-tau, static_cast<double>(k - j));
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
  }
  return make_piecewise_polynomial(tau, 1, {{-tau, 0.0, {shifted}}});
}

const Model kSwing = make_swing(0.05, 0.125, 0.5, 20.0);

ScanConfig swing_scan(int workers) {
  ScanConfig cfg;
  for (Shape s : {Shape::Constant, Shape::Jump, Shape::Cosine, Shape::Sine}) {
    cfg.families.push_back(FamilySpec::for_model(kSwing, s));
  }
  cfg.sim.space = NormSpace::quotient_for(kSwing);
  cfg.workers = workers;
  return cfg;
}

}  // namespace

int main() {
  report(1, "scalar example bounds at tau = 1 and 5", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const double expected[] = {1.1, 0.4};
    int i = 0;
    for (double tau : {1.0, 5.0}) {
      ScanConfig cfg;
      for (Shape s : {Shape::Constant, Shape::LinearIncreasing, Shape::Jump, Shape::LinearDecreasing}) {
        cfg.families.push_back(FamilySpec::scalar(s));
      }
      cfg.sim.space = NormSpace::uniform();
      cfg.radial_step = 0.1;
      cfg.workers = 1;
      const ScanResult r = star_scan(make_scalar_cubic(tau), cfg);
      o.detail << " tau=" << tau << ": R=" << r.merged_primary << " (" << r.primary_family << ")";
      o.require(near(r.merged_primary, expected[i++], 0.1), "bound within one grid step");
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(sec < 120.0, "runtime under two minutes on one worker");
  });

  ScanResult swing;
  report(2, "swing primary bound", [&](Outcome& o) {
    swing = star_scan(kSwing, swing_scan(0));
    o.detail << " R3_Q=" << swing.merged_primary << " (" << swing.primary_family << ")";
    for (const auto& f : swing.families) o.detail << " " << f.name << "=" << f.primary;
    o.require(swing.primary_family.find("cosine") != std::string::npos, "minimum attained by the cosine family");
    o.require(near(swing.merged_primary, 0.65, 0.05), "0.65 +/- 0.05");
  });

  report(3, "swing secondary bound", [&](Outcome& o) {
    o.detail << " R_T=" << swing.merged_secondary << " (" << swing.secondary_family << ")";
    o.require(near(swing.merged_secondary, 0.503, 0.01), "0.503 +/- 0.01");
    o.require(swing.secondary_family.find("constant") != std::string::npos, "constant-family trajectory");
    o.require(swing.merged_secondary < swing.merged_primary, "strictly below the primary bound");
  });

  double r_lc_q = kInf;
  report(4, "periodic orbit at tau = 20", [&](Outcome& o) {
    const auto hopf = hopf_points(kSwing, 20.0);
    o.require(!hopf.empty(), "regain-of-stability points below 20");
    std::vector<Branch> branches(hopf.size());
    parallel_for(hopf.size(), 0, [&](std::size_t i) { branches[i] = hopf_branch(kSwing, hopf[i], 20.0); });
    const NormSpace q = NormSpace::quotient_for(kSwing);
    const PeriodicOrbit* best = nullptr;
    for (std::size_t i = 0; i < hopf.size(); ++i) {
      if (!branches[i].completed) continue;
      const PeriodicOrbit& end = branches[i].points.back();
      const double v = min_norm_on_cycle(end, q).value;
      o.detail << " branch(tau_H=" << hopf[i].tau << ")=" << v;
      if (v < r_lc_q) {
        r_lc_q = v;
        best = &end;
      }
    }
    o.require(best != nullptr, "a branch reaches tau = 20");
    if (best == nullptr) return;
    const PeriodicOrbit direct = solve_periodic(kSwing, 20.0, *best);
    const double r_pc = min_norm_on_cycle(direct, NormSpace::uniform()).value;
    r_lc_q = min_norm_on_cycle(direct, q).value;
    o.detail << " T=" << direct.period() << " residual=" << direct.residual() << " R_LC_Q=" << r_lc_q
             << " R_LC_PC=" << r_pc;
    o.require(direct.converged() && direct.residual() < 1e-9, "residual < 1e-9");
    o.require(near(direct.period(), 7.4, 0.1), "T = 7.4 +/- 0.1");
    o.require(near(r_lc_q, 0.507, 0.01), "R_LC_Q = 0.507 +/- 0.01");
    o.require(r_pc > r_lc_q, "R_LC_PC > R_LC_Q");
  });

  report(5, "cycle and trajectory bounds agree", [&](Outcome& o) {
    const double gap = std::abs(r_lc_q - swing.merged_secondary);
    o.detail << " |R_LC_Q - R_T|=" << gap;
    o.require(gap < 0.02, "gap < 0.02");
  });

  report(6, "delay sweep shape", [](Outcome& o) {
    const SweepResult s = tau_sweep(kSwing, SweepConfig{});
    std::size_t pairs = 0, increasing = 0;
    int first_branch = 1 << 30;
    for (const auto& r : s.rows) {
      if (r.branch >= 0) first_branch = std::min(first_branch, r.branch);
    }
    bool small_tau_win = false;
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      const SweepRow& r = s.rows[i];
      if (i > 0 && s.rows[i - 1].branch == r.branch && r.branch >= 0 && std::isfinite(r.r_lc_q) &&
          std::isfinite(s.rows[i - 1].r_lc_q)) {
        ++pairs;
        if (r.r_lc_q > s.rows[i - 1].r_lc_q) ++increasing;
      }
      if (r.branch == first_branch && r.r_primary < r.r_lc_q) small_tau_win = true;
    }
    const double frac = pairs ? static_cast<double>(increasing) / static_cast<double>(pairs) : 0.0;
    o.detail << " rows=" << s.rows.size() << " monotone=" << increasing << "/" << pairs;
    o.require(pairs > 0 && frac >= 0.8, "R_LC_Q increases on >= 80% of consecutive samples");
    o.require(small_tau_win, "primary bound below R_LC_Q on the first branch");
  });

  report(7, "solver against the method of steps", [](Outcome& o) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(-2.0, 0.5), ub(-2.0, 2.0), ut(0.5, 2.0), uc(-1.0, 1.0);
    const SolverOptions opts;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const double a = trial % 5 == 0 ? 0.0 : ua(rng);
      const double b = ub(rng), tau = ut(rng);
      const std::vector<double> h{uc(rng), uc(rng), uc(rng), uc(rng)};
      const testing::MethodOfSteps ex(a, b, tau, h, 5);
      const Trajectory tr = integrate(make_linear_scalar(a, b, tau), polynomial_history(tau, h), 5.0 * tau, opts);
      double err = 0.0, xmax = 0.0;
      for (int k = 0; k <= 2000; ++k) {
        const double t = 5.0 * tau * k / 2000.0;
        err = std::max(err, std::abs(tr.at(t)[0] - ex(t)));
        xmax = std::max(xmax, std::abs(ex(t)));
      }
      worst = std::max(worst, err / (opts.atol + opts.rtol * xmax));
    }
    o.detail << " worst error / (atol + rtol max|x|) = " << worst;
    o.require(worst <= 100.0, "error within 100 x tolerance");

    const testing::MethodOfSteps ex(-1.0, -1.0, 1.0, {1.0}, 3);
    std::vector<double> lh, le;
    for (int k = 2; k <= 7; ++k) {
      SolverOptions f;
      f.rtol = f.atol = 1.0;
      f.max_step = f.initial_step = std::ldexp(1.0, -k);
      const Trajectory tr = integrate(make_linear_scalar(-1.0, -1.0, 1.0), Segment::constant(1.0, {1.0}), 3.0, f);
      lh.push_back(std::log(f.max_step));
      le.push_back(std::log(std::abs(tr.at(3.0)[0] - ex(3.0))));
    }
    const double n = static_cast<double>(lh.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lh.size(); ++i) {
      sx += lh[i];
      sy += le[i];
      sxx += lh[i] * lh[i];
      sxy += lh[i] * le[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    o.detail << " order=" << slope;
    o.require(near(slope, 3.0, 0.4), "order within 0.4 of 3");
  });

  report(8, "spectral analysis", [](Outcome& o) {
    const auto set = crossings(QuasiPolynomial{{0.0, 1.0}, {1.0}}, 1);
    o.require(!set.empty(), "crossing found");
    if (!set.empty()) {
      o.detail << " omega=" << set[0].omega << " tau=" << set[0].taus[0];
      o.require(std::abs(set[0].omega - 1.0) < 1e-8 && std::abs(set[0].taus[0] - std::numbers::pi / 2.0) < 1e-8,
                "crossing at (1, pi/2)");
    }
    const auto windows = stability_windows(CharacteristicProblem::from_model(kSwing), 25.0);
    bool inside = false;
    for (const auto& w : windows) {
      if (w.from < 20.0 && 20.0 <= w.to) {
        inside = w.stable() && w.consistent && w.hopf_at_from;
        o.detail << " window=[" << w.from << ", " << w.to << "]";
      }
    }
    o.require(inside, "tau = 20 in a stable window opened by a regain of stability");

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.5, 1.5), ut(0.2, 5.0);
    std::uniform_int_distribution<int> un(1, 3);
    std::size_t bad = 0, roots_checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
      CharacteristicProblem p;
      const int dim = un(rng);
      p.a0 = Eigen::MatrixXd(dim, dim);
      p.a1 = Eigen::MatrixXd(dim, dim);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          p.a0(i, j) = u(rng) - (i == j ? 1.0 : 0.0);
          p.a1(i, j) = u(rng);
        }
      }
      p.tau = ut(rng);
      const auto roots = rightmost_roots(p, 32, 6);
      for (const auto& r : roots) {
        ++roots_checked;
        bool ok = r.refined && p.scaled_residual(r.lambda) < 1e-8;
        if (std::abs(r.lambda.imag()) > 1e-8) {
          ok = ok && std::any_of(roots.begin(), roots.end(), [&](const auto& s) {
                 return std::abs(s.lambda - std::conj(r.lambda)) < 1e-6 * (1.0 + std::abs(r.lambda));
               });
        }
        if (!ok) ++bad;
      }
    }
    o.detail << " random roots=" << roots_checked << " violations=" << bad;
    o.require(bad == 0, "conjugate and residual invariants");
  });

  report(9, "norm layer properties", [](Outcome& o) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ua(-5.0, 5.0), ut(0.2, 20.0);
    const std::vector<NormSpace> spaces{NormSpace::uniform(), NormSpace::m2(), NormSpace::quotient(Partition{{1}, {0}})};
    std::size_t bad = 0;
    for (const auto& space : spaces) {
      for (int k = 0; k < 1000; ++k) {
        const double tau = ut(rng);
        const Segment a = testing::random_segment(rng, tau, 2), b = testing::random_segment(rng, tau, 2);
        const double alpha = ua(rng);
        const double na = norm(space, a), nb = norm(space, b);
        if (std::abs(norm(space, scale(a, alpha)) - std::abs(alpha) * na) > 1e-12 * (1.0 + std::abs(alpha) * na)) ++bad;
        if (norm(space, linear_combination(1.0, a, 1.0, b)) > na + nb + 1e-9 * (1.0 + na + nb)) ++bad;
      }
    }
    o.detail << " violations=" << bad;
    o.require(bad == 0, "homogeneity and triangle inequality");

    const double tau = 6.0, p = 0.8;
    const Segment c = Segment::constant(tau, {p});
    const double par[] = {p};
    const Segment l = instantiate(FamilySpec::scalar(Shape::LinearDecreasing), par, tau);
    const double tol = 1e-9;
    bool ok = true;
    for (const Segment* s : {&c, &l}) {
      const Segment r = rescale_delay(*s, 1.0);
      ok = ok && std::abs(norm(NormSpace::uniform(), r) - norm(NormSpace::uniform(), *s)) < tol;
      ok = ok && std::abs(l2_norm(r, 128) - l2_norm(*s, 128) * std::sqrt(1.0 / tau)) < tol;
    }
    ok = ok && std::abs(norm(NormSpace::m2(), rescale_delay(c, 1.0)) - 2.0 * p) < tol;
    ok = ok && std::abs(l2_norm(l, 128) - p * std::sqrt(tau / 3.0)) < tol;
    o.require(ok, "rescaling closed forms");
  });

  report(10, "determinism across runs and worker counts", [&](Outcome& o) {
    const std::string a = to_json(star_scan(kSwing, swing_scan(1)));
    o.require(a == to_json(swing), "swing scan JSON identical for 1 and N workers");
    for (const std::string name : {"example1", "fig5"}) {
      cli::RunConfig cfg = cli::preset(name);
      cfg.workers = 1;
      const auto one = cli::cmd_reproduce(name, cfg);
      const auto again = cli::cmd_reproduce(name, cfg);
      cfg.workers = 0;
      const auto many = cli::cmd_reproduce(name, cfg);
      o.require(one.files == again.files, name + " outputs identical on rerun");
      o.require(one.files == many.files, name + " outputs identical across worker counts");
      o.detail << " " << name << ":" << one.files.size() << " files";
    }
    cli::RunConfig basin;
    basin.basin.samples = 100;
    basin.basin.radius = 2.0;
    basin.workers = 1;
    const auto b1 = cli::cmd_basin(basin);
    basin.workers = 0;
    o.require(b1.files == cli::cmd_basin(basin).files, "basin outputs identical across worker counts");
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
