#include "roa/attraction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "roa/errors.hpp"
#include "roa/parallel.hpp"

namespace roa {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Gaussian by Box–Muller on raw generator bits (portable across standard libraries).
double gaussian(std::mt19937_64& rng) {
  double u1 = unit_uniform(rng);
  while (u1 <= 0.0) u1 = unit_uniform(rng);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> random_unit(std::size_t m, std::mt19937_64& rng) {
  std::vector<double> v(m);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : v) {
      x = gaussian(rng);
      n2 += x * x;
    }
  } while (n2 < 1e-24);
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
  return v;
}

std::vector<double> scaled(const std::vector<double>& dir, double r) {
  std::vector<double> p(dir.size());
  for (std::size_t i = 0; i < dir.size(); ++i) p[i] = r * dir[i];
  return p;
}

struct RunRecord {
  Verdict verdict = Verdict::Undecided;
  std::optional<TraceMinimum> minimum;
};

RunRecord run_one(const Model& model, const FamilySpec& family, std::span<const double> p,
                  const SimulationSettings& sim, bool want_minimum) {
  const Segment phi = instantiate(family, p, model.tau);
  RunRecord rec;
  try {
    const Trajectory traj = simulate(model, phi, sim);
    if (traj.termination() == Termination::ConvergedAt) {
      rec.verdict = Verdict::Convergent;
      return rec;
    }
    const NormTrace trace = norm_trace(traj, sim.space);
    rec.verdict = classify_detailed(traj, sim.space, sim.delta_num, sim.trend_window, &trace, sim.min_trend_time).verdict;
    if (rec.verdict == Verdict::NonConvergent && want_minimum) {
      rec.minimum = refine_trace_minimum(traj, sim.space, trace);
    }
  } catch (const SolverError&) {
    rec.verdict = Verdict::Undecided;
  }
  return rec;
}

DirectionResult run_direction(const Model& model, const FamilySpec& family, const std::vector<double>& dir,
                              const ScanConfig& cfg) {
  DirectionResult dr;
  dr.direction = dir;
  auto eval = [&](double r) {
    const auto p = scaled(dir, r);
    const RunRecord rec = run_one(model, family, p, cfg.sim, cfg.compute_secondary);
    dr.samples.push_back({r, rec.verdict});
    if (rec.verdict == Verdict::Undecided) ++dr.undecided;
    if (rec.minimum && rec.minimum->value < dr.secondary) {
      dr.secondary = rec.minimum->value;
      dr.secondary_modulus = r;
      dr.secondary_time = rec.minimum->t;
    }
    return rec.verdict;
  };

  double lo = 0.0;
  double hi = kInf;
  const auto steps = static_cast<long>(std::floor(cfg.max_radius / cfg.radial_step + 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double r = cfg.radial_step * static_cast<double>(k);
    if (eval(r) == Verdict::NonConvergent) {
      hi = r;
      break;
    }
    lo = r;
  }
  if (std::isfinite(hi)) {
    while (hi - lo > cfg.radial_tol) {
      const double mid = 0.5 * (lo + hi);
      if (eval(mid) == Verdict::NonConvergent) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    dr.modulus = hi;
    dr.witness_norm = norm(cfg.sim.space, instantiate(family, scaled(dir, hi), model.tau));
  }
  return dr;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent: return "convergent";
    case Verdict::NonConvergent: return "nonconvergent";
    case Verdict::Undecided: return "undecided";
  }
  return "undecided";
}

void SimulationSettings::validate(std::size_t dim) const {
  space.validate(dim);
  if (!(delta_num > 0.0) || !std::isfinite(delta_num)) throw ArgumentError("delta_num must be positive");
  if (horizon < 0.0 || !std::isfinite(horizon)) throw ArgumentError("horizon must be positive");
  if (!(trend_window > 0.0)) throw ArgumentError("trend window must be positive");
  if (min_trend_time < 0.0) throw ArgumentError("min_trend_time must be non-negative");
  SolverOptions probe = solver;
  probe.stop_radius = 0.0;
  probe.validate();
}

Classification classify_detailed(const Trajectory& traj, const NormSpace& space, double delta_num,
                                 double trend_window, const NormTrace* trace, double min_trend_time) {
  Classification c;
  if (traj.termination() == Termination::ConvergedAt) {
    c.verdict = Verdict::Convergent;
    c.final_norm = norm(space, shift(segment_at(traj, traj.t_end()), traj.model().equilibrium_point()));
    c.reason = "entered the stop ball";
    return c;
  }
  NormTrace local;
  if (!trace) {
    local = norm_trace(traj, space);
    trace = &local;
  }
  c.final_norm = trace->value.back();
  if (traj.termination() == Termination::Blowup) {
    c.verdict = Verdict::NonConvergent;
    c.reason = "blowup";
    return c;
  }
  if (*std::min_element(trace->value.begin(), trace->value.end()) < delta_num) {
    c.verdict = Verdict::Convergent;
    c.reason = "norm trace fell below delta_num";
    return c;
  }
  const double t_end = traj.t_end();
  const double t0 = std::max(0.0, t_end - std::max(trend_window * traj.tau(), min_trend_time));
  const double mid = 0.5 * (t0 + t_end);
  double first = kInf;
  double second = kInf;
  for (std::size_t i = 0; i < trace->t.size(); ++i) {
    const double t = trace->t[i];
    if (t < t0) continue;
    double& slot = t < mid ? first : second;
    slot = std::min(slot, trace->value[i]);
  }
  if (second >= first || !std::isfinite(first)) {
    c.verdict = Verdict::NonConvergent;
    c.reason = "non-decreasing trailing trend";
  } else {
    c.verdict = Verdict::Undecided;
    c.reason = "decreasing trailing trend above delta_num";
  }
  return c;
}

Verdict classify(const Trajectory& traj, const NormSpace& space, double delta_num) {
  return classify_detailed(traj, space, delta_num).verdict;
}

Trajectory simulate(const Model& model, const Segment& deviation, const SimulationSettings& settings) {
  settings.validate(model.dim);
  auto xe = model.equilibrium_point();
  std::vector<double> neg(xe.size());
  for (std::size_t i = 0; i < xe.size(); ++i) neg[i] = -xe[i];
  SolverOptions opts = settings.solver;
  opts.stop_radius = settings.delta_num;
  const NormSpace space = settings.space;
  opts.stop_norm = [space](const Segment& s) { return norm(space, s); };
  return integrate(model, shift(deviation, neg), settings.horizon_for(model.tau), opts);
}

SecondaryBound secondary_bound(const std::vector<Trajectory>& trajectories, const NormSpace& space) {
  SecondaryBound best;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& traj = trajectories[i];
    const auto m = refine_trace_minimum(traj, space, norm_trace(traj, space));
    if (m.value < best.value) best = {m.value, i, m.t};
  }
  return best;
}

void ScanConfig::validate(std::size_t dim) const {
  sim.validate(dim);
  if (families.empty()) throw ArgumentError("scan needs at least one family");
  for (const auto& f : families) {
    f.validate();
    if (f.dim() != dim) throw ArgumentError("family '" + f.name + "' does not match the model dimension");
  }
  if (directions < 4) throw ArgumentError("at least 4 scan directions are required");
  if (!(radial_tol > 0.0) || !(radial_step > radial_tol)) {
    throw ArgumentError("radial step must exceed the radial tolerance, which must be positive");
  }
  if (!(max_radius > radial_step)) throw ArgumentError("max radius must exceed the radial step");
}

std::vector<std::vector<double>> scan_directions(std::size_t m, const ScanConfig& cfg, bool odd_symmetric) {
  const bool halve = odd_symmetric && cfg.use_symmetry;
  std::vector<std::vector<double>> dirs;
  if (!cfg.direction_list.empty() &&
      std::all_of(cfg.direction_list.begin(), cfg.direction_list.end(),
                  [m](const auto& d) { return d.size() == m; })) {
    for (auto d : cfg.direction_list) {
      double n2 = 0.0;
      for (double x : d) n2 += x * x;
      if (!(n2 > 0.0)) throw ArgumentError("scan direction must be nonzero");
      for (double& x : d) x /= std::sqrt(n2);
      dirs.push_back(std::move(d));
    }
    return dirs;
  }
  if (m == 1) {
    dirs.push_back({1.0});
    if (!halve) dirs.push_back({-1.0});
    return dirs;
  }
  const auto n = static_cast<std::size_t>(cfg.directions);
  if (m == 2) {
    const std::size_t count = halve ? (n + 1) / 2 : n;
    for (std::size_t k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      dirs.push_back({std::cos(a), std::sin(a)});
    }
    return dirs;
  }
  std::mt19937_64 rng(splitmix64(cfg.seed));
  for (std::size_t k = 0; k < n; ++k) dirs.push_back(random_unit(m, rng));
  return dirs;
}

ScanResult star_scan(const Model& model, const ScanConfig& cfg) {
  model.validate();
  cfg.validate(model.dim);

  struct Task {
    std::size_t family;
    std::size_t direction;
  };
  std::vector<std::vector<std::vector<double>>> dirs;
  std::vector<Task> tasks;
  for (std::size_t f = 0; f < cfg.families.size(); ++f) {
    dirs.push_back(scan_directions(cfg.families[f].param_dim(), cfg, model.odd_symmetric));
    for (std::size_t d = 0; d < dirs.back().size(); ++d) tasks.push_back({f, d});
  }
  std::vector<DirectionResult> out(tasks.size());
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t i) {
    const auto& t = tasks[i];
    out[i] = run_direction(model, cfg.families[t.family], dirs[t.family][t.direction], cfg);
  });

  ScanResult res;
  for (std::size_t f = 0; f < cfg.families.size(); ++f) {
    FamilyResult fr;
    fr.name = cfg.families[f].name;
    fr.spec = cfg.families[f];
    res.families.push_back(std::move(fr));
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& fr = res.families[tasks[i].family];
    auto& dr = out[i];
    fr.trajectories += dr.samples.size();
    fr.undecided += dr.undecided;
    if (dr.witness_norm < fr.primary) {
      fr.primary = dr.witness_norm;
      fr.primary_params = scaled(dr.direction, dr.modulus);
    }
    if (dr.secondary < fr.secondary) {
      fr.secondary = dr.secondary;
      fr.secondary_params = scaled(dr.direction, dr.secondary_modulus);
      fr.secondary_time = dr.secondary_time;
    }
    fr.directions.push_back(std::move(dr));
  }

  for (auto& fr : res.families) {
    if (!std::isfinite(fr.primary)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "no non-convergent initial function up to modulus %g", cfg.max_radius);
      fr.warnings.emplace_back(buf);
    }
    if (fr.undecided > 0) {
      fr.warnings.push_back(std::to_string(fr.undecided) + " undecided trajectories excluded from witnesses");
    }
    if (fr.primary < res.merged_primary) {
      res.merged_primary = fr.primary;
      res.primary_family = fr.name;
      res.primary_witness = instantiate(fr.spec, fr.primary_params, model.tau);
    }
    if (fr.secondary < res.merged_secondary) {
      res.merged_secondary = fr.secondary;
      res.secondary_family = fr.name;
    }
  }
  if (std::isfinite(res.merged_secondary)) {
    for (const auto& fr : res.families) {
      if (fr.name != res.secondary_family || fr.secondary != res.merged_secondary) continue;
      const Trajectory traj = simulate(model, instantiate(fr.spec, fr.secondary_params, model.tau), cfg.sim);
      res.secondary_witness = shift(segment_at(traj, std::min(fr.secondary_time, traj.t_end())),
                                    model.equilibrium_point());
      break;
    }
  }
  return res;
}

void BasinConfig::validate(std::size_t dim) const {
  sim.validate(dim);
  family.validate();
  if (family.dim() != dim) throw ArgumentError("basin family does not match the model dimension");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ArgumentError("basin radius must be positive");
  if (samples < 100) throw ArgumentError("basin stability needs at least 100 samples");
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
  if (n == 0) return {0.0, 1.0};
  const double z = 1.959964;
  const double nn = static_cast<double>(n);
  const double ph = static_cast<double>(k) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (ph + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::vector<double> sample_ball(std::size_t m, std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ed2701ULL)));
  auto v = random_unit(m, rng);
  const double r = std::pow(unit_uniform(rng), 1.0 / static_cast<double>(m));
  for (double& x : v) x *= r;
  return v;
}

BasinResult basin_stability(const Model& model, const BasinConfig& cfg) {
  model.validate();
  cfg.validate(model.dim);
  const std::size_t m = cfg.family.param_dim();
  std::vector<Verdict> verdicts(cfg.samples);
  parallel_for(cfg.samples, cfg.workers, [&](std::size_t i) {
    auto p = sample_ball(m, cfg.seed, i);
    for (double& x : p) x *= cfg.radius;
    verdicts[i] = run_one(model, cfg.family, p, cfg.sim, false).verdict;
  });
  BasinResult r;
  r.samples = cfg.samples;
  for (Verdict v : verdicts) {
    if (v == Verdict::Convergent) ++r.convergent;
    if (v == Verdict::NonConvergent) ++r.nonconvergent;
    if (v == Verdict::Undecided) ++r.undecided;
  }
  r.fraction = static_cast<double>(r.convergent) / static_cast<double>(r.samples);
  std::tie(r.lower, r.upper) = wilson_interval(r.convergent, r.samples);
  return r;
}

PixelMap pixel_map(const Model& model, const FamilySpec& family, const SimulationSettings& sim,
                   double p1_min, double p1_max, double p2_min, double p2_max, std::size_t resolution,
                   int workers) {
  model.validate();
  sim.validate(model.dim);
  if (family.param_dim() != 2) throw ArgumentError("pixel maps need a two-parameter family");
  if (resolution < 2) throw ArgumentError("pixel map resolution must be at least 2");
  PixelMap map;
  for (std::size_t k = 0; k < resolution; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(resolution - 1);
    map.p1.push_back(p1_min + s * (p1_max - p1_min));
    map.p2.push_back(p2_min + s * (p2_max - p2_min));
  }
  map.verdict.resize(resolution * resolution);
  parallel_for(map.verdict.size(), workers, [&](std::size_t i) {
    const double p[2] = {map.p1[i % resolution], map.p2[i / resolution]};
    map.verdict[i] = run_one(model, family, p, sim, false).verdict;
  });
  return map;
}

std::string pixel_map_csv(const PixelMap& map) {
  std::string out = "p1,p2,verdict\n";
  const std::size_t n = map.p1.size();
  char buf[96];
  for (std::size_t i = 0; i < map.verdict.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,", map.p1[i % n], map.p2[i / n]);
    out += buf;
    out += to_string(map.verdict[i]);
    out += '\n';
  }
  return out;
}

}  // namespace roa
