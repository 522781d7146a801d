#include "roa_cli/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "roa/errors.hpp"
#include "roa/parallel.hpp"
#include "roa/serialize.hpp"
#include "roa/spectral.hpp"

#ifndef ROA_VERSION
#define ROA_VERSION "0.0.0"
#endif

namespace roa::cli {
namespace {

using json = nlohmann::json;

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Failure inside a computation; maps to exit code 1.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a command needs, built before any computation so that bad
// inputs surface as configuration errors.
struct Prepared {
  Model model;
  SimulationSettings sim;
  std::vector<FamilySpec> families;
};

Prepared prepare(const RunConfig& cfg) {
  validate_config(cfg);
  try {
    Prepared p{build_model(cfg), {}, {}};
    p.model.validate();
    p.sim = build_settings(cfg, p.model);
    p.sim.validate(p.model.dim);
    for (const auto& f : cfg.families) {
      p.families.push_back(build_family(f, p.model));
      p.families.back().validate();
    }
    return p;
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  } catch (const UnsupportedFamilyError& e) {
    throw ConfigError(e.what());
  }
}

std::string tag_for_tau(double tau) {
  std::string s = format_number(tau);
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

Outputs scan_outputs(const RunConfig& cfg, const Prepared& p, const std::string& prefix) {
  ScanConfig sc = build_scan(cfg, p.model);
  try {
    sc.validate(p.model.dim);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
  Outputs out;
  const ScanResult r = star_scan(p.model, sc);
  out.files[prefix + "scan.json"] = to_json(r);
  if (cfg.scan.pixel_map.enabled) {
    const auto& pm = cfg.scan.pixel_map;
    const FamilySpec& fam = p.families.at(pm.family);
    if (fam.param_dim() != 2) throw ConfigError("scan.pixel_map needs a two-parameter family");
    const PixelMap map =
        pixel_map(p.model, fam, p.sim, pm.p1_min, pm.p1_max, pm.p2_min, pm.p2_max, pm.resolution, cfg.workers);
    out.files[prefix + "pixel_map.csv"] = pixel_map_csv(map);
  }
  out.summary = "merged bound " + format_number(r.merged_primary) + " (" + r.primary_family + "), secondary " +
                format_number(r.merged_secondary) + " (" + r.secondary_family + ")";
  return out;
}

// Cycle data at the target delay from every regain-of-stability branch.
struct OrbitRun {
  std::vector<HopfPoint> hopf;
  std::vector<Branch> branches;
  int selected = -1;
  double r_lc_q = kInf;
  double r_lc_c = kInf;
};

OrbitRun run_orbits(const RunConfig& cfg, const Model& model, double tau) {
  OrbitRun run;
  run.hopf = hopf_points(model, tau, cfg.spectrum.n_cheb);
  StepPolicy policy;
  policy.initial_step = cfg.orbit.initial_step;
  policy.min_step = cfg.orbit.min_step;
  policy.max_step = cfg.orbit.max_step;
  CollocationOptions opts;
  opts.intervals = cfg.orbit.intervals;
  opts.degree = cfg.orbit.degree;
  run.branches.resize(run.hopf.size());
  parallel_for(run.hopf.size(), cfg.workers,
               [&](std::size_t i) { run.branches[i] = hopf_branch(model, run.hopf[i], tau, policy, opts); });
  const NormSpace q = NormSpace::quotient_for(model, cfg.grid_density);
  const NormSpace c = NormSpace::uniform(cfg.grid_density);
  for (std::size_t i = 0; i < run.branches.size(); ++i) {
    const Branch& b = run.branches[i];
    if (!b.completed || b.points.back().min_deviation() < 1e-8) continue;
    const double v = min_norm_on_cycle(b.points.back(), q, cfg.orbit.phases).value;
    if (v < run.r_lc_q) {
      run.r_lc_q = v;
      run.selected = static_cast<int>(i);
      run.r_lc_c = min_norm_on_cycle(b.points.back(), c, cfg.orbit.phases).value;
    }
  }
  return run;
}

Outputs reproduce_scalar(const std::string& name, const RunConfig& base) {
  Outputs out;
  json summary = json::object();
  for (double tau : {1.0, 5.0}) {
    RunConfig cfg = base;
    cfg.model.tau = tau;
    const Prepared p = prepare(cfg);
    const std::string tag = "tau" + tag_for_tau(tau) + "_";
    ScanConfig sc = build_scan(cfg, p.model);
    const ScanResult r = star_scan(p.model, sc);
    out.files[tag + "scan.json"] = to_json(r);
    json fams = json::object();
    for (const auto& f : r.families) fams[f.name] = num(f.primary);
    summary["tau_" + tag_for_tau(tau)] = {{"merged_bound", num(r.merged_primary)},
                                          {"merged_bound_family", r.primary_family},
                                          {"family_bounds", fams}};
    if (name != "fig3") continue;
    // Solution bundles: every tested modulus along every direction.
    for (std::size_t fi = 0; fi < r.families.size(); ++fi) {
      const auto& fr = r.families[fi];
      std::string csv = "p,verdict,t,x\n";
      for (const auto& d : fr.directions) {
        for (const auto& s : d.samples) {
          std::vector<double> par(d.direction.size());
          for (std::size_t k = 0; k < par.size(); ++k) par[k] = d.direction[k] * s.modulus;
          const Trajectory traj = simulate(p.model, instantiate(p.families[fi], par, tau), p.sim);
          const double t_stop = std::min(traj.t_end(), 10.0 * tau);
          const std::string head = format_number(par[0]) + ',' + to_string(s.verdict) + ',';
          for (int k = 0; k <= 400; ++k) {
            const double t = -tau + (t_stop + tau) * k / 400.0;
            csv += head + format_number(t) + ',' + format_number(traj.at(t)[0]) + '\n';
          }
        }
      }
      out.files[tag + fr.name + "_bundle.csv"] = std::move(csv);
    }
  }
  out.files[name + ".json"] = dump(summary);
  out.summary = "tau=1: " + format_number(summary["tau_1"]["merged_bound"].get<double>()) +
                ", tau=5: " + format_number(summary["tau_5"]["merged_bound"].get<double>());
  return out;
}

}  // namespace

Outputs cmd_simulate(const RunConfig& cfg) {
  const Prepared p = prepare(cfg);
  const FamilySpec& fam = p.families.at(cfg.simulate.family);
  Segment phi = [&] {
    try {
      return instantiate(fam, cfg.simulate.params, p.model.tau);
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("simulate.params: ") + e.what());
    }
  }();
  const Trajectory traj = simulate(p.model, phi, p.sim);
  const NormTrace trace = norm_trace(traj, p.sim.space);
  const Classification c = classify_detailed(traj, p.sim.space, p.sim.delta_num, p.sim.trend_window, &trace,
                                             p.sim.min_trend_time);
  Outputs out;
  out.files["trajectory.csv"] = trajectory_csv(traj, cfg.simulate.csv_points);
  out.files["norm_trace.csv"] = norm_trace_csv(trace);
  const TraceMinimum tm = refine_trace_minimum(traj, p.sim.space, trace);
  json v{{"verdict", to_string(c.verdict)},
         {"reason", c.reason},
         {"final_norm", num(c.final_norm)},
         {"initial_norm", num(norm(p.sim.space, phi))},
         {"trace_minimum", num(tm.value)},
         {"trace_minimum_time", tm.t},
         {"termination", to_string(traj.termination())},
         {"t_end", traj.t_end()},
         {"family", fam.name},
         {"params", cfg.simulate.params},
         {"tau", p.model.tau}};
  out.files["verdict.json"] = dump(v);
  out.summary = "verdict " + to_string(c.verdict) + " (" + c.reason + ")";
  return out;
}

Outputs cmd_scan(const RunConfig& cfg) {
  const Prepared p = prepare(cfg);
  return scan_outputs(cfg, p, "");
}

Outputs cmd_spectrum(const RunConfig& cfg) {
  const Prepared p = prepare(cfg);
  const auto prob = CharacteristicProblem::from_model(p.model);
  std::vector<Crossing> cs;
  if (prob.h) cs = crossings(*prob.h, cfg.spectrum.branches);
  const auto windows = stability_windows(prob, cfg.spectrum.tau_max, cfg.spectrum.n_cheb);
  const auto roots = rightmost_roots(prob, cfg.spectrum.n_cheb, cfg.spectrum.roots);
  json j = json::parse(spectrum_json(cs, windows, roots));
  j["tau"] = p.model.tau;
  j["spectral_abscissa"] = roots.empty() ? json(nullptr) : json(roots.front().lambda.real());
  json inside = nullptr;
  for (const auto& w : windows) {
    if (p.model.tau > w.from && p.model.tau <= w.to) {
      inside = {{"from", w.from}, {"to", num(w.to)}, {"stable", w.stable()}, {"hopf_at_from", w.hopf_at_from}};
    }
  }
  j["window_of_tau"] = inside;
  Outputs out;
  out.files["spectrum.json"] = dump(j);
  const bool stable = !inside.is_null() && inside["stable"].get<bool>();
  out.summary = "tau " + format_number(p.model.tau) + (stable ? " lies in a stable window" : " is not in a stable window");
  return out;
}

Outputs cmd_orbit(const RunConfig& cfg) {
  const Prepared p = prepare(cfg);
  const double tau = cfg.orbit.tau > 0.0 ? cfg.orbit.tau : p.model.tau;
  const OrbitRun run = run_orbits(cfg, p.model, tau);
  Outputs out;
  const NormSpace q = NormSpace::quotient_for(p.model, cfg.grid_density);
  const NormSpace c = NormSpace::uniform(cfg.grid_density);
  json branches = json::array();
  for (std::size_t i = 0; i < run.branches.size(); ++i) {
    const Branch& b = run.branches[i];
    const auto rows = branch_rows(b, q, c);
    out.files["branch_" + std::to_string(i) + ".csv"] = branch_csv(rows);
    branches.push_back({{"hopf_tau", run.hopf[i].tau},
                        {"hopf_omega", run.hopf[i].omega},
                        {"completed", b.completed},
                        {"fold_suspect", b.fold_suspect},
                        {"message", b.message},
                        {"points", b.points.size()},
                        {"failures", b.failures},
                        {"R_LC_Q", rows.empty() || !b.completed ? json(nullptr) : num(rows.back().r_lc_q)}});
  }
  json j{{"tau", tau}, {"branches", branches}, {"selected_branch", run.selected}};
  if (run.selected < 0) {
    throw ComputeError("no periodic orbit branch reached tau = " + format_number(tau));
  }
  const PeriodicOrbit& orbit = run.branches[static_cast<std::size_t>(run.selected)].points.back();
  j["T"] = orbit.period();
  j["R_LC_Q"] = run.r_lc_q;
  j["R_LC_PC"] = run.r_lc_c;
  j["residual"] = orbit.residual();
  j["hopf_tau"] = run.hopf[static_cast<std::size_t>(run.selected)].tau;
  j["orbit"] = json::parse(to_json(orbit));
  out.files["orbit.json"] = dump(j);
  out.files["orbit.csv"] = orbit.csv();
  out.summary = "T = " + format_number(orbit.period()) + ", R_LC_Q = " + format_number(run.r_lc_q) +
                ", R_LC_PC = " + format_number(run.r_lc_c);
  return out;
}

Outputs cmd_basin(const RunConfig& cfg) {
  const Prepared p = prepare(cfg);
  BasinConfig bc;
  bc.family = p.families.at(cfg.basin.family);
  bc.sim = p.sim;
  bc.radius = cfg.basin.radius;
  bc.samples = cfg.basin.samples;
  bc.seed = cfg.seed;
  bc.workers = cfg.workers;
  const BasinResult r = basin_stability(p.model, bc);
  Outputs out;
  json j = json::parse(to_json(r));
  j["radius"] = bc.radius;
  j["family"] = bc.family.name;
  j["seed"] = bc.seed;
  out.files["basin.json"] = dump(j);
  out.summary = "convergent fraction " + format_number(r.fraction);
  return out;
}

Outputs cmd_reproduce(const std::string& name, const RunConfig& cfg) {
  if (name == "example1" || name == "fig3") return reproduce_scalar(name, cfg);
  if (name == "fig4") {
    const Prepared p = prepare(cfg);
    RunConfig no_map = cfg;
    no_map.scan.pixel_map.enabled = false;
    Outputs out = scan_outputs(no_map, p, "");
    const auto& pm = cfg.scan.pixel_map;
    for (std::size_t i = 0; i < p.families.size(); ++i) {
      if (p.families[i].param_dim() != 2) continue;
      const PixelMap map = pixel_map(p.model, p.families[i], p.sim, pm.p1_min, pm.p1_max, pm.p2_min, pm.p2_max,
                                     pm.resolution, cfg.workers);
      out.files[p.families[i].name + "_pixel_map.csv"] = pixel_map_csv(map);
    }
    return out;
  }
  if (name == "fig5") {
    const Prepared p = prepare(cfg);
    Outputs out;
    const ScanResult r = star_scan(p.model, build_scan(cfg, p.model));
    out.files["scan.json"] = to_json(r);
    std::size_t best = r.families.size();
    for (std::size_t i = 0; i < r.families.size(); ++i) {
      if (r.families[i].name == r.secondary_family) best = i;
    }
    if (best == r.families.size() || !std::isfinite(r.merged_secondary)) {
      throw ComputeError("no non-convergent trajectory found for the secondary bound");
    }
    const auto& fr = r.families[best];
    const Trajectory traj = simulate(p.model, instantiate(p.families[best], fr.secondary_params, p.model.tau), p.sim);
    const NormTrace trace = norm_trace(traj, p.sim.space);
    const TraceMinimum tm = refine_trace_minimum(traj, p.sim.space, trace);
    out.files["fig5_trajectory.csv"] = trajectory_csv(traj);
    out.files["fig5_norm_trace.csv"] = norm_trace_csv(trace);
    json w{{"family", fr.name},
           {"params", fr.secondary_params},
           {"minimum", tm.value},
           {"time", tm.t},
           {"verdict", to_string(classify_detailed(traj, p.sim.space, p.sim.delta_num, p.sim.trend_window, &trace,
                                                   p.sim.min_trend_time)
                                     .verdict)},
           {"segment", json::parse(segment_table_json(shift(segment_at(traj, tm.t), p.model.equilibrium_point())))}};
    out.files["fig5_witness.json"] = dump(w);
    out.summary = "secondary minimum " + format_number(tm.value) + " at t = " + format_number(tm.t);
    return out;
  }
  if (name == "fig7") {
    const Prepared p = prepare(cfg);
    SweepConfig sw;
    sw.tau_max = cfg.sweep.tau_max;
    sw.tau_step = cfg.sweep.tau_step;
    sw.n_cheb = cfg.spectrum.n_cheb;
    sw.scan = build_scan(cfg, p.model);
    sw.scan.families.clear();
    sw.scan.direction_list.clear();
    sw.policy.initial_step = cfg.orbit.initial_step;
    sw.policy.min_step = cfg.orbit.min_step;
    sw.policy.max_step = cfg.orbit.max_step;
    sw.collocation.intervals = cfg.orbit.intervals;
    sw.collocation.degree = cfg.orbit.degree;
    sw.workers = cfg.workers;
    const SweepResult r = tau_sweep(p.model, sw);
    Outputs out;
    out.files["fig7.csv"] = sweep_csv(r);
    json hopf = json::array();
    for (const auto& h : r.hopf) hopf.push_back({{"tau", h.tau}, {"omega", h.omega}});
    out.files["fig7.json"] = dump(json{{"hopf_points", hopf}, {"warnings", r.warnings}, {"rows", r.rows.size()}});
    out.summary = std::to_string(r.rows.size()) + " sweep rows";
    return out;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radius-of-attraction estimates for delay differential equations", "roa"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, model, norm, out_dir, reproduce;
  double tau = 0.0, delta_num = 0.0, horizon = -1.0;
  std::uint64_t seed = 0;
  int workers = -1;
  std::vector<double> params;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--model", model, "Model")->check(CLI::IsMember({"swing", "scalar-cubic", "linear", "file"}));
  app.add_option("--tau", tau, "Delay")->check(CLI::PositiveNumber);
  app.add_option("--norm", norm, "State-space norm")->check(CLI::IsMember({"c", "pc", "m2", "q"}));
  app.add_option("--delta-num", delta_num, "Convergence threshold")->check(CLI::PositiveNumber);
  app.add_option("--horizon", horizon, "Simulation horizon (0 selects the default)")->check(CLI::NonNegativeNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--workers", workers, "Worker threads (0 = logical cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--reproduce", reproduce, "Preset")->check(CLI::IsMember(preset_names()));
  app.add_option("--params", params, "Family parameters for simulate")->delimiter(',');

  const char* names[] = {"simulate", "scan", "spectrum", "orbit", "basin", "reproduce"};
  const char* help[] = {"Integrate one initial function", "Star scan over primary families",
                        "Crossings and stability windows", "Periodic orbits from Hopf points",
                        "Basin-stability sampling", "Run a figure or example preset"};
  for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], help[i]);
  std::string positional_preset;
  app.get_subcommand("reproduce")
      ->add_option("preset", positional_preset, "Preset name")
      ->check(CLI::IsMember(preset_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (command == "reproduce" && reproduce.empty()) reproduce = positional_preset;
  if (command == "reproduce" && reproduce.empty()) {
    err << "error: reproduce needs a preset (" << "example1, fig3, fig4, fig5, fig7)\n";
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!reproduce.empty()) cfg = preset(reproduce);
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!model.empty()) cfg.model.name = model;
    if (tau > 0.0) cfg.model.tau = tau;
    if (!norm.empty()) cfg.norm = norm;
    if (delta_num > 0.0) cfg.delta_num = delta_num;
    if (horizon >= 0.0) cfg.horizon = horizon;
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (workers >= 0) cfg.workers = workers;
    if (!params.empty()) cfg.simulate.params = params;
    validate_config(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  const auto start = std::chrono::steady_clock::now();
  Outputs result;
  try {
    if (command == "simulate") result = cmd_simulate(cfg);
    else if (command == "scan") result = cmd_scan(cfg);
    else if (command == "spectrum") result = cmd_spectrum(cfg);
    else if (command == "orbit") result = cmd_orbit(cfg);
    else if (command == "basin") result = cmd_basin(cfg);
    else result = cmd_reproduce(reproduce, cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver failure at t = " << e.time() << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json outputs = json::array();
  for (const auto& [name, _] : result.files) outputs.push_back(name);
  outputs.push_back("config.json");
  json manifest{{"command", command},
                {"preset", reproduce.empty() ? json(nullptr) : json(reproduce)},
                {"config_hash", config_hash(cfg)},
                {"version", ROA_VERSION},
                {"libraries",
                 {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                  {"cli11", CLI11_VERSION}}},
                {"timings", {{"compute_seconds", seconds}}},
                {"workers", resolve_workers(cfg.workers)},
                {"outputs", outputs}};
  result.files["config.json"] = dump_config(cfg);
  result.files["manifest.json"] = dump(manifest);

  try {
    const std::filesystem::path dir(cfg.out);
    std::filesystem::create_directories(dir);
    for (const auto& [name, text] : result.files) {
      std::ofstream f(dir / name, std::ios::binary);
      f << text;
      if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  out << command << ": " << result.summary << "\n" << "outputs written to " << cfg.out << "\n";
  return kExitOk;
}

}  // namespace roa::cli
