#include "roa/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "json.hpp"

namespace roa {
namespace {

using json = nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

json segment_table(const Segment& seg, std::size_t points) {
  points = std::max<std::size_t>(points, 2);
  const double tau = seg.tau();
  std::vector<std::pair<double, Side>> rows;
  for (std::size_t k = 0; k < points; ++k) {
    rows.emplace_back(-tau + tau * static_cast<double>(k) / static_cast<double>(points - 1), Side::Right);
  }
  for (double b : seg.breakpoints()) {
    rows.emplace_back(b, Side::Left);
    rows.emplace_back(b, Side::Right);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second == Side::Left && b.second == Side::Right;
  });
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  json theta = json::array();
  json values = json::array();
  std::vector<double> v(seg.dim());
  for (const auto& [t, side] : rows) {
    seg.evaluate(t, v, side);
    theta.push_back(t);
    values.push_back(numbers(v));
  }
  return json{{"tau", tau}, {"theta", theta}, {"values", values}, {"breakpoints", numbers(seg.breakpoints())}};
}

json direction_json(const DirectionResult& d) {
  json samples = json::array();
  for (const auto& s : d.samples) samples.push_back(json{{"modulus", s.modulus}, {"verdict", to_string(s.verdict)}});
  return json{{"direction", numbers(d.direction)},
              {"modulus", number(d.modulus)},
              {"witness_norm", number(d.witness_norm)},
              {"undecided", d.undecided},
              {"secondary", number(d.secondary)},
              {"secondary_modulus", number(d.secondary_modulus)},
              {"secondary_time", number(d.secondary_time)},
              {"samples", samples}};
}

json family_json(const FamilyResult& f) {
  json comps = json::array();
  for (const auto& c : f.spec.components) comps.push_back(json{{"shape", to_string(c.shape)}, {"offset", c.offset}});
  json dirs = json::array();
  for (const auto& d : f.directions) dirs.push_back(direction_json(d));
  return json{{"name", f.name},
              {"components", comps},
              {"omega", f.spec.omega},
              {"degree", f.spec.degree},
              {"primary_bound", number(f.primary)},
              {"primary_params", numbers(f.primary_params)},
              {"secondary_bound", number(f.secondary)},
              {"secondary_params", numbers(f.secondary_params)},
              {"secondary_time", number(f.secondary_time)},
              {"trajectories", f.trajectories},
              {"undecided", f.undecided},
              {"warnings", f.warnings},
              {"directions", dirs}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string segment_table_json(const Segment& seg, std::size_t points) { return dump(segment_table(seg, points)); }

std::string to_json(const ScanResult& result, std::size_t table_points) {
  json fams = json::array();
  for (const auto& f : result.families) fams.push_back(family_json(f));
  json j{{"families", fams},
         {"merged_bound", number(result.merged_primary)},
         {"merged_bound_family", result.primary_family},
         {"secondary_bound", number(result.merged_secondary)},
         {"secondary_bound_family", result.secondary_family}};
  j["primary_witness"] = result.primary_witness ? segment_table(*result.primary_witness, table_points) : json(nullptr);
  j["secondary_witness"] =
      result.secondary_witness ? segment_table(*result.secondary_witness, table_points) : json(nullptr);
  return dump(j);
}

std::string to_json(const BasinResult& r) {
  return dump(json{{"samples", r.samples},
                   {"convergent", r.convergent},
                   {"nonconvergent", r.nonconvergent},
                   {"undecided", r.undecided},
                   {"fraction", r.fraction},
                   {"wilson_lower", r.lower},
                   {"wilson_upper", r.upper}});
}

std::string to_json(const Classification& c) {
  return dump(json{{"verdict", to_string(c.verdict)}, {"final_norm", number(c.final_norm)}, {"reason", c.reason}});
}

std::string spectrum_json(const std::vector<Crossing>& crossings, const std::vector<StabilityWindow>& windows,
                          const std::vector<CharacteristicRoot>& roots) {
  json cs = json::array();
  for (const auto& c : crossings) {
    cs.push_back(json{{"omega", c.omega}, {"taus", numbers(c.taus)}, {"direction", c.direction}});
  }
  json ws = json::array();
  for (const auto& w : windows) {
    ws.push_back(json{{"from", w.from},
                      {"to", number(w.to)},
                      {"unstable_roots", w.unstable_roots},
                      {"stable", w.stable()},
                      {"consistent", w.consistent},
                      {"hopf_at_from", w.hopf_at_from},
                      {"hopf_omega", w.hopf_omega}});
  }
  json rs = json::array();
  for (const auto& r : roots) {
    rs.push_back(json{{"re", r.lambda.real()}, {"im", r.lambda.imag()}, {"residual", r.residual}, {"refined", r.refined}});
  }
  return dump(json{{"crossings", cs}, {"windows", ws}, {"roots", rs}});
}

static json orbit_object(const PeriodicOrbit& o) {
  return json{{"T", o.period()},
              {"tau", o.tau()},
              {"dim", o.dim()},
              {"intervals", o.intervals()},
              {"degree", o.degree()},
              {"equilibrium", numbers(o.equilibrium())},
              {"nodes", numbers(o.nodes())},
              {"residual", number(o.residual())},
              {"phase_residual", number(o.phase_residual())},
              {"iterations", o.iterations()},
              {"converged", o.converged()}};
}

std::string to_json(const PeriodicOrbit& orbit) { return dump(orbit_object(orbit)); }

std::vector<BranchRow> branch_rows(const Branch& branch, const NormSpace& q, const NormSpace& c) {
  std::vector<BranchRow> rows;
  rows.reserve(branch.points.size());
  for (const auto& o : branch.points) {
    BranchRow r{o.tau(), o.period(), kInf, kInf};
    if (o.min_deviation() >= 1e-8) {
      r.r_lc_q = min_norm_on_cycle(o, q).value;
      r.r_lc_c = min_norm_on_cycle(o, c).value;
    }
    rows.push_back(r);
  }
  return rows;
}

std::string branch_csv(const std::vector<BranchRow>& rows) {
  std::string out = "tau,T,R_LC_Q,R_LC_C\n";
  for (const auto& r : rows) {
    out += format_number(r.tau) + ',' + format_number(r.period) + ',' + format_number(r.r_lc_q) + ',' +
           format_number(r.r_lc_c) + '\n';
  }
  return out;
}

std::string branch_json(const Branch& branch, const std::vector<BranchRow>& rows) {
  json pts = json::array();
  for (const auto& r : rows) {
    pts.push_back(json{{"tau", r.tau}, {"T", r.period}, {"R_LC_Q", number(r.r_lc_q)}, {"R_LC_C", number(r.r_lc_c)}});
  }
  json j{{"points", pts},
         {"failures", branch.failures},
         {"completed", branch.completed},
         {"fold_suspect", branch.fold_suspect},
         {"message", branch.message}};
  j["final_orbit"] = branch.points.empty() ? json(nullptr) : orbit_object(branch.points.back());
  return dump(j);
}

}  // namespace roa
