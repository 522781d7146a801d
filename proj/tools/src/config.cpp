#include "roa_cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "roa/errors.hpp"
#include "roa/models.hpp"

namespace roa::cli {
namespace {

using json = nlohmann::json;

std::string position_suffix(std::size_t line, std::size_t column) {
  if (line == 0) return {};
  return " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  expect_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw ConfigError(path + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& dst, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) return;
  const std::string where = path.empty() ? std::string(key) : path + "." + key;
  if constexpr (std::is_same_v<T, double>) {
    if (!it->is_number()) throw ConfigError(where + ": expected a number");
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw ConfigError(where + ": expected true or false");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!it->is_string()) throw ConfigError(where + ": expected a string");
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) throw ConfigError(where + ": expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (it->is_number_integer() && !it->is_number_unsigned() && it->template get<long long>() < 0) {
        throw ConfigError(where + ": expected a non-negative integer");
      }
    }
  }
  try {
    dst = it->template get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": value has the wrong type");
  }
}

ModelConfig parse_model(const json& j) {
  check_keys(j, "model", {"name", "tau", "a", "a_tilde", "w", "lin_a", "lin_b", "file"});
  ModelConfig m;
  read(j, "name", m.name, "model");
  read(j, "tau", m.tau, "model");
  read(j, "a", m.a, "model");
  read(j, "a_tilde", m.a_tilde, "model");
  read(j, "w", m.w, "model");
  read(j, "lin_a", m.lin_a, "model");
  read(j, "lin_b", m.lin_b, "model");
  read(j, "file", m.file, "model");
  // A model file carries its own delay; use it unless the config overrides it.
  if (m.name == "file" && !m.file.empty() && !j.contains("tau")) {
    try {
      m.tau = load_model_file(m.file).tau;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("model.file: ") + e.what());
    }
  }
  return m;
}

FamilyConfig parse_family(const json& j, const std::string& path) {
  if (j.is_string()) {
    FamilyConfig f;
    f.shape = j.get<std::string>();
    return f;
  }
  check_keys(j, path, {"shape", "omega", "degree", "scalar", "table"});
  FamilyConfig f;
  read(j, "shape", f.shape, path);
  read(j, "omega", f.omega, path);
  read(j, "degree", f.degree, path);
  read(j, "scalar", f.scalar, path);
  if (auto it = j.find("table"); it != j.end()) {
    if (!it->is_array()) throw ConfigError(path + ".table: expected an array of pieces");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string pp = path + ".table[" + std::to_string(i) + "]";
      const json& pj = (*it)[i];
      check_keys(pj, pp, {"from", "to", "coeffs"});
      TablePieceConfig piece;
      read(pj, "from", piece.from, pp);
      read(pj, "to", piece.to, pp);
      read(pj, "coeffs", piece.coeffs, pp);
      f.table.push_back(std::move(piece));
    }
  }
  return f;
}

json family_to_json(const FamilyConfig& f) {
  json table = json::array();
  for (const auto& p : f.table) table.push_back(json{{"from", p.from}, {"to", p.to}, {"coeffs", p.coeffs}});
  return json{{"shape", f.shape}, {"omega", f.omega}, {"degree", f.degree}, {"scalar", f.scalar}, {"table", table}};
}

RunConfig from_json(const json& j) {
  check_keys(j, "config",
             {"model", "norm", "grid_density", "rtol", "atol", "max_step", "delta_num", "horizon", "trend_window",
              "min_trend_time", "families", "scan", "simulate", "spectrum", "orbit", "basin", "sweep", "seed",
              "workers", "out"});
  RunConfig c;
  if (auto it = j.find("model"); it != j.end()) c.model = parse_model(*it);
  read(j, "norm", c.norm, "");
  read(j, "grid_density", c.grid_density, "");
  read(j, "rtol", c.rtol, "");
  read(j, "atol", c.atol, "");
  read(j, "max_step", c.max_step, "");
  read(j, "delta_num", c.delta_num, "");
  read(j, "horizon", c.horizon, "");
  read(j, "trend_window", c.trend_window, "");
  read(j, "min_trend_time", c.min_trend_time, "");
  if (auto it = j.find("families"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("families: expected an array");
    c.families.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      c.families.push_back(parse_family((*it)[i], "families[" + std::to_string(i) + "]"));
    }
  }
  if (auto it = j.find("scan"); it != j.end()) {
    const json& s = *it;
    check_keys(s, "scan",
               {"directions", "radial_step", "radial_tol", "max_radius", "direction_list", "use_symmetry",
                "compute_secondary", "pixel_map"});
    read(s, "directions", c.scan.directions, "scan");
    read(s, "radial_step", c.scan.radial_step, "scan");
    read(s, "radial_tol", c.scan.radial_tol, "scan");
    read(s, "max_radius", c.scan.max_radius, "scan");
    read(s, "direction_list", c.scan.direction_list, "scan");
    read(s, "use_symmetry", c.scan.use_symmetry, "scan");
    read(s, "compute_secondary", c.scan.compute_secondary, "scan");
    if (auto pm = s.find("pixel_map"); pm != s.end()) {
      check_keys(*pm, "scan.pixel_map", {"enabled", "family", "p1_min", "p1_max", "p2_min", "p2_max", "resolution"});
      auto& p = c.scan.pixel_map;
      read(*pm, "enabled", p.enabled, "scan.pixel_map");
      read(*pm, "family", p.family, "scan.pixel_map");
      read(*pm, "p1_min", p.p1_min, "scan.pixel_map");
      read(*pm, "p1_max", p.p1_max, "scan.pixel_map");
      read(*pm, "p2_min", p.p2_min, "scan.pixel_map");
      read(*pm, "p2_max", p.p2_max, "scan.pixel_map");
      read(*pm, "resolution", p.resolution, "scan.pixel_map");
    }
  }
  if (auto it = j.find("simulate"); it != j.end()) {
    check_keys(*it, "simulate", {"family", "params", "csv_points"});
    read(*it, "family", c.simulate.family, "simulate");
    read(*it, "params", c.simulate.params, "simulate");
    read(*it, "csv_points", c.simulate.csv_points, "simulate");
  }
  if (auto it = j.find("spectrum"); it != j.end()) {
    check_keys(*it, "spectrum", {"tau_max", "n_cheb", "branches", "roots"});
    read(*it, "tau_max", c.spectrum.tau_max, "spectrum");
    read(*it, "n_cheb", c.spectrum.n_cheb, "spectrum");
    read(*it, "branches", c.spectrum.branches, "spectrum");
    read(*it, "roots", c.spectrum.roots, "spectrum");
  }
  if (auto it = j.find("orbit"); it != j.end()) {
    check_keys(*it, "orbit", {"tau", "intervals", "degree", "initial_step", "min_step", "max_step", "phases"});
    read(*it, "tau", c.orbit.tau, "orbit");
    read(*it, "intervals", c.orbit.intervals, "orbit");
    read(*it, "degree", c.orbit.degree, "orbit");
    read(*it, "initial_step", c.orbit.initial_step, "orbit");
    read(*it, "min_step", c.orbit.min_step, "orbit");
    read(*it, "max_step", c.orbit.max_step, "orbit");
    read(*it, "phases", c.orbit.phases, "orbit");
  }
  if (auto it = j.find("basin"); it != j.end()) {
    check_keys(*it, "basin", {"family", "radius", "samples"});
    read(*it, "family", c.basin.family, "basin");
    read(*it, "radius", c.basin.radius, "basin");
    read(*it, "samples", c.basin.samples, "basin");
  }
  if (auto it = j.find("sweep"); it != j.end()) {
    check_keys(*it, "sweep", {"tau_max", "tau_step"});
    read(*it, "tau_max", c.sweep.tau_max, "sweep");
    read(*it, "tau_step", c.sweep.tau_step, "sweep");
  }
  read(j, "seed", c.seed, "");
  read(j, "workers", c.workers, "");
  read(j, "out", c.out, "");
  return c;
}

json to_json(const RunConfig& c) {
  json fams = json::array();
  for (const auto& f : c.families) fams.push_back(family_to_json(f));
  const auto& pm = c.scan.pixel_map;
  return json{
      {"model",
       {{"name", c.model.name},
        {"tau", c.model.tau},
        {"a", c.model.a},
        {"a_tilde", c.model.a_tilde},
        {"w", c.model.w},
        {"lin_a", c.model.lin_a},
        {"lin_b", c.model.lin_b},
        {"file", c.model.file}}},
      {"norm", c.norm},
      {"grid_density", c.grid_density},
      {"rtol", c.rtol},
      {"atol", c.atol},
      {"max_step", c.max_step},
      {"delta_num", c.delta_num},
      {"horizon", c.horizon},
      {"trend_window", c.trend_window},
      {"min_trend_time", c.min_trend_time},
      {"families", fams},
      {"scan",
       {{"directions", c.scan.directions},
        {"radial_step", c.scan.radial_step},
        {"radial_tol", c.scan.radial_tol},
        {"max_radius", c.scan.max_radius},
        {"direction_list", c.scan.direction_list},
        {"use_symmetry", c.scan.use_symmetry},
        {"compute_secondary", c.scan.compute_secondary},
        {"pixel_map",
         {{"enabled", pm.enabled},
          {"family", pm.family},
          {"p1_min", pm.p1_min},
          {"p1_max", pm.p1_max},
          {"p2_min", pm.p2_min},
          {"p2_max", pm.p2_max},
          {"resolution", pm.resolution}}}}},
      {"simulate",
       {{"family", c.simulate.family}, {"params", c.simulate.params}, {"csv_points", c.simulate.csv_points}}},
      {"spectrum",
       {{"tau_max", c.spectrum.tau_max},
        {"n_cheb", c.spectrum.n_cheb},
        {"branches", c.spectrum.branches},
        {"roots", c.spectrum.roots}}},
      {"orbit",
       {{"tau", c.orbit.tau},
        {"intervals", c.orbit.intervals},
        {"degree", c.orbit.degree},
        {"initial_step", c.orbit.initial_step},
        {"min_step", c.orbit.min_step},
        {"max_step", c.orbit.max_step},
        {"phases", c.orbit.phases}}},
      {"basin", {{"family", c.basin.family}, {"radius", c.basin.radius}, {"samples", c.basin.samples}}},
      {"sweep", {{"tau_max", c.sweep.tau_max}, {"tau_step", c.sweep.tau_step}}},
      {"seed", c.seed},
      {"workers", c.workers},
      {"out", c.out}};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

ConfigError::ConfigError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(what + position_suffix(line, column)), line_(line), column_(column) {}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset of the offending character.
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (auto pos = msg.find(": ", msg.find("column")); pos != std::string::npos) msg = msg.substr(pos + 2);
    throw ConfigError("syntax error: " + msg, line, column);
  }
  return from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_config(const RunConfig& c) {
  const auto& m = c.model;
  require(m.name == "swing" || m.name == "scalar-cubic" || m.name == "linear" || m.name == "file",
          "model.name must be one of swing, scalar-cubic, linear, file");
  require(m.tau > 0.0 && std::isfinite(m.tau), "model.tau must be positive");
  require(m.name != "file" || !m.file.empty(), "model.file is required when model.name is 'file'");
  require(c.norm == "c" || c.norm == "pc" || c.norm == "m2" || c.norm == "q", "norm must be one of c, m2, q");
  require(c.grid_density >= 16, "grid_density must be at least 16");
  require(c.rtol > 0.0 && c.atol > 0.0, "rtol and atol must be positive");
  require(c.max_step >= 0.0, "max_step must be non-negative");
  require(c.delta_num > 0.0, "delta_num must be positive");
  require(c.horizon >= 0.0, "horizon must be non-negative");
  require(c.trend_window > 0.0, "trend_window must be positive");
  require(c.min_trend_time >= 0.0, "min_trend_time must be non-negative");
  require(!c.families.empty(), "at least one family is required");
  for (const auto& f : c.families) {
    try {
      (void)parse_shape(f.shape);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("families: ") + e.what());
    }
    require(f.degree >= 0, "families: degree must be non-negative");
    require(f.omega >= 0.0, "families: omega must be non-negative");
  }
  const auto nf = c.families.size();
  require(c.scan.pixel_map.family < nf, "scan.pixel_map.family is out of range");
  require(c.scan.pixel_map.resolution >= 2, "scan.pixel_map.resolution must be at least 2");
  require(c.simulate.family < nf, "simulate.family is out of range");
  require(c.basin.family < nf, "basin.family is out of range");
  require(c.basin.radius > 0.0, "basin.radius must be positive");
  require(c.basin.samples >= 100, "basin.samples must be at least 100");
  require(c.spectrum.tau_max > 0.0, "spectrum.tau_max must be positive");
  require(c.spectrum.n_cheb >= 4, "spectrum.n_cheb must be at least 4");
  require(c.spectrum.branches >= 1, "spectrum.branches must be at least 1");
  require(c.orbit.tau >= 0.0, "orbit.tau must be non-negative");
  require(c.orbit.phases >= 8, "orbit.phases must be at least 8");
  require(c.sweep.tau_max > 0.0 && c.sweep.tau_step > 0.0, "sweep.tau_max and sweep.tau_step must be positive");
  require(c.workers >= 0, "workers must be non-negative");
  require(!c.out.empty(), "out must not be empty");
}

Model build_model(const RunConfig& cfg) {
  const auto& m = cfg.model;
  if (m.name == "swing") return make_swing(m.a, m.a_tilde, m.w, m.tau);
  if (m.name == "scalar-cubic") return make_scalar_cubic(m.tau);
  if (m.name == "linear") return make_linear_scalar(m.lin_a, m.lin_b, m.tau);
  if (m.name == "file") return load_model_file(m.file).with_tau(m.tau);
  throw ConfigError("unknown model '" + m.name + "'");
}

NormSpace build_space(const RunConfig& cfg, const Model& model) {
  switch (parse_norm_kind(cfg.norm)) {
    case NormKind::UniformC: return NormSpace::uniform(cfg.grid_density);
    case NormKind::M2: return NormSpace::m2(cfg.grid_density);
    case NormKind::QuotientQ: return NormSpace::quotient_for(model, cfg.grid_density);
  }
  throw ConfigError("unknown norm '" + cfg.norm + "'");
}

SimulationSettings build_settings(const RunConfig& cfg, const Model& model) {
  SimulationSettings s;
  s.space = build_space(cfg, model);
  s.delta_num = cfg.delta_num;
  s.horizon = cfg.horizon;
  s.trend_window = cfg.trend_window;
  s.min_trend_time = cfg.min_trend_time;
  s.solver.rtol = cfg.rtol;
  s.solver.atol = cfg.atol;
  s.solver.max_step = cfg.max_step;
  return s;
}

FamilySpec build_family(const FamilyConfig& fc, const Model& model) {
  const Shape shape = parse_shape(fc.shape);
  std::shared_ptr<const ShapeTable> table;
  if (!fc.table.empty()) {
    std::vector<ShapeTable::Piece> pieces;
    for (const auto& p : fc.table) pieces.push_back({p.from, p.to, p.coeffs});
    table = ShapeTable::normalized(std::move(pieces));
  }
  if (fc.scalar) {
    FamilySpec f = FamilySpec::scalar(shape, fc.omega, fc.degree, table);
    if (model.dim > 1) {
      // Same shape on every component, one parameter block each.
      f.components.clear();
      std::size_t offset = 0;
      for (std::size_t i = 0; i < model.dim; ++i) {
        f.components.push_back({shape, offset});
        offset += shape_param_count(shape, fc.degree);
      }
    }
    return f;
  }
  return FamilySpec::for_model(model, shape, fc.omega, fc.degree, table);
}

ScanConfig build_scan(const RunConfig& cfg, const Model& model) {
  ScanConfig s;
  for (const auto& f : cfg.families) s.families.push_back(build_family(f, model));
  s.sim = build_settings(cfg, model);
  s.directions = cfg.scan.directions;
  s.radial_step = cfg.scan.radial_step;
  s.radial_tol = cfg.scan.radial_tol;
  s.max_radius = cfg.scan.max_radius;
  s.direction_list = cfg.scan.direction_list;
  s.seed = cfg.seed;
  s.use_symmetry = cfg.scan.use_symmetry;
  s.compute_secondary = cfg.scan.compute_secondary;
  s.workers = cfg.workers;
  return s;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"example1", "fig3", "fig4", "fig5", "fig7"};
  return names;
}

RunConfig preset(const std::string& name) {
  RunConfig c;
  if (name == "example1" || name == "fig3") {
    c.model.name = "scalar-cubic";
    c.model.tau = 1.0;
    c.norm = "c";
    c.families = {family_config("constant"), family_config("linear-increasing"), family_config("jump"),
                  family_config("linear-decreasing")};
    c.scan.radial_step = 0.1;
    c.simulate.params = {0.5};
    c.out = "roa_" + name;
    return c;
  }
  if (name == "fig4" || name == "fig5" || name == "fig7") {
    c.model = ModelConfig{};
    c.norm = "q";
    c.families = {family_config("constant"), family_config("jump"), family_config("cosine"), family_config("sine")};
    if (name == "fig4") {
      c.scan.pixel_map.enabled = true;
    }
    if (name == "fig5") c.families = {family_config("constant")};
    c.out = "roa_" + name;
    return c;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace roa::cli
