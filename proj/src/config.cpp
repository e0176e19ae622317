#include "axidewet/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

namespace axidewet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
    throw ConfigError(line, "key '" + key + "' expects a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& v, int line, const std::string& key) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size())
    throw ConfigError(line, "key '" + key + "' expects an integer, got '" + v + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(line, "key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& v, int line, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item), line, key));
  if (out.empty()) throw ConfigError(line, "key '" + key + "' expects a list of numbers");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, int, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"method",
       [](RunConfig& c, const std::string& v, int line, const std::string&) {
         try {
           c.method = method_from_string(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(line, e.what());
         }
       }},
      {"q", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.q = to_int(v, l, k); }},
      {"anisotropy.kind",
       [](RunConfig& c, const std::string& v, int line, const std::string&) {
         if (v != "isotropic" && v != "kfold" && v != "bgn" && v != "series")
           throw ConfigError(line, "anisotropy.kind must be isotropic, kfold, bgn or series");
         c.anisotropy_kind = v;
       }},
      {"anisotropy.k", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.anisotropy_k = to_int(v, l, k); }},
      {"anisotropy.beta", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.anisotropy_beta = to_double(v, l, k); }},
      {"anisotropy.eps", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.anisotropy_eps = to_double(v, l, k); }},
      {"anisotropy.coeffs", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.anisotropy_coeffs = to_list(v, l, k); }},
      {"stabilizer.kind",
       [](RunConfig& c, const std::string& v, int line, const std::string&) {
         if (v == "auto")
           c.stabilizer = StabilizerSource::automatic;
         else if (v == "constant")
           c.stabilizer = StabilizerSource::constant;
         else if (v == "table")
           c.stabilizer = StabilizerSource::table;
         else
           throw ConfigError(line, "stabilizer.kind must be auto, constant or table");
       }},
      {"stabilizer.value", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.stabilizer_value = to_double(v, l, k); }},
      {"stabilizer.table", [](RunConfig& c, const std::string& v, int, const std::string&) { c.stabilizer_table = v; }},
      {"stabilizer.margin", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.stabilizer_margin = to_double(v, l, k); }},
      {"geometry.shape",
       [](RunConfig& c, const std::string& v, int line, const std::string&) {
         if (v == "semi_ellipse")
           c.shape.kind = ShapeKind::semi_ellipse;
         else if (v == "torus")
           c.shape.kind = ShapeKind::torus;
         else if (v == "elongated")
           c.shape.kind = ShapeKind::elongated;
         else
           throw ConfigError(line, "geometry.shape must be semi_ellipse, torus or elongated");
       }},
      {"geometry.params", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.shape.params = to_list(v, l, k); }},
      {"geometry.J", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.J = to_int(v, l, k); }},
      {"physics.sigma", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.contact.sigma = to_double(v, l, k); }},
      {"physics.eta", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.contact.eta = to_double(v, l, k); }},
      {"time.dt", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.dt = to_double(v, l, k); }},
      {"time.T", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.T = to_double(v, l, k); }},
      {"time.snapshot_every", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.snapshot_every = to_int(v, l, k); }},
      {"solver.picard_tol", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.picard_tol = to_double(v, l, k); }},
      {"solver.picard_max", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.picard_max = to_int(v, l, k); }},
      {"solver.max_halvings", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.max_halvings = to_int(v, l, k); }},
      {"events.enabled", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.events.enabled = to_bool(v, l, k); }},
      {"events.axis_touch_eps", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.events.axis_touch_eps = to_double(v, l, k); }},
      {"events.pinch_eps", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.events.pinch_eps = to_double(v, l, k); }},
      {"converge.levels", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.converge_levels = to_int(v, l, k); }},
      {"converge.workers", [](RunConfig& c, const std::string& v, int l, const std::string& k) { c.converge_workers = to_int(v, l, k); }},
      {"output.dir", [](RunConfig& c, const std::string& v, int, const std::string&) { c.output_dir = v; }},
  };
  return table;
}

void validate(const RunConfig& c, const std::map<std::string, int>& lines) {
  auto line_of = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  };
  auto check = [&](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(line_of(key), key + ": " + msg);
  };
  check(c.q == 0 || c.q == 1, "q", "must be 0 or 1");
  check(c.J >= 2, "geometry.J", "needs at least two elements");
  check(c.dt > 0.0, "time.dt", "must be positive");
  check(c.T > 0.0, "time.T", "must be positive");
  check(c.snapshot_every >= 0, "time.snapshot_every", "must be non-negative");
  check(c.picard_tol > 0.0, "solver.picard_tol", "must be positive");
  check(c.picard_max >= 1, "solver.picard_max", "must be at least 1");
  check(c.max_halvings >= 0, "solver.max_halvings", "must be non-negative");
  check(c.contact.eta > 0.0, "physics.eta", "mobility must be positive");
  check(c.stabilizer_margin >= 1.0, "stabilizer.margin", "must be at least 1");
  check(c.stabilizer != StabilizerSource::constant || c.stabilizer_value >= 0.0,
        "stabilizer.value", "must be non-negative");
  check(c.stabilizer != StabilizerSource::table || !c.stabilizer_table.empty(), "stabilizer.table",
        "required when stabilizer.kind = table");
  check(c.events.axis_touch_eps >= 0.0, "events.axis_touch_eps", "must be non-negative");
  check(c.events.pinch_eps >= 0.0, "events.pinch_eps", "must be non-negative");
  check(c.converge_levels >= 2, "converge.levels", "needs at least two levels");
  check(c.converge_workers >= 1, "converge.workers", "must be at least 1");
  check(!c.output_dir.empty(), "output.dir", "must not be empty");

  AnisotropyModel model = AnisotropyModel::isotropic();
  try {
    model = c.model();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line_of("anisotropy.kind"), e.what());
  }
  const auto adm = check_admissibility(model, c.q);
  if (!adm.admissible)
    throw ConfigError(line_of("q"), "anisotropy " + model.describe() + " is not admissible for q=" +
                                        std::to_string(c.q));
  try {
    (void)make_initial_shape(c.shape, c.J);
  } catch (const std::exception& e) {
    throw ConfigError(line_of("geometry.params"), e.what());
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, fn] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Setter> table;
  for (const auto& [name, fn] : setters()) table.emplace(name, fn);
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(line, "unknown key '" + key + "'");
    if (!seen.emplace(key, line).second)
      throw ConfigError(line, "key '" + key + "' repeated (first on line " +
                                  std::to_string(seen[key]) + ")");
    it->second(cfg, value, line, key);
  }
  validate(cfg, seen);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(0, "cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

AnisotropyModel RunConfig::model() const {
  if (anisotropy_kind == "isotropic") return AnisotropyModel::isotropic();
  if (anisotropy_kind == "kfold") return AnisotropyModel::kfold(anisotropy_k, anisotropy_beta);
  if (anisotropy_kind == "bgn") return AnisotropyModel::bgn(anisotropy_eps);
  if (anisotropy_coeffs.empty())
    throw std::invalid_argument("series anisotropy needs anisotropy.coeffs");
  return AnisotropyModel::series(anisotropy_coeffs);
}

EnergyMatrixSpec RunConfig::energy_spec(const AnisotropyModel& m) const {
  switch (stabilizer) {
    case StabilizerSource::constant:
      return EnergyMatrixSpec::constant(q, stabilizer_value);
    case StabilizerSource::table:
      return EnergyMatrixSpec::tabulated(
          q, std::make_shared<StabilizerTable>(read_stabilizer_csv(stabilizer_table)),
          stabilizer_margin);
    case StabilizerSource::automatic:
      break;
  }
  return EnergyMatrixSpec::automatic(m, q, stabilizer_margin);
}

SchemeConfig RunConfig::scheme() const {
  SchemeConfig s;
  s.method = method;
  s.dt = dt;
  s.picard_tol = picard_tol;
  s.picard_max = picard_max;
  s.max_halvings = max_halvings;
  s.contact = contact;
  return s;
}

StabilizerTable read_stabilizer_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(0, "cannot open stabilizer table " + path);
  std::string line;
  if (!std::getline(is, line) || trim(line) != "theta,s0")
    throw ConfigError(1, path + ": expected header 'theta,s0'");
  std::vector<double> th, s0;
  int n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (trim(line).empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(n, path + ": expected two columns");
    th.push_back(to_double(trim(line.substr(0, comma)), n, "theta"));
    s0.push_back(to_double(trim(line.substr(comma + 1)), n, "s0"));
  }
  try {
    return StabilizerTable(std::move(th), std::move(s0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, path + ": " + e.what());
  }
}

void write_stabilizer_csv(std::ostream& os, const StabilizerTable& table) {
  const auto old_prec = os.precision(17);
  os << "theta,s0\n";
  for (std::size_t i = 0; i < table.size(); ++i)
    os << table.theta()[i] << ',' << table.values()[i] << '\n';
  os.precision(old_prec);
}

}  // namespace axidewet
