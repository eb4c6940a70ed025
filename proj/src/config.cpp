#include "ofsym/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

namespace ofsym {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  RunConfig cfg;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // strip comments outside quotes
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header at line " + std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("empty key at line " + std::to_string(line_no));
    cfg.sections[section][key] = value;
  }

  for (const auto& [name, value] : cfg.sections["constants"]) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
      throw ConfigError("constant '" + name + "' is not a number");
    cfg.constants[name] = v;
  }

  cfg.grid.x_min = cfg.get_num("grid", "x_min", cfg.grid.x_min);
  cfg.grid.x_max = cfg.get_num("grid", "x_max", cfg.grid.x_max);
  cfg.grid.n_x = static_cast<int>(cfg.get_num("grid", "n_x", cfg.grid.n_x));
  cfg.grid.t_max = cfg.get_num("grid", "t_max", cfg.grid.t_max);
  cfg.grid.n_t = static_cast<int>(cfg.get_num("grid", "n_t", cfg.grid.n_t));
  cfg.cond_tol = cfg.get_num("tol", "cond_tol", cfg.cond_tol);
  cfg.residual_tol = cfg.get_num("tol", "residual_tol", cfg.residual_tol);
  cfg.quad_tol = cfg.get_num("tol", "quad_tol", cfg.quad_tol);
  cfg.x_ref = cfg.get_num("model", "x_ref", 0.0);
  cfg.out_dir = cfg.get("output", "dir", cfg.out_dir);

  if (!(cfg.grid.x_min < cfg.grid.x_max))
    throw ConfigError("grid requires x_min < x_max");
  if (cfg.grid.n_x < 16) throw ConfigError("grid requires n_x >= 16");
  if (cfg.grid.n_t < 2) throw ConfigError("grid requires n_t >= 2");
  if (!(cfg.cond_tol > 0) || !(cfg.residual_tol > 0) || !(cfg.quad_tol > 0))
    throw ConfigError("tolerances must be positive");
  return cfg;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string RunConfig::get(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  auto s = sections.find(section);
  if (s == sections.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

double RunConfig::get_num(const std::string& section, const std::string& key,
                          double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  char* end = nullptr;
  const double r = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("[" + section + "] " + key + " is not a number: " + v);
  return r;
}

double RunConfig::require_num(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing [" + section + "] " + key);
  return get_num(section, key, 0.0);
}

Expr RunConfig::expr(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing [" + section + "] " + key);
  return parse(get(section, key), constants);
}

ModelSpec RunConfig::model() const {
  if (sections.find("model") == sections.end())
    throw ConfigError("missing [model] section");
  ModelSpec m;
  const std::string coord = get("model", "coord", "x");
  if (coord == "x")
    m.frame = CoordFrame::LogPrice;
  else if (coord == "S")
    m.frame = CoordFrame::StockPrice;
  else
    throw ConfigError("[model] coord must be 'x' or 'S'");
  if (!has("model", "sigma")) throw ConfigError("missing [model] sigma");
  m.sigma = expr("model", "sigma");
  if (has("model", "Cx")) {
    m.drift_contra = expr("model", "Cx");
  } else {
    if (!has("model", "kappa") || !has("model", "mu") || !has("model", "lambda"))
      throw ConfigError("[model] needs either Cx or kappa/mu/lambda");
    m.kappa = expr("model", "kappa");
    m.mu = expr("model", "mu");
    m.lambda = expr("model", "lambda");
  }
  return m;
}

}  // namespace ofsym
