#pragma once

#include <map>
#include <string>

#include "ofsym/model.hpp"

namespace ofsym {

struct ConfigError : Error {
  using Error::Error;
};

// Flat key-value file with [section] headers. Expression values are quoted
// strings; # starts a comment. Declared constants are inlined into every
// parsed expression.
struct RunConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::map<std::string, double> constants;

  GridSpec grid;
  double cond_tol = 1e-8;
  double residual_tol = 1e-8;
  double quad_tol = 1e-10;
  double x_ref = 0.0;
  std::string out_dir = "out";

  static RunConfig load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback = "") const;
  double get_num(const std::string& section, const std::string& key,
                 double fallback) const;
  double require_num(const std::string& section, const std::string& key) const;

  // Parses an expression value with the declared constants inlined.
  Expr expr(const std::string& section, const std::string& key) const;

  // Builds the model from the [model] section (coord, sigma, kappa/mu/lambda
  // or Cx). Throws ConfigError when the section is missing or incomplete.
  ModelSpec model() const;
};

}  // namespace ofsym
