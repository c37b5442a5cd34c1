#pragma once

// JSON model configuration shared by the command-line tool and the
// acceptance runner.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "swankit/errors.hpp"
#include "swankit/hermitize.hpp"
#include "swankit/parse.hpp"
#include "swankit/pdm.hpp"
#include "swankit/spectral.hpp"
#include "swankit/swanson.hpp"
#include "swankit/typea.hpp"

namespace swankit {

enum class BMode { constant_commutator, generalized };

struct Tolerances {
  /// pointwise identities
  double identity = 1e-10;
  /// checks that go through quadrature or hermitization
  double composite = 1e-9;
  /// N-fold condition residual
  double nfold = 1e-8;
  /// invariance fit remainder
  double invariance = 1e-9;
  /// H-residuals of rho^{-1}-mapped eigenvectors
  double spectral = 1e-5;
};

struct ModelConfig {
  SwansonParams params;
  std::optional<std::string> a_expr;
  std::optional<std::string> m_expr;
  BMode b_mode = BMode::constant_commutator;
  std::optional<std::string> B0_expr;
  std::optional<std::string> B2_expr;
  /// anchor of the integrals in b(x) and u(x)
  double x0 = 0.0;
  Interval domain{-5.0, 5.0};
  std::size_t grid_n = 1000;
  std::optional<TypeAData> typea;
  Tolerances tol;

  Grid grid() const { return {domain.lo, domain.hi, grid_n}; }
};

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("missing field '" + path + key + "'");
  return j.at(key);
}

inline double number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError("field '" + path + "' must be a number");
  return j.get<double>();
}

inline std::string string(const nlohmann::json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError("field '" + path + "' must be a string");
  return j.get<std::string>();
}

inline double positive(const nlohmann::json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ConfigError("field '" + path + "' must be positive");
  return v;
}

}  // namespace detail

inline ModelConfig parse_config(const std::string& text) {
  using detail::number;
  using detail::require;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON at " + detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");

  static const char* known[] = {"params", "a_expr", "m_expr", "b_mode", "B0_expr", "B2_expr", "x0",
                                "domain", "grid",   "typea",  "tolerances"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known)) {
      throw ConfigError("unknown field '" + key + "'");
    }
  }

  ModelConfig c;
  const auto& p = require(j, "params", "");
  c.params = {number(require(p, "omega", "params."), "params.omega"),
              number(require(p, "alpha", "params."), "params.alpha"),
              number(require(p, "beta", "params."), "params.beta"),
              number(require(p, "gamma", "params."), "params.gamma"),
              number(require(p, "delta", "params."), "params.delta")};

  if (j.contains("a_expr")) c.a_expr = detail::string(j["a_expr"], "a_expr");
  if (j.contains("m_expr")) c.m_expr = detail::string(j["m_expr"], "m_expr");
  if (c.a_expr.has_value() == c.m_expr.has_value()) throw ConfigError("exactly one of 'a_expr' and 'm_expr' is required");

  if (j.contains("b_mode")) {
    const std::string mode = detail::string(j["b_mode"], "b_mode");
    if (mode == "constant_commutator") {
      c.b_mode = BMode::constant_commutator;
    } else if (mode == "generalized") {
      c.b_mode = BMode::generalized;
    } else {
      throw ConfigError("field 'b_mode' must be 'constant_commutator' or 'generalized'");
    }
  }
  if (j.contains("B0_expr")) c.B0_expr = detail::string(j["B0_expr"], "B0_expr");
  if (j.contains("B2_expr")) c.B2_expr = detail::string(j["B2_expr"], "B2_expr");
  if (j.contains("x0")) c.x0 = number(j["x0"], "x0");

  const auto& dom = require(j, "domain", "");
  c.domain = {number(require(dom, "x_min", "domain."), "domain.x_min"),
              number(require(dom, "x_max", "domain."), "domain.x_max")};
  if (!(c.domain.lo < c.domain.hi)) throw ConfigError("field 'domain' needs x_min < x_max");
  if (!c.domain.contains(c.x0)) throw ConfigError("field 'x0' must lie inside the domain");
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    const nlohmann::json& n = g.is_object() ? require(g, "n", "grid.") : g;
    if (!n.is_number_integer() || n.get<long long>() < 16) throw ConfigError("field 'grid.n' must be an integer >= 16");
    c.grid_n = n.get<std::size_t>();
  }

  if (j.contains("typea")) {
    const auto& t = j["typea"];
    TypeAData d;
    const auto& N = require(t, "N", "typea.");
    if (!N.is_number_integer() || N.get<long long>() < 1) throw ConfigError("field 'typea.N' must be a positive integer");
    d.N = N.get<int>();
    const auto& Q = require(t, "Q", "typea.");
    if (!Q.is_array() || Q.empty() || Q.size() > 3) {
      throw ConfigError("field 'typea.Q' must be an array [q0, q1, q2] of at most three numbers");
    }
    for (std::size_t k = 0; k < Q.size(); ++k) d.q[k] = number(Q[k], "typea.Q[" + std::to_string(k) + "]");
    if (t.contains("R")) d.R = number(t["R"], "typea.R");
    try {
      d.f_class = fclass_from_string(detail::string(require(t, "f_class", "typea."), "typea.f_class"));
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("field 'typea.f_class': ") + e.what());
    }
    if (t.contains("nu")) d.nu = number(t["nu"], "typea.nu");
    validate(d);
    c.typea = d;
  }

  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("field 'tolerances' must be an object");
    for (const auto& [key, value] : t.items()) {
      const std::string path = "tolerances." + key;
      if (key == "identity") c.tol.identity = detail::positive(value, path);
      else if (key == "composite") c.tol.composite = detail::positive(value, path);
      else if (key == "nfold") c.tol.nfold = detail::positive(value, path);
      else if (key == "invariance") c.tol.invariance = detail::positive(value, path);
      else if (key == "spectral") c.tol.spectral = detail::positive(value, path);
      else throw ConfigError("unknown field '" + path + "'");
    }
  }
  return c;
}

inline ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Expressions and operators built from a configuration.
struct Model {
  ModelConfig config;
  ScalarExpr a;
  std::optional<MassProfile> mass;
  FirstOrderOp eta;
  std::optional<ChangeOfVariable> cv;
  ScalarExpr B0;
  ScalarExpr B2;
};

namespace detail {

inline ScalarExpr parse_field(const std::string& text, Var var, const std::string& field) {
  try {
    return parse_expr(text, var);
  } catch (const ParseError& e) {
    throw ConfigError("field '" + field + "': " + e.what());
  }
}

}  // namespace detail

inline Model build_model(const ModelConfig& c) {
  Model m;
  m.config = c;
  const double wt = c.params.omega_tilde();
  if (c.m_expr) {
    m.mass = MassProfile::from_expr(detail::parse_field(*c.m_expr, Var::x, "m_expr"), c.domain);
    m.a = a_from_mass(*m.mass, c.params);
  } else {
    m.a = detail::parse_field(*c.a_expr, Var::x, "a_expr");
    if (wt > 0.0) {
      bool positive = true;
      for (const double t : chebyshev_points(c.domain, 201)) positive = positive && evaluate(m.a, t) > 0.0;
      if (positive) m.mass = mass_from_a(m.a, c.params, c.domain);
    }
  }
  if (m.mass) m.cv.emplace(*m.mass, c.x0);
  if (c.b_mode == BMode::constant_commutator) {
    m.eta = {m.a, b_constant_commutator(m.a, c.x0, c.domain)};
  } else {
    if (!c.B0_expr) throw ConfigError("b_mode 'generalized' needs 'B0_expr'");
    if (!m.cv) throw ConfigError("b_mode 'generalized' needs a(x) > 0 and omega_tilde > 0 for the u(x) map");
    m.B0 = detail::parse_field(*c.B0_expr, Var::u, "B0_expr");
    m.B2 = c.B2_expr ? detail::parse_field(*c.B2_expr, Var::u, "B2_expr") : ScalarExpr(0.5);
    m.eta = {m.a, GeneralizedAnsatz{m.B0, m.B2}.b(m.a, *m.cv)};
  }
  return m;
}

}  // namespace swankit
