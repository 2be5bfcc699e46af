#include "gtap/config.hpp"

#include <cmath>
#include <stdexcept>

namespace gtap {

using nlohmann::json;

double ProblemConfig::resolved_phi() const {
  return phi ? *phi : phi_policy(eps, scheme.name);
}

void ProblemConfig::validate() const {
  gtap::validate(scheme);
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be non-negative");
  if (!(nu >= 0.0)) throw std::invalid_argument("nu must be non-negative");
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  if (n_steps < 0) throw std::invalid_argument("n_steps must be non-negative");
  if (grid.cells < 3) throw std::invalid_argument("cells must be at least 3");
  if (!(u_lo <= u_hi)) throw std::invalid_argument("u_lo must not exceed u_hi");
  const double p = resolved_phi();
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("phi must lie in [0, 1]");
  if (eps == 0.0 && p != 1.0) throw std::invalid_argument("phi must be 1 when eps = 0");
  const auto m = static_cast<std::size_t>(grid.cells);
  if (rho0.size() != m || j0.size() != m || rho_target.size() != m)
    throw std::invalid_argument("initial or target field does not match the grid");
}

double manufactured_control(double t) { return std::exp(-t) * (std::cos(1.0) - std::sin(1.0)); }

std::vector<double> manufactured_control_samples(const ProblemConfig& config) {
  std::vector<double> u(static_cast<std::size_t>(config.n_steps));
  const double dt = config.dt();
  for (int n = 0; n < config.n_steps; ++n) u[n] = manufactured_control((n + 0.5) * dt);
  return u;
}

Field manufactured_solution(const Grid1D& grid, double t) {
  Field f(static_cast<std::size_t>(grid.cells));
  for (int i = 0; i < grid.cells; ++i) f[i] = std::exp(-t) * std::cos(grid.center(i));
  return f;
}

void fill_problem_data(ProblemConfig& config) {
  const auto& grid = config.grid;
  config.j0 = grid.zeros();
  switch (config.problem) {
    case ProblemKind::manufactured:
      config.rho0 = manufactured_solution(grid, 0.0);
      config.rho_target = manufactured_solution(grid, config.t_final);
      break;
    case ProblemKind::tracking:
      config.rho0 = grid.zeros();
      config.rho_target = grid.zeros();
      for (int i = 0; i < grid.cells; ++i) {
        const double x = grid.center(i);
        config.rho_target[i] = 0.5 * (1.0 - x * x);
      }
      break;
  }
}

ProblemConfig make_config(const IMEXPair& scheme, ProblemKind kind, double eps, int n_steps, int cells,
                          double t_final, double nu) {
  ProblemConfig c;
  c.scheme = scheme;
  c.problem = kind;
  c.eps = eps;
  c.n_steps = n_steps;
  c.grid = Grid1D(cells);
  c.t_final = t_final;
  c.nu = nu;
  fill_problem_data(c);
  return c;
}

std::string to_string(RelaxationPolicy p) {
  return p == RelaxationPolicy::optimal ? "optimal" : "exponential";
}

std::string to_string(ProblemKind k) { return k == ProblemKind::manufactured ? "manufactured" : "tracking"; }

namespace {

double coefficient(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_coefficient(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  }
  throw ConfigError(key, "coefficient must be a number or a string such as \"1/6\"");
}

std::optional<Rational> exact_coefficient(const json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  return std::nullopt;
}

struct ParsedTableau {
  ButcherTableau values;
  std::optional<RationalTableau> exact;
};

ParsedTableau parse_tableau(const json& node, const std::string& key) {
  if (!node.is_object()) throw ConfigError(key, "expected an object with A, b and c");
  for (const char* field : {"A", "b", "c"}) {
    if (!node.contains(field)) throw ConfigError(key + "." + field, "missing");
  }
  ParsedTableau out;
  RationalTableau exact;
  bool all_exact = true;
  auto read_vector = [&](const json& arr, const std::string& k, std::vector<double>& dst,
                         std::vector<Rational>& exact_dst) {
    if (!arr.is_array()) throw ConfigError(k, "expected an array");
    for (const auto& v : arr) {
      dst.push_back(coefficient(v, k));
      if (auto r = exact_coefficient(v)) exact_dst.push_back(*r);
      else all_exact = false;
    }
  };
  const auto& rows = node.at("A");
  if (!rows.is_array()) throw ConfigError(key + ".A", "expected an array of rows");
  for (const auto& row : rows) {
    out.values.A.emplace_back();
    exact.A.emplace_back();
    read_vector(row, key + ".A", out.values.A.back(), exact.A.back());
  }
  read_vector(node.at("b"), key + ".b", out.values.b, exact.b);
  read_vector(node.at("c"), key + ".c", out.values.c, exact.c);
  if (all_exact) out.exact = exact;
  return out;
}

template <typename T>
T get_key(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace

IMEXPair parse_scheme(const json& node) {
  if (node.is_string()) {
    try {
      return builtin_scheme(node.get<std::string>());
    } catch (const std::out_of_range& e) {
      throw ConfigError("scheme", e.what());
    }
  }
  if (!node.is_object()) throw ConfigError("scheme", "expected a registry name or a tableau object");
  const std::string name = node.value("name", std::string("custom"));
  if (!node.contains("explicit") || !node.contains("implicit"))
    throw ConfigError("scheme", "tableau object needs 'explicit' and 'implicit'");
  auto ex = parse_tableau(node.at("explicit"), "scheme.explicit");
  auto im = parse_tableau(node.at("implicit"), "scheme.implicit");
  try {
    if (ex.exact && im.exact) return make_pair(name, *ex.exact, *im.exact);
    return make_pair(name, std::move(ex.values), std::move(im.values));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scheme", e.what());
  }
}

ProblemConfig config_from_json(const json& doc, ProblemConfig c) {
  if (!doc.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
  if (doc.contains("scheme")) c.scheme = parse_scheme(doc.at("scheme"));
  if (doc.contains("eps")) c.eps = get_key<double>(doc, "eps");
  if (doc.contains("nu")) c.nu = get_key<double>(doc, "nu");
  if (doc.contains("t_final")) c.t_final = get_key<double>(doc, "t_final");
  if (doc.contains("n_steps")) c.n_steps = get_key<int>(doc, "n_steps");
  if (doc.contains("cells")) {
    const int cells = get_key<int>(doc, "cells");
    if (cells < 3) throw ConfigError("cells", "need at least 3 cells");
    c.grid = Grid1D(cells);
  }
  if (doc.contains("u_lo")) c.u_lo = get_key<double>(doc, "u_lo");
  if (doc.contains("u_hi")) c.u_hi = get_key<double>(doc, "u_hi");
  if (doc.contains("phi")) {
    const auto& v = doc.at("phi");
    if (v.is_string()) {
      if (v.get<std::string>() != "auto") throw ConfigError("phi", "expected \"auto\" or a number");
      c.phi.reset();
    } else if (v.is_number()) {
      c.phi = v.get<double>();
    } else {
      throw ConfigError("phi", "expected \"auto\" or a number");
    }
  }
  if (doc.contains("relaxation")) {
    const auto v = get_key<std::string>(doc, "relaxation");
    if (v == "optimal") c.relaxation = RelaxationPolicy::optimal;
    else if (v == "exponential") c.relaxation = RelaxationPolicy::exponential;
    else throw ConfigError("relaxation", "expected \"optimal\" or \"exponential\"");
  }
  if (doc.contains("problem")) {
    const auto v = get_key<std::string>(doc, "problem");
    if (v == "manufactured") c.problem = ProblemKind::manufactured;
    else if (v == "tracking") c.problem = ProblemKind::tracking;
    else throw ConfigError("problem", "expected \"manufactured\" or \"tracking\"");
  }
  fill_problem_data(c);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("<root>", e.what());
  }
  return c;
}

ProblemConfig config_from_json(const json& doc) {
  ProblemConfig base;
  base.scheme = builtin_scheme("GSA342");
  return config_from_json(doc, base);
}

json config_to_json(const ProblemConfig& c) {
  json doc;
  doc["scheme"] = c.scheme.name;
  doc["eps"] = c.eps;
  doc["nu"] = c.nu;
  doc["t_final"] = c.t_final;
  doc["n_steps"] = c.n_steps;
  doc["cells"] = c.grid.cells;
  doc["u_lo"] = c.u_lo;
  doc["u_hi"] = c.u_hi;
  if (c.phi) doc["phi"] = *c.phi;
  else doc["phi"] = "auto";
  doc["phi_resolved"] = c.resolved_phi();
  doc["relaxation"] = to_string(c.relaxation);
  doc["problem"] = to_string(c.problem);
  return doc;
}

}  // namespace gtap
