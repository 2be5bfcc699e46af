#pragma once

#include "gtap/grid.hpp"
#include "gtap/tableau.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace gtap {

enum class RelaxationPolicy { optimal, exponential };

/// Initial data and tracking target.
///   manufactured: rho0 = cos x, j0 = 0, rho_d = e^{-T} cos x (exact control known)
///   tracking:     rho0 = j0 = 0,        rho_d = (1 - x^2) / 2
enum class ProblemKind { manufactured, tracking };

/// Everything that determines one forward/adjoint/optimisation run.
struct ProblemConfig {
  IMEXPair scheme;
  double eps = 0.0;
  double nu = 0.0;
  double t_final = 1.0;
  int n_steps = 20;
  Grid1D grid{20};
  double u_lo = -1.0;
  double u_hi = 1.0;
  RelaxationPolicy relaxation = RelaxationPolicy::optimal;
  std::optional<double> phi;  // nullopt selects phi_policy
  ProblemKind problem = ProblemKind::manufactured;
  Field rho0;
  Field j0;
  Field rho_target;

  [[nodiscard]] double dt() const { return t_final / n_steps; }
  [[nodiscard]] double resolved_phi() const;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Builds a config with initial/target fields filled in for `kind`.
ProblemConfig make_config(const IMEXPair& scheme, ProblemKind kind, double eps, int n_steps, int cells,
                          double t_final, double nu = 0.0);

/// Fills rho0, j0 and rho_target from config.problem, grid and t_final.
void fill_problem_data(ProblemConfig& config);

/// Exact optimal control of the manufactured problem, e^{-t} (cos 1 - sin 1).
double manufactured_control(double t);
/// Control samples one value per step, taken at the step midpoint.
std::vector<double> manufactured_control_samples(const ProblemConfig& config);
/// e^{-t} cos x at the cell centres.
Field manufactured_solution(const Grid1D& grid, double t);

/// Error raised for malformed configuration files; carries the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Parses a scheme given as a registry name or as an object with explicit /
/// implicit tableaux. Coefficients may be rationals ("1/6") or numbers.
IMEXPair parse_scheme(const nlohmann::json& node);

/// Reads the problem keys (scheme, eps, nu, t_final, n_steps, cells, u_lo,
/// u_hi, phi, relaxation, problem). Missing keys keep the defaults of `base`.
ProblemConfig config_from_json(const nlohmann::json& doc, ProblemConfig base);
ProblemConfig config_from_json(const nlohmann::json& doc);

nlohmann::json config_to_json(const ProblemConfig& config);

std::string to_string(RelaxationPolicy p);
std::string to_string(ProblemKind k);

}  // namespace gtap
