#pragma once

#include "gtap/adjoint.hpp"
#include "gtap/config.hpp"
#include "gtap/forward.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace gtap {

/// J = (dx/2) sum_i (rho^N_i - rho_d,i)^2 + (dt nu / 2) sum_n u_n^2.
double objective(const ForwardTrajectory& traj, std::span<const double> u, const ProblemConfig& config);

/// Raised when an adjoint was computed for a different (config, control).
class StaleAdjointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// dt nu u_n + adj.control_sensitivity[n]. The exact gradient of objective().
std::vector<double> reduced_gradient(std::span<const double> u, const AdjointTrajectory& adj,
                                     const ProblemConfig& config);

/// Componentwise clamp. Throws std::invalid_argument if lo > hi.
std::vector<double> project_box(std::span<const double> v, double lo, double hi);

/// sqrt(dt) || u - P(u - g) ||_2, the discrete L2(0,T) norm of the projected
/// gradient map.
double stationarity(std::span<const double> u, std::span<const double> grad, const ProblemConfig& config);

struct Evaluation {
  double value = 0.0;
  std::vector<double> gradient;
  ForwardTrajectory forward;
};

/// Forward solve, objective, and optionally the adjoint gradient.
Evaluation evaluate(const ProblemConfig& config, std::span<const double> u, bool with_gradient = true);

struct OptimizeOptions {
  double tolerance = 1e-6;
  int max_iterations = 10000;
  double armijo_c = 1e-4;
  int max_backtracks = 60;
};

struct TraceRow {
  int iter = 0;
  double value = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct OptimizeReport {
  std::vector<double> u_star;
  double j_star = 0.0;
  int iterations = 0;
  std::vector<double> grad_norm_history;
  std::vector<TraceRow> trace;
  bool converged = false;
  bool finite = true;  // false if a NaN/Inf state was met
  ForwardTrajectory forward;  // trajectory at u_star
};

/// Projected gradient with Armijo backtracking; each trial step is twice the
/// last accepted one. Stops when stationarity()
/// drops to options.tolerance. Hitting the iteration cap is reported through
/// `converged`, not thrown.
OptimizeReport optimize(const ProblemConfig& config, std::span<const double> u0, const OptimizeOptions& options = {});

}  // namespace gtap
