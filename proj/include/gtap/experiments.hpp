#pragma once

#include "gtap/control.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gtap {

/// How the closed-form control of the order study is fed to the solver.
///   stage: u*(t_n + c_l dt) at every stage
///   step:  u*(t_n + dt/2) for the whole step, as the optimiser does
enum class ControlSampling { stage, step };

struct OrderStudySpec {
  IMEXPair scheme;
  std::vector<int> n_steps{20, 40, 80, 160, 320};
  double t_final = 1.0;
  ControlSampling sampling = ControlSampling::stage;
  int workers = 1;
};

/// Errors are maxima over the time levels of the spatial norm.
/// rate_* is log2(previous / current); NaN on the first row.
struct OrderRow {
  int n_steps = 0;
  double err_rho_l1 = 0.0;
  double err_rho_linf = 0.0;
  double err_p_l1 = 0.0;
  double err_p_linf = 0.0;
  double rate_rho_l1 = 0.0;
  double rate_rho_linf = 0.0;
  double rate_p_l1 = 0.0;
  double rate_p_linf = 0.0;
  std::string error;  // non-empty if the row failed
};

/// eps = 0, nu = 0, cells = N (dx = dt), manufactured data.
ProblemConfig order_study_config(const IMEXPair& scheme, int n_steps, double t_final);
std::vector<OrderRow> run_order_study(const OrderStudySpec& spec);

struct Norms {
  double l1 = 0.0;
  double linf = 0.0;
};
/// dx sum |f| and max |f|.
Norms field_norms(const Grid1D& grid, std::span<const double> f);

struct BenchmarkSpec {
  std::vector<IMEXPair> schemes;
  std::vector<double> eps{0.0, 0.1, 0.5, 0.8, 1.0};
  int cells = 50;
  std::optional<int> n_steps;  // default: default_benchmark_steps(scheme)
  double t_final = 1.58;
  double nu = 0.001;
  double u_lo = -1.0;
  double u_hi = 1.0;
  double bound = 10.0;  // max |rho| above this marks the row unstable
  OptimizeOptions options;
  int workers = 1;
};

/// 200 for SSP2332, 100 otherwise.
int default_benchmark_steps(const IMEXPair& scheme);
ProblemConfig benchmark_config(const IMEXPair& scheme, double eps, const BenchmarkSpec& spec);

struct BenchmarkRow {
  std::string scheme;
  double eps = 0.0;
  int n_steps = 0;
  int cells = 0;
  double dt = 0.0;
  double phi = 1.0;
  double j_star = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  double max_rho = 0.0;  // over the trajectory at u* and a probe at u = max(|u_lo|, |u_hi|)
  bool converged = false;
  bool bounded = false;
  std::string status;  // ok | not-converged | unstable | error: ...
  std::vector<double> u_star;
  Field rho_error;  // rho*(., T) - rho_d

  [[nodiscard]] bool usable() const { return converged && bounded; }
};

std::vector<BenchmarkRow> run_benchmark(const BenchmarkSpec& spec);

struct ChapmanEnskogSpec {
  IMEXPair scheme;
  std::vector<double> eps{1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3, 3.125e-3, 1.5625e-3};
  int cells = 50;
  int n_steps = 1;
  double t_final = 1.0;
};

struct ChapmanEnskogRow {
  double eps = 0.0;
  double residual = 0.0;
  double rate = 0.0;  // NaN on the first row
};

/// One step from rho0 = cos x, j0 = 0 with the consistent boundary datum.
std::vector<ChapmanEnskogRow> run_chapman_enskog(const ChapmanEnskogSpec& spec);

struct GradientCheck {
  double adjoint = 0.0;
  double finite_difference = 0.0;
  double rel_error = 0.0;
};

/// <grad J, d> from the adjoint against (J(u + h d) - J(u - h d)) / 2h.
GradientCheck directional_gradient_check(const ProblemConfig& config, std::span<const double> u,
                                         std::span<const double> direction, double h = 1e-6);

/// Central differences of J along each unit vector; columns run on `workers`
/// threads.
std::vector<double> finite_difference_gradient(const ProblemConfig& config, std::span<const double> u, double h,
                                               int workers = 1);

}  // namespace gtap
