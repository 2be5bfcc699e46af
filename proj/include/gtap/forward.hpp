#pragma once

#include "gtap/config.hpp"
#include "gtap/grid.hpp"
#include "gtap/relaxation.hpp"
#include "gtap/tridiagonal.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gtap {

/// Stage values (R_l, J_l) of one step.
struct StageRecord {
  std::vector<Field> R;
  std::vector<Field> J;
};

struct StepResult {
  Field rho;
  Field j;
  StageRecord stages;
};

/// rho[n], j[n] at t_n = n dt for n = 0..N; control[n] acts on (t_n, t_{n+1}).
struct ForwardTrajectory {
  std::vector<Field> rho;
  std::vector<Field> j;
  std::vector<StageRecord> stages;  // empty unless requested
  std::vector<double> control;
  std::uint64_t run_id = 0;

  [[nodiscard]] int steps() const { return static_cast<int>(rho.size()) - 1; }
};

/// Spatial operators, relaxation weights and the per-stage implicit matrices
/// of one configuration. Shared by the forward step and its transpose.
///
/// For eps > 0 stage l solves
///   (I - dt a_ll mu_l D^2) R_l = rho^n - dt sum_{k<l} at_lk (Dj_k + mu_k D^2 R_k)
///                                      + dt sum_{k<l} a_lk mu_k D^2 R_k
///   eps^2 J_l + dt a_ll (D rho(R_l, J_l) + J_l) = eps^2 j^n - dt sum_{k<l} a_lk (D rho_k + J_k)
/// and for eps = 0 the second line is replaced by J_l = -D rho(R_l).
class StepOperators {
 public:
  explicit StepOperators(const ProblemConfig& config);
  StepOperators(const ProblemConfig& config, RelaxationDiag mu);

  [[nodiscard]] bool limit() const { return eps_ == 0.0; }
  [[nodiscard]] int stages() const { return scheme_.stages(); }
  [[nodiscard]] const Grid1D& grid() const { return op_.grid(); }
  [[nodiscard]] const SpatialOperator& op() const { return op_; }
  [[nodiscard]] const IMEXPair& scheme() const { return scheme_; }
  [[nodiscard]] const RelaxationDiag& mu() const { return mu_; }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] double eps() const { return eps_; }

  /// (I - dt a_ll mu_l D^2) restricted to rho.
  [[nodiscard]] const Tridiagonal& rho_matrix(int l) const { return rho_matrix_[l]; }
  /// (eps^2 + dt a_ll) I + dt a_ll (rho-flux part acting on j); eps > 0 only.
  [[nodiscard]] const Tridiagonal& j_matrix(int l) const { return j_matrix_[l]; }

  /// One step; `stages` is filled when non-null.
  void step(std::span<const double> rho_n, std::span<const double> j_n, double u, Field& rho_next,
            Field& j_next, StageRecord* stages) const;
  /// Same with one control value per stage (u_stage.size() == stages()).
  void step(std::span<const double> rho_n, std::span<const double> j_n, std::span<const double> u_stage,
            Field& rho_next, Field& j_next, StageRecord* stages) const;

 private:
  void build(const ProblemConfig& config);

  IMEXPair scheme_;
  SpatialOperator op_;
  RelaxationDiag mu_;
  double dt_;
  double eps_;
  std::vector<Tridiagonal> rho_matrix_;
  std::vector<Tridiagonal> j_matrix_;
};

/// eps > 0 step. Throws std::invalid_argument for eps = 0, and for eps < 1e-6
/// with a pair that is not type A.
StepResult imex_step(const Field& rho_n, const Field& j_n, double u_n, const ProblemConfig& config,
                     const RelaxationDiag& mu);

/// eps = 0 step of the heat-equation limit (mu = 1, J = -D rho).
/// The returned j is -D rho(rho_next) with the same control.
StepResult imex_step_limit(const Field& rho_n, double u_n, const ProblemConfig& config);

/// N steps from (config.rho0, config.j0). Errors are rethrown with the
/// failing step index.
ForwardTrajectory solve_forward(const ProblemConfig& config, std::span<const double> control,
                                bool record_stages = false);

/// N steps driven by a control known in closed form, sampled at the stage
/// times t_n + c_l dt. trajectory.control holds the step-midpoint values.
ForwardTrajectory solve_forward(const ProblemConfig& config, const std::function<double(double)>& control);

/// Max-norm residual of the stage and update equations for a computed step,
/// relative to max(|rho_n|, |j_n|, |u|, 1). Re-applies the operators to the
/// recorded stages; independent of the elimination order used in step().
double stage_equation_residual(const StepOperators& ops, std::span<const double> rho_n,
                               std::span<const double> j_n, double u, const StageRecord& stages,
                               std::span<const double> rho_next, std::span<const double> j_next);

/// Digest identifying (config, control); stored in trajectories so a stale
/// adjoint can be detected.
std::uint64_t run_digest(const ProblemConfig& config, std::span<const double> control);

/// Closure set used by a configuration: kinetic for eps > 0, limit for eps = 0.
ClosureSet closures_for(const ProblemConfig& config);

}  // namespace gtap
