#pragma once

#include "gtap/config.hpp"
#include "gtap/forward.hpp"
#include "gtap/relaxation.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace gtap {

/// Stage multipliers of one backward step.
///   P[l]    multiplier of the R_l equation
///   Q[l]    multiplier of the J_l equation (eps > 0, and the lemma form at eps = 0)
///   Qbar[l] dt (A^T Q)_l; filled at eps = 0 only
struct AdjointStageRecord {
  std::vector<Field> P;
  std::vector<Field> Q;
  std::vector<Field> Qbar;
};

struct AdjointStepResult {
  Field p;
  Field q;
  /// d<p_next, rho_next> / du_n with the forward step linearised, per unit dx.
  double u_bar = 0.0;
  AdjointStageRecord stages;
};

/// Arrangement of the eps = 0 backward step.
///   transformed: the reverse sweep of the forward step with Qbar as the
///                J-stage multiplier
///   lemma:       P-hat = P + p_{n+1} e_s with p_n = e^T P-hat, Q recovered from
///                Qbar = dt A^T Q by back substitution; needs ISA and type A
enum class LimitForm { lemma, transformed };

/// p[n], q[n] for n = 0..N. control_sensitivity[n] is the derivative of the
/// tracking term of the objective with respect to u_n.
struct AdjointTrajectory {
  std::vector<Field> p;
  std::vector<Field> q;
  std::vector<AdjointStageRecord> stages;  // empty unless requested
  std::vector<double> control_sensitivity;
  std::uint64_t source_run_id = 0;

  [[nodiscard]] int steps() const { return static_cast<int>(p.size()) - 1; }
};

/// (rho_T - rho_d, 0). Throws std::invalid_argument on a size mismatch.
std::pair<Field, Field> terminal_condition(std::span<const double> rho_T, std::span<const double> rho_d);

/// Exact transpose of StepOperators::step. The multipliers are scaled so that
/// the cotangent of rho is dx p and that of j is dx eps^2 q. At eps = 0 this
/// is the transformed form and q_next is ignored.
AdjointStepResult adjoint_step(const StepOperators& ops, std::span<const double> p_next,
                               std::span<const double> q_next);
AdjointStepResult adjoint_step(const Field& p_next, const Field& q_next, const ProblemConfig& config,
                               const RelaxationDiag& mu);

/// eps = 0 backward step in either arrangement; q is returned as zero.
AdjointStepResult adjoint_step_limit(const StepOperators& ops, std::span<const double> p_next, LimitForm form);
AdjointStepResult adjoint_step_limit(const Field& p_next, const ProblemConfig& config,
                                     LimitForm form = LimitForm::lemma);

/// Terminal condition followed by N backward steps. Errors are rethrown with
/// the failing step index.
AdjointTrajectory solve_adjoint(const ProblemConfig& config, std::span<const double> rho_T,
                                std::span<const double> rho_d, LimitForm form = LimitForm::lemma,
                                bool record_stages = false);
/// Same, from a forward trajectory; the result carries its run id.
AdjointTrajectory solve_adjoint(const ProblemConfig& config, const ForwardTrajectory& forward,
                                LimitForm form = LimitForm::lemma, bool record_stages = false);

}  // namespace gtap
