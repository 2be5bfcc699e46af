#include "gtap/adjoint.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <tuple>

namespace gtap {

namespace {

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

void require_size(std::span<const double> f, const Grid1D& grid, const char* what) {
  if (f.size() != static_cast<std::size_t>(grid.cells))
    throw std::invalid_argument(std::string(what) + " does not match the grid");
}

// Reverse sweep of StepOperators::step. Stage l is undone in the opposite
// order of the forward elimination: outputs F_l, L_l, G_l first, then the J
// solve, then the R solve.
AdjointStepResult reverse_sweep(const StepOperators& ops, std::span<const double> p_next,
                                std::span<const double> q_next) {
  const int s = ops.stages();
  const Grid1D& grid = ops.grid();
  const auto m = static_cast<std::size_t>(grid.cells);
  const auto& ex = ops.scheme().explicit_part;
  const auto& im = ops.scheme().implicit_part;
  const auto& mu = ops.mu();
  const auto& op = ops.op();
  const double dt = ops.dt();
  const bool limit = ops.limit();

  std::vector<Field> Fb(s, Field(m, 0.0)), Lb(s, Field(m, 0.0)), Gb(s, Field(m, 0.0));
  for (int k = 0; k < s; ++k) {
    axpy(-dt * ex.b[k], p_next, Fb[k]);
    axpy(dt * (im.b[k] - ex.b[k]) * mu[k], p_next, Lb[k]);
    if (!limit) axpy(-dt * im.b[k], q_next, Gb[k]);
  }

  AdjointStepResult out;
  out.p.assign(p_next.begin(), p_next.end());
  out.q = limit ? Field(m, 0.0) : Field(q_next.begin(), q_next.end());
  out.stages.P.assign(s, Field(m, 0.0));
  if (limit) out.stages.Qbar.assign(s, Field(m, 0.0));
  else out.stages.Q.assign(s, Field(m, 0.0));

  Cotangent c(grid), aux(grid);
  Field w(m), v(m), scaled(m);
  for (int l = s - 1; l >= 0; --l) {
    c.clear();
    op.flux_j_transpose(Fb[l], c);
    op.diffusion_transpose(Lb[l], c);
    if (!limit) {
      op.flux_rho_transpose(Gb[l], c);
      axpy(1.0, Gb[l], c.j);
    }

    aux.clear();
    if (limit) {
      // J_l = -D rho(R_l)
      for (std::size_t i = 0; i < m; ++i) {
        out.stages.Qbar[l][i] = -c.j[i];
        scaled[i] = -c.j[i];
      }
      op.flux_rho_transpose(scaled, aux);
    } else {
      solve_tridiagonal_transposed(ops.j_matrix(l), c.j, w);
      out.stages.Q[l] = w;
      axpy(1.0, w, out.q);
      for (int k = 0; k < l; ++k) axpy(-dt * im.a(l, k), w, Gb[k]);
      for (std::size_t i = 0; i < m; ++i) scaled[i] = -dt * im.a(l, l) * w[i];
      op.flux_rho_transpose(scaled, aux);
    }
    // aux.j belongs to the zero j argument and is dropped
    axpy(1.0, aux.rho, c.rho);
    out.u_bar += c.u + aux.u;

    solve_tridiagonal_transposed(ops.rho_matrix(l), c.rho, v);
    out.stages.P[l] = v;
    axpy(1.0, v, out.p);
    for (int k = 0; k < l; ++k) {
      axpy(-dt * ex.a(l, k), v, Fb[k]);
      axpy(dt * (im.a(l, k) - ex.a(l, k)) * mu[k], v, Lb[k]);
    }
    aux.clear();
    for (std::size_t i = 0; i < m; ++i) scaled[i] = dt * im.a(l, l) * mu[l] * v[i];
    op.diffusion_transpose(scaled, aux);
    out.u_bar += aux.u;
  }
  return out;
}

// eps = 0 backward step written around P-hat = P + p_{n+1} e_s:
//   (I - dt a_ll D2^T) P-hat_l = p_{n+1} delta_ls - (dF_l)^T y_l + D2^T (z_l - y_l)
//   y_l = dt (sum_{k>l} at_kl P-hat_k + dt_l p_{n+1}),  dt_l = (b~ - A~^T e_s)_l
//   z_l = dt sum_{k>l} a_kl P-hat_k
// with dF_l the linearisation of Dj(R_l, -D rho(R_l)). The J-part of
// (dF_l)^T y_l is Qbar_l = dt (A^T Q)_l.
AdjointStepResult lemma_sweep(const StepOperators& ops, std::span<const double> p_next) {
  const auto cls = classify(ops.scheme());
  if (!cls.isa || !cls.type_a)
    throw std::invalid_argument("limit adjoint (lemma form) needs an ISA type-A scheme; " + ops.scheme().name +
                                " is not");
  const int s = ops.stages();
  const Grid1D& grid = ops.grid();
  const auto m = static_cast<std::size_t>(grid.cells);
  const auto& ex = ops.scheme().explicit_part;
  const auto& im = ops.scheme().implicit_part;
  const auto& op = ops.op();
  const double dt = ops.dt();
  const auto defect = explicit_weight_defect(ops.scheme());

  std::vector<Field> Phat(s, Field(m, 0.0)), Q(s, Field(m, 0.0)), Qbar(s, Field(m, 0.0));
  Cotangent c(grid), aux(grid);
  Field y(m), rhs(m), diff(m);
  for (int l = s - 1; l >= 0; --l) {
    std::fill(y.begin(), y.end(), 0.0);
    std::fill(diff.begin(), diff.end(), 0.0);
    for (int k = l + 1; k < s; ++k) {
      axpy(dt * ex.a(k, l), Phat[k], y);
      axpy(dt * im.a(k, l), Phat[k], diff);
    }
    axpy(dt * defect[l], p_next, y);

    c.clear();
    op.flux_j_transpose(y, c);
    // Qbar_l = dt (A^T Q)_l; recover Q_l, then rebuild Qbar_l from Q
    for (std::size_t i = 0; i < m; ++i) {
      double r = c.j[i];
      for (int k = l + 1; k < s; ++k) r -= dt * im.a(k, l) * Q[k][i];
      Q[l][i] = r / (dt * im.a(l, l));
    }
    for (std::size_t i = 0; i < m; ++i) {
      double r = 0.0;
      for (int k = l; k < s; ++k) r += dt * im.a(k, l) * Q[k][i];
      Qbar[l][i] = r;
    }
    aux.clear();
    op.flux_rho_transpose(Qbar[l], aux);

    for (std::size_t i = 0; i < m; ++i) {
      diff[i] -= y[i];
      rhs[i] = -(c.rho[i] - aux.rho[i]);
    }
    if (l == s - 1) axpy(1.0, p_next, rhs);
    aux.clear();
    op.diffusion_transpose(diff, aux);
    axpy(1.0, aux.rho, rhs);
    solve_tridiagonal_transposed(ops.rho_matrix(l), rhs, Phat[l]);
  }

  // u enters every stage through Dj + D2 with weight dt c~_l and through D2
  // with weight dt c_l; the update adds dt (1 - c~_s).
  const Field zero(m, 0.0);
  Field x_rho(m), f_u(m), l_u(m);
  op.flux_rho(zero, zero, 1.0, x_rho);
  for (auto& e : x_rho) e = -e;
  op.flux_j(zero, x_rho, 1.0, f_u);
  op.diffusion(zero, zero, 1.0, l_u);
  Field x_u(m);
  for (std::size_t i = 0; i < m; ++i) x_u[i] = f_u[i] + l_u[i];

  AdjointStepResult out;
  out.p = Field(m, 0.0);
  out.q = Field(m, 0.0);
  for (int l = 0; l < s; ++l) {
    axpy(1.0, Phat[l], out.p);
    out.u_bar += dt * im.c[l] * dot(Phat[l], l_u) - dt * ex.c[l] * dot(Phat[l], x_u);
  }
  out.u_bar -= dt * (1.0 - ex.c[s - 1]) * dot(p_next, x_u);

  for (std::size_t i = 0; i < m; ++i) Phat[s - 1][i] -= p_next[i];
  out.stages.P = std::move(Phat);
  out.stages.Q = std::move(Q);
  out.stages.Qbar = std::move(Qbar);
  return out;
}

}  // namespace

std::pair<Field, Field> terminal_condition(std::span<const double> rho_T, std::span<const double> rho_d) {
  if (rho_T.size() != rho_d.size()) throw std::invalid_argument("terminal_condition: grid mismatch");
  Field p(rho_T.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = rho_T[i] - rho_d[i];
  return {std::move(p), Field(rho_T.size(), 0.0)};
}

AdjointStepResult adjoint_step(const StepOperators& ops, std::span<const double> p_next,
                               std::span<const double> q_next) {
  require_size(p_next, ops.grid(), "p_next");
  if (!ops.limit()) require_size(q_next, ops.grid(), "q_next");
  return reverse_sweep(ops, p_next, q_next);
}

AdjointStepResult adjoint_step(const Field& p_next, const Field& q_next, const ProblemConfig& config,
                               const RelaxationDiag& mu) {
  if (config.eps == 0.0) throw std::invalid_argument("adjoint_step needs eps > 0; use adjoint_step_limit");
  return adjoint_step(StepOperators(config, mu), p_next, q_next);
}

AdjointStepResult adjoint_step_limit(const StepOperators& ops, std::span<const double> p_next, LimitForm form) {
  if (!ops.limit()) throw std::invalid_argument("adjoint_step_limit needs eps = 0");
  require_size(p_next, ops.grid(), "p_next");
  if (form == LimitForm::lemma) return lemma_sweep(ops, p_next);
  return reverse_sweep(ops, p_next, {});
}

AdjointStepResult adjoint_step_limit(const Field& p_next, const ProblemConfig& config, LimitForm form) {
  return adjoint_step_limit(StepOperators(config), p_next, form);
}

AdjointTrajectory solve_adjoint(const ProblemConfig& config, std::span<const double> rho_T,
                                std::span<const double> rho_d, LimitForm form, bool record_stages) {
  config.validate();
  require_size(rho_T, config.grid, "rho_T");
  require_size(rho_d, config.grid, "rho_d");
  const int n_steps = config.n_steps;
  AdjointTrajectory adj;
  adj.p.resize(static_cast<std::size_t>(n_steps) + 1);
  adj.q.resize(static_cast<std::size_t>(n_steps) + 1);
  adj.control_sensitivity.assign(static_cast<std::size_t>(n_steps), 0.0);
  if (record_stages) adj.stages.resize(static_cast<std::size_t>(n_steps));
  std::tie(adj.p[n_steps], adj.q[n_steps]) = terminal_condition(rho_T, rho_d);
  if (n_steps == 0) return adj;

  const StepOperators ops(config);
  const double dx = config.grid.dx;
  for (int n = n_steps - 1; n >= 0; --n) {
    AdjointStepResult r;
    try {
      r = ops.limit() ? adjoint_step_limit(ops, adj.p[n + 1], form) : adjoint_step(ops, adj.p[n + 1], adj.q[n + 1]);
    } catch (const std::exception& e) {
      throw std::runtime_error("adjoint step " + std::to_string(n) + ": " + e.what());
    }
    adj.p[n] = std::move(r.p);
    adj.q[n] = std::move(r.q);
    adj.control_sensitivity[n] = dx * r.u_bar;
    if (record_stages) adj.stages[n] = std::move(r.stages);
  }
  return adj;
}

AdjointTrajectory solve_adjoint(const ProblemConfig& config, const ForwardTrajectory& forward, LimitForm form,
                                bool record_stages) {
  if (forward.steps() != config.n_steps)
    throw std::invalid_argument("solve_adjoint: trajectory length does not match n_steps");
  auto adj = solve_adjoint(config, forward.rho.back(), config.rho_target, form, record_stages);
  adj.source_run_id = forward.run_id;
  return adj;
}

}  // namespace gtap
