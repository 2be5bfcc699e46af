#include "gtap/forward.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace gtap {

namespace {

SpatialOperator make_operator(const ProblemConfig& config) {
  return SpatialOperator(config.grid, ghost_map(config.grid, closures_for(config)), config.eps,
                         config.resolved_phi());
}

RelaxationDiag limit_weights(const ProblemConfig& config) {
  RelaxationDiag mu;
  mu.mu.assign(static_cast<std::size_t>(config.scheme.stages()), 1.0);
  return mu;
}

bool is_type_a(const IMEXPair& pair) {
  for (int l = 0; l < pair.stages(); ++l) {
    if (pair.implicit_part.a(l, l) == 0.0) return false;
  }
  return true;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

ClosureSet closures_for(const ProblemConfig& config) {
  return config.eps == 0.0 ? limit_closures() : kinetic_closures();
}

StepOperators::StepOperators(const ProblemConfig& config)
    : StepOperators(config, config.eps == 0.0 ? limit_weights(config) : relaxation_for(config)) {}

StepOperators::StepOperators(const ProblemConfig& config, RelaxationDiag mu)
    : scheme_(config.scheme), op_(make_operator(config)), mu_(std::move(mu)), dt_(config.dt()), eps_(config.eps) {
  if (mu_.stages() != scheme_.stages())
    throw std::invalid_argument("relaxation weights do not match the stage count");
  if (eps_ == 0.0 && !is_type_a(scheme_))
    throw std::invalid_argument("eps = 0 requires a type-A scheme; " + scheme_.name + " is not");
  if (eps_ > 0.0 && eps_ < 1e-6 && !is_type_a(scheme_))
    throw std::invalid_argument("scheme " + scheme_.name + " is not type A; refusing to run at eps < 1e-6");
  build(config);
}

void StepOperators::build(const ProblemConfig&) {
  const int s = stages();
  const auto& im = scheme_.implicit_part;
  const Tridiagonal lap = op_.diffusion_matrix();
  const Tridiagonal flux_j_part = op_.flux_rho_j_matrix();
  const auto m = lap.size();
  rho_matrix_.clear();
  j_matrix_.clear();
  for (int l = 0; l < s; ++l) {
    const double gamma = dt_ * im.a(l, l) * mu_[l];
    Tridiagonal t(m);
    for (std::size_t i = 0; i < m; ++i) {
      t.diag[i] = 1.0 - gamma * lap.diag[i];
      t.lower[i] = -gamma * lap.lower[i];
      t.upper[i] = -gamma * lap.upper[i];
    }
    rho_matrix_.push_back(std::move(t));

    Tridiagonal k(m);
    if (!limit()) {
      const double c = dt_ * im.a(l, l);
      for (std::size_t i = 0; i < m; ++i) {
        k.diag[i] = eps_ * eps_ + c + c * flux_j_part.diag[i];
        k.lower[i] = c * flux_j_part.lower[i];
        k.upper[i] = c * flux_j_part.upper[i];
      }
    }
    j_matrix_.push_back(std::move(k));
  }
}

void StepOperators::step(std::span<const double> rho_n, std::span<const double> j_n, double u, Field& rho_next,
                         Field& j_next, StageRecord* record) const {
  const std::vector<double> u_stage(static_cast<std::size_t>(stages()), u);
  step(rho_n, j_n, u_stage, rho_next, j_next, record);
}

void StepOperators::step(std::span<const double> rho_n, std::span<const double> j_n,
                         std::span<const double> u_stage, Field& rho_next, Field& j_next,
                         StageRecord* record) const {
  const int s = stages();
  if (u_stage.size() != static_cast<std::size_t>(s)) throw std::invalid_argument("one control value per stage");
  const auto m = static_cast<std::size_t>(grid().cells);
  const auto& ex = scheme_.explicit_part;
  const auto& im = scheme_.implicit_part;
  const double eps2 = eps_ * eps_;

  std::vector<Field> R(s, Field(m)), J(s, Field(m));
  std::vector<Field> F(s, Field(m)), L(s, Field(m)), G(s, Field(m));
  const Field zero(m, 0.0);
  Field rhs(m), tmp(m);

  Field lap_u(m);
  for (int l = 0; l < s; ++l) {
    const double u = u_stage[l];
    // u-dependent ghost part of D^2
    op_.diffusion(zero, zero, u, lap_u);
    std::copy(rho_n.begin(), rho_n.end(), rhs.begin());
    for (int k = 0; k < l; ++k) {
      const double ce = -dt_ * ex.a(l, k);
      const double cl = dt_ * (im.a(l, k) - ex.a(l, k)) * mu_[k];
      for (std::size_t i = 0; i < m; ++i) rhs[i] += ce * F[k][i] + cl * L[k][i];
    }
    const double gamma = dt_ * im.a(l, l) * mu_[l];
    for (std::size_t i = 0; i < m; ++i) rhs[i] += gamma * lap_u[i];
    solve_tridiagonal(rho_matrix_[l], rhs, R[l]);

    if (limit()) {
      op_.flux_rho(R[l], zero, u, J[l]);
      for (auto& v : J[l]) v = -v;
    } else {
      for (std::size_t i = 0; i < m; ++i) rhs[i] = eps2 * j_n[i];
      for (int k = 0; k < l; ++k) {
        const double c = -dt_ * im.a(l, k);
        for (std::size_t i = 0; i < m; ++i) rhs[i] += c * G[k][i];
      }
      const double c = dt_ * im.a(l, l);
      op_.flux_rho(R[l], zero, u, tmp);
      for (std::size_t i = 0; i < m; ++i) rhs[i] -= c * tmp[i];
      solve_tridiagonal(j_matrix_[l], rhs, J[l]);
    }

    op_.flux_j(R[l], J[l], u, F[l]);
    op_.diffusion(R[l], J[l], u, L[l]);
    if (!limit()) {
      op_.flux_rho(R[l], J[l], u, G[l]);
      for (std::size_t i = 0; i < m; ++i) G[l][i] += J[l][i];
    }
  }

  rho_next.assign(rho_n.begin(), rho_n.end());
  for (int k = 0; k < s; ++k) {
    const double ce = -dt_ * ex.b[k];
    const double cl = dt_ * (im.b[k] - ex.b[k]) * mu_[k];
    for (std::size_t i = 0; i < m; ++i) rho_next[i] += ce * F[k][i] + cl * L[k][i];
  }

  if (limit()) {
    j_next.assign(m, 0.0);
    op_.flux_rho(rho_next, zero, u_stage.back(), j_next);
    for (auto& v : j_next) v = -v;
  } else {
    j_next.assign(j_n.begin(), j_n.end());
    for (int k = 0; k < s; ++k) {
      const double c = -dt_ * im.b[k] / eps2;
      for (std::size_t i = 0; i < m; ++i) j_next[i] += c * G[k][i];
    }
  }

  if (record) {
    record->R = std::move(R);
    record->J = std::move(J);
  }
}

StepResult imex_step(const Field& rho_n, const Field& j_n, double u_n, const ProblemConfig& config,
                     const RelaxationDiag& mu) {
  if (config.eps == 0.0) throw std::invalid_argument("imex_step needs eps > 0; use imex_step_limit");
  StepOperators ops(config, mu);
  StepResult out;
  ops.step(rho_n, j_n, u_n, out.rho, out.j, &out.stages);
  return out;
}

StepResult imex_step_limit(const Field& rho_n, double u_n, const ProblemConfig& config) {
  if (config.eps != 0.0) throw std::invalid_argument("imex_step_limit needs eps = 0");
  StepOperators ops(config);
  StepResult out;
  const Field zero(rho_n.size(), 0.0);
  ops.step(rho_n, zero, u_n, out.rho, out.j, &out.stages);
  return out;
}

ForwardTrajectory solve_forward(const ProblemConfig& config, std::span<const double> control, bool record_stages) {
  config.validate();
  if (control.size() != static_cast<std::size_t>(config.n_steps))
    throw std::invalid_argument("control has " + std::to_string(control.size()) + " values, expected " +
                                std::to_string(config.n_steps));
  ForwardTrajectory traj;
  traj.control.assign(control.begin(), control.end());
  traj.run_id = run_digest(config, control);
  traj.rho.reserve(config.n_steps + 1);
  traj.j.reserve(config.n_steps + 1);
  traj.rho.push_back(config.rho0);
  traj.j.push_back(config.eps == 0.0 ? config.grid.zeros() : config.j0);
  if (config.n_steps == 0) return traj;

  const StepOperators ops(config);
  if (config.eps == 0.0) {
    // j is not a state in the limit; report the closure-consistent flux
    Field d(config.rho0.size());
    ops.op().flux_rho(config.rho0, config.grid.zeros(), control[0], d);
    for (auto& v : d) v = -v;
    traj.j[0] = std::move(d);
  }
  if (record_stages) traj.stages.resize(static_cast<std::size_t>(config.n_steps));
  for (int n = 0; n < config.n_steps; ++n) {
    Field rho_next, j_next;
    try {
      ops.step(traj.rho[n], traj.j[n], control[n], rho_next, j_next, record_stages ? &traj.stages[n] : nullptr);
    } catch (const std::exception& e) {
      throw std::runtime_error("forward step " + std::to_string(n) + ": " + e.what());
    }
    traj.rho.push_back(std::move(rho_next));
    traj.j.push_back(std::move(j_next));
  }
  return traj;
}

ForwardTrajectory solve_forward(const ProblemConfig& config, const std::function<double(double)>& control) {
  config.validate();
  const double dt = config.dt();
  const auto& c = config.scheme.implicit_part.c;
  ForwardTrajectory traj;
  traj.rho.push_back(config.rho0);
  traj.j.push_back(config.eps == 0.0 ? config.grid.zeros() : config.j0);
  if (config.n_steps == 0) return traj;
  const StepOperators ops(config);
  std::vector<double> u_stage(c.size());
  for (int n = 0; n < config.n_steps; ++n) {
    for (std::size_t l = 0; l < c.size(); ++l) u_stage[l] = control((n + c[l]) * dt);
    traj.control.push_back(control((n + 0.5) * dt));
    Field rho_next, j_next;
    try {
      ops.step(traj.rho[n], traj.j[n], u_stage, rho_next, j_next, nullptr);
    } catch (const std::exception& e) {
      throw std::runtime_error("forward step " + std::to_string(n) + ": " + e.what());
    }
    traj.rho.push_back(std::move(rho_next));
    traj.j.push_back(std::move(j_next));
  }
  traj.run_id = run_digest(config, traj.control);
  return traj;
}

double stage_equation_residual(const StepOperators& ops, std::span<const double> rho_n, std::span<const double> j_n,
                               double u, const StageRecord& st, std::span<const double> rho_next,
                               std::span<const double> j_next) {
  const int s = ops.stages();
  const auto m = static_cast<std::size_t>(ops.grid().cells);
  const auto& ex = ops.scheme().explicit_part;
  const auto& im = ops.scheme().implicit_part;
  const auto& mu = ops.mu();
  const double dt = ops.dt();
  const double eps2 = ops.eps() * ops.eps();
  const auto& op = ops.op();

  std::vector<Field> F(s, Field(m)), L(s, Field(m)), Drho(s, Field(m));
  for (int k = 0; k < s; ++k) {
    op.flux_j(st.R[k], st.J[k], u, F[k]);
    op.diffusion(st.R[k], st.J[k], u, L[k]);
    op.flux_rho(st.R[k], st.J[k], u, Drho[k]);
  }

  double scale = std::max({1.0, max_abs(rho_n), max_abs(j_n), std::abs(u)});
  double res = 0.0;
  for (int l = 0; l < s; ++l) {
    for (std::size_t i = 0; i < m; ++i) {
      double r = st.R[l][i] - rho_n[i];
      double jr = eps2 * (st.J[l][i] - j_n[i]);
      for (int k = 0; k <= l; ++k) {
        r += dt * ex.a(l, k) * (F[k][i] + mu[k] * L[k][i]) - dt * im.a(l, k) * mu[k] * L[k][i];
        jr += dt * im.a(l, k) * (Drho[k][i] + st.J[k][i]);
      }
      res = std::max(res, std::abs(r));
      if (ops.limit()) res = std::max(res, std::abs(st.J[l][i] + Drho[l][i]));
      else res = std::max(res, std::abs(jr));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    double r = rho_next[i] - rho_n[i];
    double jr = eps2 * (j_next[i] - j_n[i]);
    for (int k = 0; k < s; ++k) {
      r += dt * ex.b[k] * (F[k][i] + mu[k] * L[k][i]) - dt * im.b[k] * mu[k] * L[k][i];
      jr += dt * im.b[k] * (Drho[k][i] + st.J[k][i]);
    }
    res = std::max(res, std::abs(r));
    if (!ops.limit()) res = std::max(res, std::abs(jr));
  }
  return res / scale;
}

std::uint64_t run_digest(const ProblemConfig& config, std::span<const double> control) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  auto mix_double = [&](double v) { mix(&v, sizeof v); };
  mix(config.scheme.name.data(), config.scheme.name.size());
  for (double v : {config.eps, config.nu, config.t_final, config.u_lo, config.u_hi, config.resolved_phi()})
    mix_double(v);
  mix(&config.n_steps, sizeof config.n_steps);
  mix(&config.grid.cells, sizeof config.grid.cells);
  for (const auto* f : {&config.rho0, &config.j0, &config.rho_target})
    for (double v : *f) mix_double(v);
  for (double v : control) mix_double(v);
  return h;
}

}  // namespace gtap
