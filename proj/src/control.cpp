#include "gtap/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gtap {

double objective(const ForwardTrajectory& traj, std::span<const double> u, const ProblemConfig& config) {
  if (traj.rho.empty()) throw std::invalid_argument("objective: empty trajectory");
  const auto& rho_T = traj.rho.back();
  if (rho_T.size() != config.rho_target.size()) throw std::invalid_argument("objective: grid mismatch");
  if (u.size() != static_cast<std::size_t>(config.n_steps)) throw std::invalid_argument("objective: control length mismatch");
  double track = 0.0;
  for (std::size_t i = 0; i < rho_T.size(); ++i) {
    const double d = rho_T[i] - config.rho_target[i];
    track += d * d;
  }
  double reg = 0.0;
  for (double v : u) reg += v * v;
  return 0.5 * config.grid.dx * track + 0.5 * config.dt() * config.nu * reg;
}

std::vector<double> reduced_gradient(std::span<const double> u, const AdjointTrajectory& adj,
                                     const ProblemConfig& config) {
  if (u.size() != adj.control_sensitivity.size())
    throw std::invalid_argument("reduced_gradient: control length mismatch");
  if (adj.source_run_id != 0 && adj.source_run_id != run_digest(config, u))
    throw StaleAdjointError("reduced_gradient: adjoint belongs to a different run");
  std::vector<double> g(u.size());
  const double w = config.dt() * config.nu;
  for (std::size_t n = 0; n < u.size(); ++n) g[n] = w * u[n] + adj.control_sensitivity[n];
  return g;
}

std::vector<double> project_box(std::span<const double> v, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("project_box: lower bound exceeds upper bound");
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [&](double x) { return std::clamp(x, lo, hi); });
  return out;
}

double stationarity(std::span<const double> u, std::span<const double> grad, const ProblemConfig& config) {
  double s = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double d = u[n] - std::clamp(u[n] - grad[n], config.u_lo, config.u_hi);
    s += d * d;
  }
  return std::sqrt(config.dt() * s);
}

Evaluation evaluate(const ProblemConfig& config, std::span<const double> u, bool with_gradient) {
  Evaluation e;
  e.forward = solve_forward(config, u);
  e.value = objective(e.forward, u, config);
  if (with_gradient) {
    const auto adj = solve_adjoint(config, e.forward);
    e.gradient = reduced_gradient(u, adj, config);
  }
  return e;
}

namespace {

bool all_finite(const ForwardTrajectory& t) {
  for (double v : t.rho.back())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

OptimizeReport optimize(const ProblemConfig& config, std::span<const double> u0, const OptimizeOptions& opt) {
  config.validate();
  if (u0.size() != static_cast<std::size_t>(config.n_steps))
    throw std::invalid_argument("optimize: u0 has " + std::to_string(u0.size()) + " values, expected " +
                                std::to_string(config.n_steps));
  OptimizeReport rep;
  std::vector<double> u = project_box(u0, config.u_lo, config.u_hi);
  Evaluation cur = evaluate(config, u);
  // gradient is per step; 1/dt turns it into the L2(0,T) scale
  double step = 1.0 / config.dt();

  for (int it = 0;; ++it) {
    if (!std::isfinite(cur.value) || !all_finite(cur.forward)) {
      rep.finite = false;
      break;
    }
    const double gn = stationarity(u, cur.gradient, config);
    rep.grad_norm_history.push_back(gn);
    rep.trace.push_back({it, cur.value, gn, it == 0 ? 0.0 : step});
    rep.iterations = it;
    if (gn <= opt.tolerance) {
      rep.converged = true;
      break;
    }
    if (it >= opt.max_iterations) break;

    double trial = 2.0 * step;

    bool accepted = false;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt, trial *= 0.5) {
      std::vector<double> cand(u.size());
      for (std::size_t n = 0; n < u.size(); ++n) cand[n] = u[n] - trial * cur.gradient[n];
      cand = project_box(cand, config.u_lo, config.u_hi);
      double decrease = 0.0;
      for (std::size_t n = 0; n < u.size(); ++n) decrease += cur.gradient[n] * (u[n] - cand[n]);
      Evaluation next = evaluate(config, cand, false);
      if (std::isfinite(next.value) && next.value <= cur.value - opt.armijo_c * decrease) {
        next.gradient = reduced_gradient(cand, solve_adjoint(config, next.forward), config);
        u = std::move(cand);
        cur = std::move(next);
        step = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no descent at machine precision
  }
  rep.u_star = std::move(u);
  rep.j_star = cur.value;
  rep.forward = std::move(cur.forward);
  return rep;
}

}  // namespace gtap
