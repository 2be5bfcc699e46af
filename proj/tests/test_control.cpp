#include "gtap/control.hpp"
#include "gtap/experiments.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace gtap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> random_vector(std::mt19937& gen, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

}  // namespace

TEST_CASE("objective") {
  const auto config = make_config(builtin_scheme("GSA342"), ProblemKind::tracking, 0.5, 4, 10, 1.0, 0.1);
  ForwardTrajectory t;
  t.rho = {config.rho_target};
  const std::vector<double> zero(4, 0.0);
  CHECK(objective(t, zero, config) == 0.0);
  const std::vector<double> one(4, 1.0);
  CHECK_THAT(objective(t, one, config), WithinRel(0.5 * 0.25 * 0.1 * 4.0, 1e-15));
  t.rho = {Field(10, 0.0)};
  double ref = 0.0;
  for (double v : config.rho_target) ref += 0.5 * config.grid.dx * v * v;
  CHECK_THAT(objective(t, zero, config), WithinRel(ref, 1e-15));
  CHECK_THROWS(objective(t, std::vector<double>(3, 0.0), config));
}

TEST_CASE("objective at the exact control decays at fourth order") {
  double prev = 0.0;
  for (int n : {20, 40, 80}) {
    const auto config = make_config(builtin_scheme("GSA342"), ProblemKind::manufactured, 0.0, n, n, 1.0);
    const auto traj = solve_forward(config, manufactured_control);
    const double J = objective(traj, traj.control, config);
    CHECK(J >= 0.0);
    if (prev > 0.0) {
      CHECK(std::log2(prev / J) > 3.6);
      CHECK(std::log2(prev / J) < 4.4);
    }
    prev = J;
  }
}

TEST_CASE("gradient with a vanishing adjoint is the regularisation term") {
  std::mt19937 gen(31);
  const auto config = make_config(builtin_scheme("SSP2332"), ProblemKind::tracking, 0.5, 6, 8, 1.0, 0.3);
  const auto adj = solve_adjoint(config, config.rho_target, config.rho_target);
  const auto u = random_vector(gen, 6);
  const auto g = reduced_gradient(u, adj, config);
  for (int n = 0; n < 6; ++n) CHECK_THAT(g[n], WithinAbs(config.dt() * 0.3 * u[n], 1e-16));
}

TEST_CASE("stale adjoints are rejected") {
  const auto config = make_config(builtin_scheme("GSA342"), ProblemKind::tracking, 0.0, 6, 8, 1.0, 0.001);
  std::vector<double> u(6, 0.1);
  const auto fwd = solve_forward(config, u);
  const auto adj = solve_adjoint(config, fwd);
  CHECK_NOTHROW(reduced_gradient(u, adj, config));
  u[0] = 0.2;
  CHECK_THROWS_AS(reduced_gradient(u, adj, config), StaleAdjointError);
}

TEST_CASE("adjoint gradient equals central differences") {
  std::mt19937 gen(32);
  for (const char* name : {"GSA342", "SSP2332"})
    for (double eps : {0.0, 0.5, 1.0}) {
      const auto config = make_config(builtin_scheme(name), ProblemKind::tracking, eps, 12, 10, 1.0, 0.001);
      const auto u = random_vector(gen, 12);
      const auto g = evaluate(config, u).gradient;
      const auto fd = finite_difference_gradient(config, u, 1e-6);
      double scale = 0.0;
      for (double v : fd) scale = std::max(scale, std::abs(v));
      for (int n = 0; n < 12; ++n) CHECK_THAT(g[n], WithinAbs(fd[n], 1e-6 * scale));
      const auto d = random_vector(gen, 12);
      CHECK(directional_gradient_check(config, u, d).rel_error <= 1e-6);
    }
}

TEST_CASE("box projection") {
  const std::vector<double> v{-2.0, 0.0, 2.0};
  CHECK(project_box(v, -1.0, 1.0) == std::vector<double>{-1.0, 0.0, 1.0});
  const std::vector<double> inside{-0.5, 0.25};
  CHECK(project_box(inside, -1.0, 1.0) == inside);
  std::mt19937 gen(33);
  const auto r = random_vector(gen, 50, -3.0, 3.0);
  const auto once = project_box(r, -1.0, 1.0);
  CHECK(project_box(once, -1.0, 1.0) == once);
  CHECK_THROWS_AS(project_box(v, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("stationarity measure") {
  auto config = make_config(builtin_scheme("GSA342"), ProblemKind::tracking, 0.0, 4, 5, 1.0);
  const std::vector<double> u{0.0, 1.0, -1.0, 0.5};
  const std::vector<double> g{0.1, -0.2, 0.3, 0.0};
  // active bounds clip the second and third entries to zero
  CHECK_THAT(stationarity(u, g, config), WithinRel(std::sqrt(0.25 * 0.01), 1e-14));
}

TEST_CASE("optimiser started at the exact control stops at once") {
  const auto config = make_config(builtin_scheme("GSA342"), ProblemKind::manufactured, 0.0, 80, 80, 1.0);
  const auto u = manufactured_control_samples(config);
  const auto rep = optimize(config, u);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 2);
  CHECK(rep.j_star < 1e-10);
}

TEST_CASE("optimiser descends monotonically and reports its exit") {
  const auto config = make_config(builtin_scheme("GSA342"), ProblemKind::tracking, 0.5, 40, 20, 1.58, 0.001);
  const auto rep = optimize(config, std::vector<double>(40, 0.0));
  REQUIRE(rep.converged);
  CHECK(rep.grad_norm_history.back() <= 1e-6);
  for (std::size_t k = 1; k < rep.trace.size(); ++k) CHECK(rep.trace[k].value <= rep.trace[k - 1].value);
  for (double v : rep.u_star) {
    CHECK(v >= config.u_lo);
    CHECK(v <= config.u_hi);
  }
  CHECK(rep.j_star == objective(rep.forward, rep.u_star, config));

  OptimizeOptions capped;
  capped.max_iterations = 2;
  const auto short_run = optimize(config, std::vector<double>(40, 0.0), capped);
  CHECK_FALSE(short_run.converged);
  CHECK(short_run.iterations == 2);
}

TEST_CASE("optimiser projects the starting point") {
  const auto config = make_config(builtin_scheme("GSA342"), ProblemKind::tracking, 0.0, 10, 10, 1.0, 0.001);
  OptimizeOptions once;
  once.max_iterations = 0;
  const auto rep = optimize(config, std::vector<double>(10, 5.0), once);
  for (double v : rep.u_star) CHECK(v == 1.0);
}

TEST_CASE("tracking benchmark value at eps = 0") {
  BenchmarkSpec spec;
  const auto config = benchmark_config(builtin_scheme("GSA342"), 0.0, spec);
  const auto rep = optimize(config, std::vector<double>(config.n_steps, 0.0));
  CHECK(rep.converged);
  CHECK_THAT(rep.j_star, WithinRel(6.51e-4, 0.10));
}
