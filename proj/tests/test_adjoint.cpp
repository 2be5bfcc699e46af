#include "gtap/adjoint.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace gtap;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> random_vector(std::mt19937& gen, std::size_t n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

double max_diff(std::span<const double> a, const oracle::Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b(static_cast<Eigen::Index>(i))));
  return m;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

ButcherTableau tableau(std::vector<std::vector<double>> A, std::vector<double> b) {
  ButcherTableau t{std::move(A), std::move(b), {}};
  for (const auto& row : t.A) {
    double c = 0.0;
    for (double v : row) c += v;
    t.c.push_back(c);
  }
  return t;
}

// Checks one backward step against the transpose of the dense step matrix.
// The pairing weights rho by dx and j by dx eps^2, so
//   p_n          = S_rr^T p + eps^2 S_jr^T q
//   eps^2 q_n    = S_rj^T p + eps^2 S_jj^T q
//   u_bar        = S_ru^T p + eps^2 S_ju^T q
void check_against_transpose(const ProblemConfig& config, std::mt19937& gen, LimitForm form = LimitForm::transformed) {
  const int m = config.grid.cells;
  const StepOperators ops(config);
  const auto S = oracle::step_matrix(config, ops.mu().mu);
  const double e2 = config.eps * config.eps;
  const auto p = random_vector(gen, m), q = random_vector(gen, m);
  const oracle::Vec P = oracle::to_vec(p), Q = oracle::to_vec(q);

  const auto r = ops.limit() ? adjoint_step_limit(ops, p, form) : adjoint_step(ops, p, q);
  const auto rr = S.block(0, 0, m, m), rj = S.block(0, m, m, m), ru = S.block(0, 2 * m, m, 1);
  const auto jr = S.block(m, 0, m, m), jj = S.block(m, m, m, m), ju = S.block(m, 2 * m, m, 1);
  if (ops.limit()) {
    CHECK(max_diff(r.p, rr.transpose() * P) < 1e-11);
    CHECK_THAT(r.u_bar, WithinAbs((ru.transpose() * P)(0), 1e-10));
    CHECK(max_abs(r.q) == 0.0);
  } else {
    CHECK(max_diff(r.p, rr.transpose() * P + e2 * jr.transpose() * Q) < 1e-10);
    oracle::Vec scaled_q = oracle::to_vec(r.q) * e2;
    CHECK(max_diff(oracle::to_std(scaled_q), rj.transpose() * P + e2 * jj.transpose() * Q) < 1e-10);
    CHECK_THAT(r.u_bar, WithinAbs((ru.transpose() * P + e2 * ju.transpose() * Q)(0), 1e-9));
  }
}

}  // namespace

TEST_CASE("terminal condition") {
  const Field rho{1.0, 2.0, 3.0};
  auto [p, q] = terminal_condition(rho, rho);
  CHECK(max_abs(p) == 0.0);
  CHECK(max_abs(q) == 0.0);
  std::tie(p, q) = terminal_condition(rho, Field(3, 0.0));
  CHECK(p == rho);
  CHECK_THROWS(terminal_condition(rho, Field(2, 0.0)));
}

TEST_CASE("homogeneous backward step") {
  const auto config = make_config(builtin_scheme("GSA342"), ProblemKind::manufactured, 0.5, 10, 8, 1.0);
  const Field zero(8, 0.0);
  const auto r = adjoint_step(zero, zero, config, relaxation_for(config));
  CHECK(max_abs(r.p) == 0.0);
  CHECK(max_abs(r.q) == 0.0);
  CHECK(r.u_bar == 0.0);
  auto limit = config;
  limit.eps = 0.0;
  for (auto form : {LimitForm::lemma, LimitForm::transformed}) {
    const auto l = adjoint_step_limit(zero, limit, form);
    CHECK(max_abs(l.p) == 0.0);
  }
}

TEST_CASE("single-stage Euler pair on three cells is the dense transpose") {
  std::mt19937 gen(21);
  const auto euler = make_pair("euler", tableau({{0.0}}, {1.0}), tableau({{1.0}}, {1.0}));
  for (double eps : {0.0, 0.3, 1.0}) {
    auto config = make_config(euler, ProblemKind::manufactured, eps, 4, 3, 1.0);
    config.phi = eps == 0.0 ? 1.0 : 0.5;
    INFO("eps=" << eps);
    check_against_transpose(config, gen);
  }
}

TEST_CASE("registry schemes: backward step is the dense transpose") {
  std::mt19937 gen(22);
  for (const char* name : {"GSA342", "SSP2332"}) {
    for (double eps : {0.0, 0.1, 0.5, 1.0}) {
      const auto config = make_config(builtin_scheme(name), ProblemKind::tracking, eps, 10, 7, 1.0);
      INFO(name << " eps=" << eps);
      check_against_transpose(config, gen);
      if (eps == 0.0) check_against_transpose(config, gen, LimitForm::lemma);
    }
  }
}

TEST_CASE("limit forms agree step by step") {
  std::mt19937 gen(23);
  for (const char* name : {"GSA342", "SSP2332"}) {
    const auto config = make_config(builtin_scheme(name), ProblemKind::manufactured, 0.0, 10, 10, 1.0);
    const StepOperators ops(config);
    const auto p = random_vector(gen, 10);
    const auto a = adjoint_step_limit(ops, p, LimitForm::lemma);
    const auto b = adjoint_step_limit(ops, p, LimitForm::transformed);
    for (int i = 0; i < 10; ++i) CHECK_THAT(a.p[i], WithinAbs(b.p[i], 1e-12));
    CHECK_THAT(a.u_bar, WithinAbs(b.u_bar, 1e-12));
    REQUIRE(a.stages.Qbar.size() == b.stages.Qbar.size());
    for (std::size_t l = 0; l < a.stages.Qbar.size(); ++l)
      for (int i = 0; i < 10; ++i) CHECK_THAT(a.stages.Qbar[l][i], WithinAbs(b.stages.Qbar[l][i], 1e-12));
    // the lemma form also exposes Q with Qbar = dt A^T Q
    REQUIRE(a.stages.Q.size() == a.stages.Qbar.size());
    const auto& im = config.scheme.implicit_part;
    const int s = config.scheme.stages();
    for (int l = 0; l < s; ++l)
      for (int i = 0; i < 10; ++i) {
        double v = 0.0;
        for (int k = 0; k < s; ++k) v += config.dt() * im.a(k, l) * a.stages.Q[k][i];
        CHECK_THAT(a.stages.Qbar[l][i], WithinAbs(v, 1e-12));
      }
  }
}

TEST_CASE("lemma form needs an ISA pair") {
  const auto pair = make_pair("non-isa", tableau({{0.0, 0.0}, {1.0, 0.0}}, {0.5, 0.5}),
                              tableau({{1.0, 0.0}, {-0.5, 0.5}}, {0.5, 0.5}));
  REQUIRE(classify(pair).type_a);
  REQUIRE_FALSE(classify(pair).isa);
  const auto config = make_config(pair, ProblemKind::manufactured, 0.0, 5, 6, 1.0);
  const Field p(6, 1.0);
  CHECK_THROWS_WITH(adjoint_step_limit(p, config, LimitForm::lemma), ContainsSubstring("ISA"));
  CHECK_NOTHROW(adjoint_step_limit(p, config, LimitForm::transformed));
}

TEST_CASE("GSA342 has no explicit weight defect") {
  for (double v : explicit_weight_defect(builtin_scheme("GSA342"))) CHECK(v == 0.0);
}

TEST_CASE("backward solve: zero mismatch and linearity") {
  std::mt19937 gen(24);
  for (double eps : {0.0, 0.5}) {
    const auto config = make_config(builtin_scheme("SSP2332"), ProblemKind::manufactured, eps, 8, 9, 1.0);
    const auto rho_d = random_vector(gen, 9);
    const auto zero = solve_adjoint(config, rho_d, rho_d);
    for (const auto& p : zero.p) CHECK(max_abs(p) == 0.0);
    for (double v : zero.control_sensitivity) CHECK(v == 0.0);

    const auto rho_T = random_vector(gen, 9);
    Field twice(9);
    for (int i = 0; i < 9; ++i) twice[i] = 2.0 * rho_T[i];
    const auto a = solve_adjoint(config, rho_T, Field(9, 0.0));
    const auto b = solve_adjoint(config, twice, Field(9, 0.0));
    REQUIRE(a.steps() == 8);
    for (int n = 0; n <= 8; ++n)
      for (int i = 0; i < 9; ++i) {
        CHECK_THAT(b.p[n][i], WithinAbs(2.0 * a.p[n][i], 1e-12));
        CHECK_THAT(b.q[n][i], WithinAbs(2.0 * a.q[n][i], 1e-10));
      }
    CHECK(a.p.back() == rho_T);
    CHECK(max_abs(a.q.back()) == 0.0);
  }
}

TEST_CASE("backward solve carries the forward run id") {
  const auto config = make_config(builtin_scheme("GSA342"), ProblemKind::tracking, 0.5, 6, 8, 1.0);
  const std::vector<double> u(6, 0.2);
  const auto fwd = solve_forward(config, u);
  const auto adj = solve_adjoint(config, fwd);
  CHECK(adj.source_run_id == fwd.run_id);
  auto short_config = config;
  short_config.n_steps = 5;
  CHECK_THROWS(solve_adjoint(short_config, fwd));
}
