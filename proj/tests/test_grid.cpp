#include "gtap/grid.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace gtap;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Field random_field(std::mt19937& gen, int m) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Field f(static_cast<std::size_t>(m));
  for (auto& v : f) v = d(gen);
  return f;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_diff(std::span<const double> a, const oracle::Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b(static_cast<Eigen::Index>(i))));
  return m;
}

SpatialOperator make_op(int cells, double eps, double phi) {
  const Grid1D g(cells);
  return SpatialOperator(g, ghost_map(g, eps == 0.0 ? limit_closures() : kinetic_closures()), eps, phi);
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid1D g(50);
  CHECK(g.dx * g.cells == 1.0);
  CHECK(g.center(0) == g.dx / 2);
  CHECK_THAT(g.center(49), WithinAbs(1.0 - g.dx / 2, 1e-15));
  CHECK(g.centers().size() == 50);
  CHECK_THROWS(Grid1D(0));
}

TEST_CASE("phi policy") {
  CHECK(phi_policy(0.0, "GSA342") == 1.0);
  CHECK(phi_policy(0.0, "SSP2332") == 1.0);
  CHECK(phi_policy(1.0, "GSA342") == 0.3);
  CHECK(phi_policy(0.5, "SSP2332") == 0.385);
  CHECK_THAT(phi_policy(0.8, "GSA342"), WithinAbs(0.488, 1e-15));
  CHECK_THAT(phi_policy(0.5, "GSA342"), WithinAbs(0.875, 1e-15));
  CHECK(phi_policy(1.0, "SSP2332") == 0.0);
}

TEST_CASE("ghost cells: limit closures") {
  const Grid1D g(8);
  // symmetric about x = 0 means rho_x(0) = 0: the ghost mirrors the first cell
  Field rho(8), j(8, 0.0);
  for (int i = 0; i < 8; ++i) rho[i] = std::cos(g.center(i));
  const auto gh = ghost_values(g, rho, j, limit_closures(), 0.0);
  CHECK_THAT(gh.rho_left, WithinAbs(rho[0], 1e-15));

  // constant state: (ghost - c)/dx + (ghost + c)/2 = u
  const double c = 0.7, u = 0.3;
  const Field flat(8, c);
  const auto gc = ghost_values(g, flat, j, limit_closures(), u);
  CHECK_THAT((gc.rho_right - c) / g.dx + (gc.rho_right + c) / 2, WithinAbs(u, 1e-14));
}

TEST_CASE("ghost cells: kinetic closures") {
  std::mt19937 gen(1);
  const Grid1D g(6);
  const auto rho = random_field(gen, 6), j = random_field(gen, 6);
  const auto gh = ghost_values(g, rho, j, kinetic_closures(), 0.4);
  CHECK_THAT(gh.j_left, WithinAbs(-j[0], 1e-15));
  // inflow relation at the right end
  CHECK_THAT((gh.j_right + j[5]) / 2 - (gh.rho_right + rho[5]) / 2, WithinAbs(-0.4, 1e-14));
}

TEST_CASE("ghost map agrees with the independent 2x2 solve") {
  std::mt19937 gen(2);
  for (const auto& closures : {kinetic_closures(), limit_closures()}) {
    for (int m : {3, 7, 40}) {
      const Grid1D g(m);
      const auto rho = random_field(gen, m), j = random_field(gen, m);
      const double u = 0.37;
      const auto gh = ghost_values(g, rho, j, closures, u);
      const auto ref = oracle::ghosts(g.dx, oracle::to_vec(rho), oracle::to_vec(j), u);
      CHECK_THAT(gh.rho_left, WithinAbs(ref[0], 1e-12));
      CHECK_THAT(gh.j_left, WithinAbs(ref[1], 1e-12));
      CHECK_THAT(gh.rho_right, WithinAbs(ref[2], 1e-12));
      CHECK_THAT(gh.j_right, WithinAbs(ref[3], 1e-12));
    }
  }
}

TEST_CASE("inconsistent closure sets are rejected") {
  const Grid1D g(5);
  CHECK_THROWS_WITH(ghost_map(g, {{Side::left, ClosureKind::zero_flux}, {Side::left, ClosureKind::zero_flux},
                                  {Side::right, ClosureKind::inflow}, {Side::right, ClosureKind::diffusive}}),
                    ContainsSubstring("conflicting"));
  CHECK_THROWS_WITH(ghost_map(g, {{Side::left, ClosureKind::zero_flux},
                                  {Side::right, ClosureKind::inflow}, {Side::right, ClosureKind::diffusive}}),
                    ContainsSubstring("exactly two"));
  CHECK_THROWS_WITH(ghost_map(g, {{Side::left, ClosureKind::robin}, {Side::left, ClosureKind::diffusive},
                                  {Side::right, ClosureKind::inflow}, {Side::right, ClosureKind::diffusive}}),
                    ContainsSubstring("right boundary only"));
}

TEST_CASE("central and second differences are exact on polynomials") {
  const Grid1D g(12);
  Field lin(12), quad(12);
  for (int i = 0; i < 12; ++i) {
    const double x = g.center(i);
    lin[i] = 3.0 * x - 1.0;
    quad[i] = 2.0 * x * x - x + 0.5;
  }
  const auto d1 = d_central(g, lin, 0.0, 0.0);
  const auto d2 = d_second(g, quad, 0.0, 0.0);
  for (int i = 1; i < 11; ++i) {
    CHECK_THAT(d1[i], WithinAbs(3.0, 1e-12));
    CHECK_THAT(d2[i], WithinAbs(4.0, 1e-9));
  }
  CHECK_THROWS(d_central(Grid1D(2), Field(2, 0.0), 0.0, 0.0));
}

TEST_CASE("stencils annihilate constants with consistent ghosts") {
  const double c = 1.3;
  for (double eps : {0.0, 0.1, 0.5, 1.0}) {
    for (double phi : {1.0, 0.5, 0.0}) {
      if (eps == 0.0 && phi != 1.0) continue;
      const auto op = make_op(9, eps, phi);
      const Field rho(9, c), j(9, 0.0);
      Field out(9);
      op.flux_rho(rho, j, c, out);
      for (double v : out) CHECK_THAT(v, WithinAbs(0.0, 1e-12));
      op.flux_j(rho, j, c, out);
      for (double v : out) CHECK_THAT(v, WithinAbs(0.0, 1e-12));
      op.diffusion(rho, j, c, out);
      for (double v : out) CHECK_THAT(v, WithinAbs(0.0, 1e-10));
    }
  }
}

TEST_CASE("phi = 1 gives the central stencils") {
  std::mt19937 gen(4);
  const auto op = make_op(10, 0.5, 1.0);
  CHECK_FALSE(op.upwind_active());
  const auto rho = random_field(gen, 10), j = random_field(gen, 10);
  const auto gh = ghost_values(op.ghosts(), rho, j, 0.2);
  const auto [dr, dj] = op.blended_gradient(rho, j, 0.2);
  const auto cr = d_central(op.grid(), rho, gh.rho_left, gh.rho_right);
  const auto cj = d_central(op.grid(), j, gh.j_left, gh.j_right);
  for (int i = 0; i < 10; ++i) {
    CHECK(dr[i] == cr[i]);
    CHECK(dj[i] == cj[i]);
  }
}

TEST_CASE("phi = 0, eps = 1 is upwinding of the two velocity densities") {
  std::mt19937 gen(5);
  const int m = 10;
  const auto op = make_op(m, 1.0, 0.0);
  const auto rho = random_field(gen, m), j = random_field(gen, m);
  const auto [dr, dj] = op.blended_gradient(rho, j, 0.0);
  const double dx = op.grid().dx;
  auto fp = [&](int i) { return 0.5 * (rho[i] + j[i]); };
  auto fm = [&](int i) { return 0.5 * (rho[i] - j[i]); };
  for (int i = 1; i < m - 1; ++i) {
    const double up = (fp(i) - fp(i - 1)) / dx;    // f+ moves right
    const double down = (fm(i + 1) - fm(i)) / dx;  // f- moves left
    CHECK_THAT(dr[i], WithinAbs(up + down, 1e-12));
    CHECK_THAT(dj[i], WithinAbs(up - down, 1e-12));
  }
}

TEST_CASE("blended operators agree with the dense oracle") {
  std::mt19937 gen(6);
  for (double eps : {0.0, 0.05, 0.5, 1.0}) {
    for (double phi : {1.0, 0.7, 0.3, 0.0}) {
      if (eps == 0.0 && phi != 1.0) continue;
      const int m = 11;
      const auto op = make_op(m, eps, phi);
      const oracle::Stencils st{op.grid().dx, eps, phi};
      const auto rho = random_field(gen, m), j = random_field(gen, m);
      const double u = -0.6;
      const auto R = oracle::to_vec(rho), J = oracle::to_vec(j);
      Field out(m);
      op.flux_rho(rho, j, u, out);
      CHECK(max_diff(out, st.flux_rho(R, J, u)) < 1e-11);
      op.flux_j(rho, j, u, out);
      CHECK(max_diff(out, st.flux_j(R, J, u)) < 1e-9);
      op.diffusion(rho, j, u, out);
      CHECK(max_diff(out, st.diffusion(R, J, u)) < 1e-9);
    }
  }
}

TEST_CASE("eps = 0 with phi < 1 is rejected") {
  CHECK_THROWS_AS(make_op(5, 0.0, 0.5), std::domain_error);
}

TEST_CASE("operators are affine in u and their transposes are exact") {
  std::mt19937 gen(7);
  for (double eps : {0.0, 0.3, 1.0}) {
    const double phi = eps == 0.0 ? 1.0 : 0.4;
    const int m = 9;
    const auto op = make_op(m, eps, phi);
    const auto rho = random_field(gen, m), j = random_field(gen, m), w = random_field(gen, m);
    const double u = 0.8;
    const Field zero(m, 0.0);

    using Apply = void (SpatialOperator::*)(std::span<const double>, std::span<const double>, double,
                                            std::span<double>) const;
    using Transpose = void (SpatialOperator::*)(std::span<const double>, Cotangent&) const;
    const std::pair<Apply, Transpose> pairs[] = {
        {&SpatialOperator::flux_rho, &SpatialOperator::flux_rho_transpose},
        {&SpatialOperator::flux_j, &SpatialOperator::flux_j_transpose},
        {&SpatialOperator::diffusion, &SpatialOperator::diffusion_transpose}};
    for (const auto& [apply, transpose] : pairs) {
      Field full(m), lin(m), aff(m);
      (op.*apply)(rho, j, u, full);
      (op.*apply)(rho, j, 0.0, lin);
      (op.*apply)(zero, zero, u, aff);
      for (int i = 0; i < m; ++i) CHECK_THAT(full[i], WithinAbs(lin[i] + aff[i], 1e-10));

      Cotangent ct(op.grid());
      (op.*transpose)(w, ct);
      // <w, A (rho, j, u)> = <A^T w, (rho, j, u)>
      const double lhs = dot(w, full);
      const double rhs = dot(ct.rho, rho) + dot(ct.j, j) + ct.u * u;
      CHECK_THAT(lhs, WithinRel(rhs, 1e-12));
    }
  }
}

TEST_CASE("assembled matrices reproduce the operators") {
  std::mt19937 gen(8);
  const int m = 8;
  const auto op = make_op(m, 0.6, 0.2);
  const auto rho = random_field(gen, m), j = random_field(gen, m);
  const Field zero(m, 0.0);
  Field a(m), b(m);
  op.diffusion(rho, zero, 0.0, a);
  op.diffusion_matrix().multiply(rho, b);
  for (int i = 0; i < m; ++i) CHECK_THAT(a[i], WithinAbs(b[i], 1e-10));
  op.flux_rho(zero, j, 0.0, a);
  op.flux_rho_j_matrix().multiply(j, b);
  for (int i = 0; i < m; ++i) CHECK_THAT(a[i], WithinAbs(b[i], 1e-10));
}

TEST_CASE("tridiagonal solves match a dense solve") {
  std::mt19937 gen(9);
  const int n = 12;
  Tridiagonal t(n);
  oracle::Mat dense = oracle::Mat::Zero(n, n);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    t.diag[i] = 4.0 + d(gen);
    if (i > 0) t.lower[i] = d(gen);
    if (i < n - 1) t.upper[i] = d(gen);
    dense(i, i) = t.diag[i];
    if (i > 0) dense(i, i - 1) = t.lower[i];
    if (i < n - 1) dense(i, i + 1) = t.upper[i];
  }
  const auto rhs = random_field(gen, n);
  Field x(n), xt(n);
  solve_tridiagonal(t, rhs, x);
  solve_tridiagonal_transposed(t, rhs, xt);
  const oracle::Vec b = oracle::to_vec(rhs);
  CHECK(max_diff(x, dense.lu().solve(b)) < 1e-13);
  CHECK(max_diff(xt, dense.transpose().lu().solve(b)) < 1e-13);

  Tridiagonal singular(3);
  Field y(3);
  CHECK_THROWS_AS(solve_tridiagonal(singular, Field(3, 1.0), y), std::runtime_error);
}
