#include "gtap/grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gtap {

namespace {

// a_rho * rho_g + a_j * j_g = c_rho * rho_last + c_j * j_last + c_u * u
struct Relation {
  double a_rho, a_j, c_rho, c_j, c_u;
};

Relation relation_for(ClosureKind kind, Side side, double dx) {
  const double sigma = side == Side::right ? 1.0 : -1.0;
  switch (kind) {
    case ClosureKind::zero_flux:
      return {0.0, 0.5, 0.0, -0.5, 0.0};
    case ClosureKind::inflow:
      return {-0.5, 0.5, 0.5, -0.5, -1.0};
    case ClosureKind::neumann:
      return {sigma / dx, 0.0, sigma / dx, 0.0, 0.0};
    case ClosureKind::robin:
      return {sigma / dx + 0.5, 0.0, sigma / dx - 0.5, 0.0, 1.0};
    case ClosureKind::diffusive:
      return {sigma / dx, 0.5, sigma / dx, -0.5, 0.0};
  }
  throw std::logic_error("unhandled closure kind");
}

const char* side_name(Side side) { return side == Side::left ? "left" : "right"; }

SideGhostMap resolve_side(const Grid1D& grid, const ClosureSet& closures, Side side) {
  std::vector<Relation> rel;
  for (const auto& c : closures) {
    if (c.side != side) continue;
    if (side == Side::left && (c.kind == ClosureKind::inflow || c.kind == ClosureKind::robin))
      throw std::invalid_argument("closure set: the control acts on the right boundary only");
    rel.push_back(relation_for(c.kind, side, grid.dx));
  }
  if (rel.size() != 2)
    throw std::invalid_argument(std::string("closure set: ") + side_name(side) + " boundary needs exactly two relations, got " +
                                std::to_string(rel.size()));

  const double det = rel[0].a_rho * rel[1].a_j - rel[0].a_j * rel[1].a_rho;
  const double scale = std::max({std::abs(rel[0].a_rho), std::abs(rel[0].a_j), std::abs(rel[1].a_rho),
                                 std::abs(rel[1].a_j)});
  if (std::abs(det) <= 1e-12 * scale * scale)
    throw std::invalid_argument(std::string("closure set: conflicting relations on the ") + side_name(side) +
                                " boundary");

  // Cramer's rule per right-hand-side basis vector.
  auto solve = [&](double r0, double r1) {
    const double g_rho = (r0 * rel[1].a_j - rel[0].a_j * r1) / det;
    const double g_j = (rel[0].a_rho * r1 - r0 * rel[1].a_rho) / det;
    return std::pair{g_rho, g_j};
  };
  SideGhostMap m;
  auto [rr, jr] = solve(rel[0].c_rho, rel[1].c_rho);
  auto [rj, jj] = solve(rel[0].c_j, rel[1].c_j);
  auto [ru, ju] = solve(rel[0].c_u, rel[1].c_u);
  m.rho_rho = rr;
  m.rho_j = rj;
  m.rho_u = ru;
  m.j_rho = jr;
  m.j_j = jj;
  m.j_u = ju;
  return m;
}

void require_cells(const Grid1D& grid) {
  if (grid.cells < 3) throw std::invalid_argument("grid too small: stencils need at least 3 cells");
}

std::string normalize(std::string_view name) {
  std::string key;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch)))
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return key;
}

}  // namespace

Grid1D::Grid1D(int cells) : cells(cells), dx(cells > 0 ? 1.0 / cells : 0.0) {
  if (cells < 1) throw std::invalid_argument("grid needs at least one cell");
}

std::vector<double> Grid1D::centers() const {
  std::vector<double> x(static_cast<std::size_t>(cells));
  for (int i = 0; i < cells; ++i) x[i] = center(i);
  return x;
}

ClosureSet kinetic_closures() {
  return {{Side::left, ClosureKind::zero_flux},
          {Side::left, ClosureKind::diffusive},
          {Side::right, ClosureKind::inflow},
          {Side::right, ClosureKind::diffusive}};
}

ClosureSet limit_closures() {
  return {{Side::left, ClosureKind::neumann},
          {Side::left, ClosureKind::diffusive},
          {Side::right, ClosureKind::robin},
          {Side::right, ClosureKind::diffusive}};
}

GhostMap ghost_map(const Grid1D& grid, const ClosureSet& closures) {
  return {resolve_side(grid, closures, Side::left), resolve_side(grid, closures, Side::right)};
}

Ghosts ghost_values(const GhostMap& map, std::span<const double> rho, std::span<const double> j,
                    double u) {
  const auto m = rho.size();
  const double r0 = rho[0], j0 = j[0];
  const double rm = rho[m - 1], jm = j[m - 1];
  Ghosts g;
  g.rho_left = map.left.rho_rho * r0 + map.left.rho_j * j0 + map.left.rho_u * u;
  g.j_left = map.left.j_rho * r0 + map.left.j_j * j0 + map.left.j_u * u;
  g.rho_right = map.right.rho_rho * rm + map.right.rho_j * jm + map.right.rho_u * u;
  g.j_right = map.right.j_rho * rm + map.right.j_j * jm + map.right.j_u * u;
  return g;
}

Ghosts ghost_values(const Grid1D& grid, std::span<const double> rho, std::span<const double> j,
                    const ClosureSet& closures, double u) {
  if (rho.size() != static_cast<std::size_t>(grid.cells) || j.size() != rho.size())
    throw std::invalid_argument("ghost_values: field size does not match the grid");
  return ghost_values(ghost_map(grid, closures), rho, j, u);
}

void Cotangent::clear() {
  std::fill(rho.begin(), rho.end(), 0.0);
  std::fill(j.begin(), j.end(), 0.0);
  u = 0.0;
}

void ghost_values_transpose(const GhostMap& map, const Ghosts& gb, int cells, Cotangent& out) {
  const auto last = static_cast<std::size_t>(cells - 1);
  out.rho[0] += map.left.rho_rho * gb.rho_left + map.left.j_rho * gb.j_left;
  out.j[0] += map.left.rho_j * gb.rho_left + map.left.j_j * gb.j_left;
  out.u += map.left.rho_u * gb.rho_left + map.left.j_u * gb.j_left;
  out.rho[last] += map.right.rho_rho * gb.rho_right + map.right.j_rho * gb.j_right;
  out.j[last] += map.right.rho_j * gb.rho_right + map.right.j_j * gb.j_right;
  out.u += map.right.rho_u * gb.rho_right + map.right.j_u * gb.j_right;
}

Field d_central(const Grid1D& grid, std::span<const double> f, double gl, double gr) {
  require_cells(grid);
  const int m = grid.cells;
  Field out(static_cast<std::size_t>(m));
  const double h = 0.5 / grid.dx;
  for (int i = 0; i < m; ++i) {
    const double fl = i == 0 ? gl : f[i - 1];
    const double fr = i == m - 1 ? gr : f[i + 1];
    out[i] = (fr - fl) * h;
  }
  return out;
}

Field d_second(const Grid1D& grid, std::span<const double> f, double gl, double gr) {
  require_cells(grid);
  const int m = grid.cells;
  Field out(static_cast<std::size_t>(m));
  const double h = 1.0 / (grid.dx * grid.dx);
  for (int i = 0; i < m; ++i) {
    const double fl = i == 0 ? gl : f[i - 1];
    const double fr = i == m - 1 ? gr : f[i + 1];
    out[i] = (fr - 2.0 * f[i] + fl) * h;
  }
  return out;
}

double phi_policy(double eps, std::string_view scheme) {
  const auto key = normalize(scheme);
  if (key == "gsa342" && eps == 1.0) return 0.3;
  if (key == "ssp2332" && eps == 0.5) return 0.385;
  return std::clamp(1.0 - eps * eps * eps, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

SpatialOperator::SpatialOperator(const Grid1D& grid, const GhostMap& map, double eps, double phi)
    : grid_(grid), map_(map), eps_(eps), phi_(phi) {
  require_cells(grid);
  if (phi < 0.0 || phi > 1.0) throw std::invalid_argument("phi must lie in [0, 1]");
  if (eps < 0.0) throw std::invalid_argument("eps must be non-negative");
  if (map.left.rho_j != 0.0 || map.right.rho_j != 0.0)
    throw std::invalid_argument("closure set: rho ghosts must not depend on j");
  upwind_ = (1.0 - phi) != 0.0;
  if (upwind_) {
    if (eps == 0.0)
      throw std::domain_error("blended stencil: eps = 0 requires phi = 1 (upwind weight dx/(2 eps) is singular)");
    w_rho_ = (1.0 - phi) * eps * grid.dx / 2.0;
    w_j_ = (1.0 - phi) * grid.dx / (2.0 * eps);
  }
}

void SpatialOperator::flux_rho(std::span<const double> rho, std::span<const double> j, double u,
                               std::span<double> out) const {
  const int m = grid_.cells;
  const auto g = ghost_values(map_, rho, j, u);
  const double hc = 0.5 / grid_.dx;
  const double h2 = w_rho_ / (grid_.dx * grid_.dx);
  for (int i = 0; i < m; ++i) {
    const double rl = i == 0 ? g.rho_left : rho[i - 1];
    const double rr = i == m - 1 ? g.rho_right : rho[i + 1];
    double v = (rr - rl) * hc;
    if (upwind_) {
      const double jl = i == 0 ? g.j_left : j[i - 1];
      const double jr = i == m - 1 ? g.j_right : j[i + 1];
      v -= (jr - 2.0 * j[i] + jl) * h2;
    }
    out[i] = v;
  }
}

void SpatialOperator::flux_j(std::span<const double> rho, std::span<const double> j, double u,
                             std::span<double> out) const {
  const int m = grid_.cells;
  const auto g = ghost_values(map_, rho, j, u);
  const double hc = 0.5 / grid_.dx;
  const double h2 = w_j_ / (grid_.dx * grid_.dx);
  for (int i = 0; i < m; ++i) {
    const double jl = i == 0 ? g.j_left : j[i - 1];
    const double jr = i == m - 1 ? g.j_right : j[i + 1];
    double v = (jr - jl) * hc;
    if (upwind_) {
      const double rl = i == 0 ? g.rho_left : rho[i - 1];
      const double rr = i == m - 1 ? g.rho_right : rho[i + 1];
      v -= (rr - 2.0 * rho[i] + rl) * h2;
    }
    out[i] = v;
  }
}

void SpatialOperator::diffusion(std::span<const double> rho, std::span<const double> j, double u,
                                std::span<double> out) const {
  const int m = grid_.cells;
  const auto g = ghost_values(map_, rho, j, u);
  const double h2 = 1.0 / (grid_.dx * grid_.dx);
  for (int i = 0; i < m; ++i) {
    const double rl = i == 0 ? g.rho_left : rho[i - 1];
    const double rr = i == m - 1 ? g.rho_right : rho[i + 1];
    out[i] = (rr - 2.0 * rho[i] + rl) * h2;
  }
}

// The transposes scatter each output row back onto its stencil entries; an
// entry that falls on a ghost cell is collected in Ghosts and pushed through
// ghost_values_transpose.

void SpatialOperator::flux_rho_transpose(std::span<const double> w, Cotangent& out) const {
  const int m = grid_.cells;
  const double hc = 0.5 / grid_.dx;
  const double h2 = w_rho_ / (grid_.dx * grid_.dx);
  Ghosts gb;
  for (int i = 0; i < m; ++i) {
    const double a = w[i] * hc;
    if (i == m - 1) gb.rho_right += a; else out.rho[i + 1] += a;
    if (i == 0) gb.rho_left -= a; else out.rho[i - 1] -= a;
    if (upwind_) {
      const double b = w[i] * h2;
      if (i == m - 1) gb.j_right -= b; else out.j[i + 1] -= b;
      if (i == 0) gb.j_left -= b; else out.j[i - 1] -= b;
      out.j[i] += 2.0 * b;
    }
  }
  ghost_values_transpose(map_, gb, m, out);
}

void SpatialOperator::flux_j_transpose(std::span<const double> w, Cotangent& out) const {
  const int m = grid_.cells;
  const double hc = 0.5 / grid_.dx;
  const double h2 = w_j_ / (grid_.dx * grid_.dx);
  Ghosts gb;
  for (int i = 0; i < m; ++i) {
    const double a = w[i] * hc;
    if (i == m - 1) gb.j_right += a; else out.j[i + 1] += a;
    if (i == 0) gb.j_left -= a; else out.j[i - 1] -= a;
    if (upwind_) {
      const double b = w[i] * h2;
      if (i == m - 1) gb.rho_right -= b; else out.rho[i + 1] -= b;
      if (i == 0) gb.rho_left -= b; else out.rho[i - 1] -= b;
      out.rho[i] += 2.0 * b;
    }
  }
  ghost_values_transpose(map_, gb, m, out);
}

void SpatialOperator::diffusion_transpose(std::span<const double> w, Cotangent& out) const {
  const int m = grid_.cells;
  const double h2 = 1.0 / (grid_.dx * grid_.dx);
  Ghosts gb;
  for (int i = 0; i < m; ++i) {
    const double b = w[i] * h2;
    if (i == m - 1) gb.rho_right += b; else out.rho[i + 1] += b;
    if (i == 0) gb.rho_left += b; else out.rho[i - 1] += b;
    out.rho[i] -= 2.0 * b;
  }
  ghost_values_transpose(map_, gb, m, out);
}

Tridiagonal SpatialOperator::diffusion_matrix() const {
  const int m = grid_.cells;
  const double h2 = 1.0 / (grid_.dx * grid_.dx);
  Tridiagonal t(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    t.diag[i] = -2.0 * h2;
    if (i > 0) t.lower[i] = h2;
    if (i < m - 1) t.upper[i] = h2;
  }
  t.diag[0] += map_.left.rho_rho * h2;
  t.diag[m - 1] += map_.right.rho_rho * h2;
  return t;
}

Tridiagonal SpatialOperator::flux_rho_j_matrix() const {
  const int m = grid_.cells;
  Tridiagonal t(static_cast<std::size_t>(m));
  if (!upwind_) return t;
  const double h2 = w_rho_ / (grid_.dx * grid_.dx);
  for (int i = 0; i < m; ++i) {
    t.diag[i] = 2.0 * h2;
    if (i > 0) t.lower[i] = -h2;
    if (i < m - 1) t.upper[i] = -h2;
  }
  t.diag[0] -= map_.left.j_j * h2;
  t.diag[m - 1] -= map_.right.j_j * h2;
  return t;
}

std::pair<Field, Field> SpatialOperator::blended_gradient(std::span<const double> rho,
                                                          std::span<const double> j, double u) const {
  Field d_rho = grid_.zeros();
  Field d_j = grid_.zeros();
  flux_rho(rho, j, u, d_rho);
  flux_j(rho, j, u, d_j);
  return {std::move(d_rho), std::move(d_j)};
}

}  // namespace gtap
