#pragma once

#include "gtap/tridiagonal.hpp"

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace gtap {

/// Cell values on the grid; size always equals Grid1D::cells.
using Field = std::vector<double>;

/// Cell-centred uniform grid on [0, 1]: x_i = (i + 1/2) dx, i = 0..cells-1.
struct Grid1D {
  int cells = 0;
  double dx = 0.0;

  Grid1D() = default;
  explicit Grid1D(int cells);

  [[nodiscard]] double center(int i) const { return (i + 0.5) * dx; }
  [[nodiscard]] std::vector<double> centers() const;
  [[nodiscard]] Field zeros() const { return Field(static_cast<std::size_t>(cells), 0.0); }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

enum class Side { left, right };

/// Boundary relations in terms of the discrete trace (mean of last interior
/// and ghost cell) and one-sided derivative (ghost - last)/dx, oriented
/// along +x.
enum class ClosureKind {
  zero_flux,  // j = 0
  inflow,     // j - rho = -u
  neumann,    // rho_x = 0
  robin,      // rho_x + rho = u
  diffusive,  // j = -rho_x
};

struct BoundaryClosure {
  Side side = Side::left;
  ClosureKind kind = ClosureKind::zero_flux;
};

using ClosureSet = std::vector<BoundaryClosure>;

/// Kinetic plus diffusive closures of the relaxation system (eps > 0).
ClosureSet kinetic_closures();
/// Neumann / Robin closures of the heat-equation limit (eps = 0).
ClosureSet limit_closures();

/// Ghost cells of one side as affine functions of the adjacent interior
/// values and the control:
///   rho_g = rho_rho * rho_last + rho_j * j_last + rho_u * u
///   j_g   = j_rho   * rho_last + j_j   * j_last + j_u   * u
struct SideGhostMap {
  double rho_rho = 0.0, rho_j = 0.0, rho_u = 0.0;
  double j_rho = 0.0, j_j = 0.0, j_u = 0.0;
};

struct GhostMap {
  SideGhostMap left;
  SideGhostMap right;
};

struct Ghosts {
  double rho_left = 0.0;
  double rho_right = 0.0;
  double j_left = 0.0;
  double j_right = 0.0;
};

/// Resolves a closure set into the affine ghost map. Each side needs exactly
/// two independent relations; anything else throws std::invalid_argument.
GhostMap ghost_map(const Grid1D& grid, const ClosureSet& closures);

Ghosts ghost_values(const GhostMap& map, std::span<const double> rho, std::span<const double> j,
                    double u);
Ghosts ghost_values(const Grid1D& grid, std::span<const double> rho, std::span<const double> j,
                    const ClosureSet& closures, double u);

/// Cotangent of (rho, j, u); the adjoint of an affine map accumulates here.
struct Cotangent {
  Field rho;
  Field j;
  double u = 0.0;

  explicit Cotangent(const Grid1D& grid) : rho(grid.zeros()), j(grid.zeros()) {}
  void clear();
};

/// Transpose of ghost_values: scatters ghost cotangents into `out`.
void ghost_values_transpose(const GhostMap& map, const Ghosts& ghost_bar, int cells, Cotangent& out);

/// (f_{i+1} - f_{i-1}) / (2 dx) with the given ghost cells. Needs cells >= 3.
Field d_central(const Grid1D& grid, std::span<const double> f, double ghost_left, double ghost_right);
/// (f_{i+1} - 2 f_i + f_{i-1}) / dx^2 with the given ghost cells.
Field d_second(const Grid1D& grid, std::span<const double> f, double ghost_left, double ghost_right);

/// Blending weight between central and upwind-corrected stencils.
/// Returns the tabulated override for (scheme, eps) if one matches exactly,
/// 1 - eps^3 otherwise.
double phi_policy(double eps, std::string_view scheme);

/// Central / upwind blended spatial operators of the relaxation system with
/// the ghost closures folded in. Everything is affine in (rho, j, u); the
/// *_transpose members are the exact adjoints of the linear part and
/// accumulate into a Cotangent.
///
///   rho-flux  D rho = D^c rho - (1 - phi) (eps dx / 2) D^2 j
///   j-flux    D j   = D^c j   - (1 - phi) (dx / (2 eps)) D^2 rho
///   diffusion D^2 rho
///
/// When 1 - phi == 0 the upwind corrections are skipped outright, so eps = 0
/// is admissible only with phi = 1.
class SpatialOperator {
 public:
  SpatialOperator(const Grid1D& grid, const GhostMap& map, double eps, double phi);

  [[nodiscard]] const Grid1D& grid() const { return grid_; }
  [[nodiscard]] const GhostMap& ghosts() const { return map_; }
  [[nodiscard]] double eps() const { return eps_; }
  [[nodiscard]] double phi() const { return phi_; }
  [[nodiscard]] bool upwind_active() const { return upwind_; }

  void flux_rho(std::span<const double> rho, std::span<const double> j, double u,
                std::span<double> out) const;
  void flux_j(std::span<const double> rho, std::span<const double> j, double u,
              std::span<double> out) const;
  void diffusion(std::span<const double> rho, std::span<const double> j, double u,
                 std::span<double> out) const;

  void flux_rho_transpose(std::span<const double> w, Cotangent& out) const;
  void flux_j_transpose(std::span<const double> w, Cotangent& out) const;
  void diffusion_transpose(std::span<const double> w, Cotangent& out) const;

  /// Linear part of diffusion acting on rho alone (ghosts folded in).
  [[nodiscard]] Tridiagonal diffusion_matrix() const;
  /// Linear part of flux_rho acting on j alone; zero when upwinding is off.
  [[nodiscard]] Tridiagonal flux_rho_j_matrix() const;

  /// (D rho, D j) of the blended scheme.
  [[nodiscard]] std::pair<Field, Field> blended_gradient(std::span<const double> rho,
                                                         std::span<const double> j, double u) const;

 private:
  Grid1D grid_;
  GhostMap map_;
  double eps_;
  double phi_;
  bool upwind_;
  double w_rho_ = 0.0;  // (1 - phi) eps dx / 2
  double w_j_ = 0.0;    // (1 - phi) dx / (2 eps)
};

}  // namespace gtap
