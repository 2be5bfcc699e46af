#pragma once

#include "gtap/config.hpp"
#include "gtap/tableau.hpp"

#include <vector>

namespace gtap {

/// Stage weights mu_l splitting the diffusion between the explicit and the
/// implicit part of the scheme. Each weight lies in [0, 1].
struct RelaxationDiag {
  std::vector<double> mu;

  [[nodiscard]] int stages() const { return static_cast<int>(mu.size()); }
  [[nodiscard]] double operator[](int l) const { return mu[l]; }
};

/// mu_l = dt a_ll / (eps^2 + dt a_ll). Cancels the explicit flux J + mu dR
/// up to O(eps^2) stage by stage. Requires a type-A pair.
RelaxationDiag optimal_relaxation(const IMEXPair& pair, double eps, double dt);

/// exp(-eps / dx)
double mu_exponential(double eps, double dx);

/// Relaxation weights selected by config.relaxation.
RelaxationDiag relaxation_for(const ProblemConfig& config);

/// Runs one forward step from the config's initial data (control u0) per eps
/// with the optimal weights and returns max_l |J_l + mu_l D rho(R_l)|_inf over
/// the cells at least two away from either boundary.
std::vector<double> verify_chapman_enskog(const IMEXPair& pair, const ProblemConfig& config,
                                          const std::vector<double>& eps_list, double u0 = 0.0);

/// log2(r_{k-1} / r_k); the first entry has no predecessor and is NaN.
std::vector<double> observed_rates(const std::vector<double>& values);

}  // namespace gtap
