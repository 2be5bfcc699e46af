#include "gtap/relaxation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gtap {

RelaxationDiag optimal_relaxation(const IMEXPair& pair, double eps, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("optimal_relaxation: dt must be positive");
  if (!(eps >= 0.0)) throw std::invalid_argument("optimal_relaxation: eps must be non-negative");
  const int s = pair.stages();
  RelaxationDiag diag;
  diag.mu.resize(static_cast<std::size_t>(s));
  const double eps2 = eps * eps;
  for (int l = 0; l < s; ++l) {
    const double a = pair.implicit_part.a(l, l);
    if (!(a > 0.0))
      throw std::invalid_argument("optimal_relaxation: scheme " + pair.name + " is not type A (a_" +
                                  std::to_string(l + 1) + std::to_string(l + 1) + " = " + std::to_string(a) + ")");
    diag.mu[l] = dt * a / (eps2 + dt * a);
  }
  return diag;
}

double mu_exponential(double eps, double dx) {
  if (!(dx > 0.0)) throw std::invalid_argument("mu_exponential: dx must be positive");
  return std::exp(-eps / dx);
}

RelaxationDiag relaxation_for(const ProblemConfig& config) {
  if (config.relaxation == RelaxationPolicy::optimal)
    return optimal_relaxation(config.scheme, config.eps, config.dt());
  RelaxationDiag diag;
  diag.mu.assign(static_cast<std::size_t>(config.scheme.stages()), mu_exponential(config.eps, config.grid.dx));
  return diag;
}

std::vector<double> observed_rates(const std::vector<double>& values) {
  std::vector<double> rates(values.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 1; k < values.size(); ++k) rates[k] = std::log2(values[k - 1] / values[k]);
  return rates;
}

}  // namespace gtap
