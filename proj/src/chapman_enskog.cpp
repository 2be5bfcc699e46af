#include "gtap/forward.hpp"
#include "gtap/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gtap {

std::vector<double> verify_chapman_enskog(const IMEXPair& pair, const ProblemConfig& config,
                                          const std::vector<double>& eps_list, double u0) {
  constexpr int kSkip = 2;
  if (config.grid.cells <= 2 * kSkip) throw std::invalid_argument("verify_chapman_enskog: grid too small");
  std::vector<double> residuals;
  residuals.reserve(eps_list.size());
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw std::invalid_argument("verify_chapman_enskog: eps must be positive");
    ProblemConfig c = config;
    c.scheme = pair;
    c.eps = eps;
    c.relaxation = RelaxationPolicy::optimal;
    const StepOperators ops(c, optimal_relaxation(pair, eps, c.dt()));
    StageRecord st;
    Field rho, j;
    ops.step(c.rho0, c.j0, u0, rho, j, &st);

    Field d(rho.size());
    double worst = 0.0;
    for (int l = 0; l < ops.stages(); ++l) {
      ops.op().flux_rho(st.R[l], st.J[l], u0, d);
      for (int i = kSkip; i < c.grid.cells - kSkip; ++i)
        worst = std::max(worst, std::abs(st.J[l][i] + ops.mu()[l] * d[i]));
    }
    residuals.push_back(worst);
  }
  return residuals;
}

}  // namespace gtap
