#include "gtap/tridiagonal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gtap {

Tridiagonal Tridiagonal::transposed() const {
  const auto n = size();
  Tridiagonal t(n);
  t.diag = diag;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.upper[i] = lower[i + 1];
    t.lower[i + 1] = upper[i];
  }
  return t;
}

void Tridiagonal::multiply(std::span<const double> x, std::span<double> y) const {
  const auto n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += lower[i] * x[i - 1];
    if (i + 1 < n) v += upper[i] * x[i + 1];
    y[i] = v;
  }
}

void solve_tridiagonal(const Tridiagonal& t, std::span<const double> rhs, std::span<double> x) {
  const auto n = t.size();
  if (rhs.size() != n || x.size() != n) throw std::invalid_argument("tridiagonal solve: size mismatch");
  if (n == 0) return;

  std::vector<double> c_prime(n);
  double pivot = t.diag[0];
  if (pivot == 0.0 || !std::isfinite(pivot)) throw std::runtime_error("tridiagonal solve: zero pivot in row 1");
  c_prime[0] = t.upper[0] / pivot;
  x[0] = rhs[0] / pivot;

  // Forward sweep
  for (std::size_t i = 1; i < n; ++i) {
    pivot = t.diag[i] - t.lower[i] * c_prime[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot))
      throw std::runtime_error("tridiagonal solve: zero pivot in row " + std::to_string(i + 1));
    c_prime[i] = t.upper[i] / pivot;
    x[i] = (rhs[i] - t.lower[i] * x[i - 1]) / pivot;
  }

  // Back substitution
  for (std::size_t i = n - 1; i > 0; --i) x[i - 1] -= c_prime[i - 1] * x[i];
}

void solve_tridiagonal_transposed(const Tridiagonal& t, std::span<const double> rhs,
                                  std::span<double> x) {
  solve_tridiagonal(t.transposed(), rhs, x);
}

}  // namespace gtap
