#pragma once

#include <span>
#include <vector>

namespace gtap {

/// Tridiagonal matrix in three diagonals; lower[0] and upper[n-1] are unused.
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

  [[nodiscard]] std::size_t size() const { return diag.size(); }
  [[nodiscard]] Tridiagonal transposed() const;

  /// y = T x
  void multiply(std::span<const double> x, std::span<double> y) const;
};

/// Thomas elimination without pivoting. Throws std::runtime_error on a zero
/// pivot; the operators assembled in this library are diagonally dominant.
void solve_tridiagonal(const Tridiagonal& t, std::span<const double> rhs, std::span<double> x);

/// Solves T^T x = rhs.
void solve_tridiagonal_transposed(const Tridiagonal& t, std::span<const double> rhs,
                                  std::span<double> x);

}  // namespace gtap
