#pragma once

#include <boost/rational.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gtap {

using Rational = boost::rational<long long>;

/// Butcher tableau of one half of an IMEX pair, stored in floating point.
struct ButcherTableau {
  std::vector<std::vector<double>> A;  // s x s, row-major
  std::vector<double> b;
  std::vector<double> c;

  [[nodiscard]] int stages() const { return static_cast<int>(b.size()); }
  [[nodiscard]] double a(int row, int col) const { return A[row][col]; }
};

/// Exact counterpart used by the registry. Converted to ButcherTableau once.
struct RationalTableau {
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  std::vector<Rational> c;

  [[nodiscard]] ButcherTableau to_double() const;
};

/// Explicit/implicit tableau pair sharing the stage count.
///
/// The explicit tableau is strictly lower triangular, the implicit one lower
/// triangular (DIRK). `exact` is present for registry schemes and for
/// user-supplied pairs written entirely in rationals.
struct IMEXPair {
  std::string name;
  ButcherTableau explicit_part;
  ButcherTableau implicit_part;
  std::optional<std::pair<RationalTableau, RationalTableau>> exact;

  [[nodiscard]] int stages() const { return implicit_part.stages(); }
};

struct SchemeClassification {
  bool type_a = false;
  bool isa = false;
  bool gsa = false;
  bool order_two = false;
};

/// Componentwise tolerance used by classify on floating-point pairs.
inline constexpr double kClassifyTolerance = 1e-12;
/// Tolerance of the second-order condition check.
inline constexpr double kOrderTolerance = 1e-14;

/// Throws std::out_of_range listing the known names. Lookup is
/// case-insensitive and ignores punctuation, so "ssp2(3,3,2)" resolves too.
IMEXPair builtin_scheme(std::string_view name);

std::vector<std::string> builtin_scheme_names();

/// Builds a pair from explicit data and runs the invariant checks.
/// Throws std::invalid_argument naming the violated invariant.
IMEXPair make_pair(std::string name, ButcherTableau explicit_part, ButcherTableau implicit_part);
IMEXPair make_pair(std::string name, const RationalTableau& explicit_part,
                   const RationalTableau& implicit_part);

/// Throws std::invalid_argument if the pair is not a valid IMEX DIRK pair.
void validate(const IMEXPair& pair);

SchemeClassification classify(const IMEXPair& pair);
bool check_order2(const IMEXPair& pair);

/// Exact variants on rational data.
bool row_sums_consistent(const RationalTableau& t, bool explicit_part);
SchemeClassification classify_exact(const RationalTableau& explicit_part,
                                    const RationalTableau& implicit_part);

/// b~ - A~^T e_s: the explicit weight defect that vanishes for GSA pairs.
std::vector<double> explicit_weight_defect(const IMEXPair& pair);
std::vector<Rational> explicit_weight_defect(const RationalTableau& explicit_part);

/// Parses "1/6", "-3/4", "0.25" or "2". Decimal strings yield std::nullopt
/// from parse_rational, and a value from parse_coefficient.
std::optional<Rational> parse_rational(std::string_view text);
double parse_coefficient(std::string_view text);

}  // namespace gtap
