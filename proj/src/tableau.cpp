#include "gtap/tableau.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gtap {

namespace {

Rational q(long long num, long long den = 1) { return Rational(num, den); }

RationalTableau gsa342_explicit() {
  return {{{q(0), q(0), q(0), q(0)},
           {q(3, 2), q(0), q(0), q(0)},
           {q(5, 6), q(-1, 3), q(0), q(0)},
           {q(1, 3), q(1, 6), q(1, 2), q(0)}},
          {q(1, 3), q(1, 6), q(1, 2), q(0)},
          {q(0), q(3, 2), q(1, 2), q(1)}};
}

RationalTableau gsa342_implicit() {
  return {{{q(1, 2), q(0), q(0), q(0)},
           {q(3, 4), q(1, 2), q(0), q(0)},
           {q(-1, 4), q(0), q(1, 2), q(0)},
           {q(1, 6), q(-1, 6), q(1, 2), q(1, 2)}},
          {q(1, 6), q(-1, 6), q(1, 2), q(1, 2)},
          {q(1, 2), q(5, 4), q(1, 4), q(1)}};
}

RationalTableau ssp2332_explicit() {
  return {{{q(0), q(0), q(0)}, {q(1, 2), q(0), q(0)}, {q(1, 2), q(1, 2), q(0)}},
          {q(1, 3), q(1, 3), q(1, 3)},
          {q(0), q(1, 2), q(1)}};
}

RationalTableau ssp2332_implicit() {
  return {{{q(1, 4), q(0), q(0)}, {q(0), q(1, 4), q(0)}, {q(1, 3), q(1, 3), q(1, 3)}},
          {q(1, 3), q(1, 3), q(1, 3)},
          {q(1, 4), q(1, 4), q(1)}};
}

struct RegistryEntry {
  const char* name;
  const char* key;
  RationalTableau (*explicit_part)();
  RationalTableau (*implicit_part)();
};

constexpr RegistryEntry kRegistry[] = {
    {"GSA342", "gsa342", &gsa342_explicit, &gsa342_implicit},
    {"SSP2332", "ssp2332", &ssp2332_explicit, &ssp2332_implicit},
};

std::string normalize_name(std::string_view name) {
  std::string key;
  for (char ch : name) {
    if (std::isalnum(static_cast<unsigned char>(ch)))
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return key;
}

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

bool close(double x, double y) { return std::abs(x - y) <= kClassifyTolerance; }

void check_shape(const ButcherTableau& t, const std::string& which) {
  const auto s = t.b.size();
  if (s == 0) throw std::invalid_argument(which + " tableau has no stages");
  if (t.c.size() != s || t.A.size() != s)
    throw std::invalid_argument(which + " tableau: A, b and c must all have " + std::to_string(s) +
                                " entries");
  for (const auto& row : t.A) {
    if (row.size() != s) throw std::invalid_argument(which + " tableau: A must be square");
  }
}

}  // namespace

ButcherTableau RationalTableau::to_double() const {
  ButcherTableau t;
  t.A.resize(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) {
    t.A[i].reserve(A[i].size());
    for (const auto& v : A[i]) t.A[i].push_back(gtap::to_double(v));
  }
  for (const auto& v : b) t.b.push_back(gtap::to_double(v));
  for (const auto& v : c) t.c.push_back(gtap::to_double(v));
  return t;
}

std::vector<std::string> builtin_scheme_names() {
  std::vector<std::string> names;
  for (const auto& e : kRegistry) names.emplace_back(e.name);
  return names;
}

IMEXPair builtin_scheme(std::string_view name) {
  const auto key = normalize_name(name);
  for (const auto& e : kRegistry) {
    if (key == e.key) return make_pair(e.name, e.explicit_part(), e.implicit_part());
  }
  std::ostringstream msg;
  msg << "unknown IMEX scheme '" << name << "'; available:";
  for (const auto& e : kRegistry) msg << ' ' << e.name;
  throw std::out_of_range(msg.str());
}

void validate(const IMEXPair& pair) {
  const auto& ex = pair.explicit_part;
  const auto& im = pair.implicit_part;
  check_shape(ex, "explicit");
  check_shape(im, "implicit");
  if (ex.stages() != im.stages())
    throw std::invalid_argument("explicit and implicit tableaux differ in stage count");

  const int s = im.stages();
  for (int i = 0; i < s; ++i) {
    double ex_sum = 0.0;
    double im_sum = 0.0;
    for (int j = 0; j < s; ++j) {
      if (j >= i && ex.a(i, j) != 0.0)
        throw std::invalid_argument("explicit tableau must be strictly lower triangular (entry " +
                                    std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      if (j > i && im.a(i, j) != 0.0)
        throw std::invalid_argument("implicit tableau must be lower triangular (entry " +
                                    std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
      ex_sum += ex.a(i, j);
      im_sum += im.a(i, j);
    }
    if (!close(ex_sum, ex.c[i]))
      throw std::invalid_argument("explicit c_" + std::to_string(i + 1) + " is not the row sum of A~");
    if (!close(im_sum, im.c[i]))
      throw std::invalid_argument("implicit c_" + std::to_string(i + 1) + " is not the row sum of A");
  }
  double ex_b = 0.0;
  double im_b = 0.0;
  for (int i = 0; i < s; ++i) {
    ex_b += ex.b[i];
    im_b += im.b[i];
  }
  if (!close(ex_b, 1.0)) throw std::invalid_argument("explicit weights do not sum to one");
  if (!close(im_b, 1.0)) throw std::invalid_argument("implicit weights do not sum to one");
}

IMEXPair make_pair(std::string name, ButcherTableau explicit_part, ButcherTableau implicit_part) {
  IMEXPair pair{std::move(name), std::move(explicit_part), std::move(implicit_part), std::nullopt};
  validate(pair);
  return pair;
}

IMEXPair make_pair(std::string name, const RationalTableau& explicit_part,
                   const RationalTableau& implicit_part) {
  if (!row_sums_consistent(explicit_part, true) || !row_sums_consistent(implicit_part, false))
    throw std::invalid_argument("scheme " + name + ": abscissae are not exact row sums");
  IMEXPair pair{std::move(name), explicit_part.to_double(), implicit_part.to_double(),
                std::make_pair(explicit_part, implicit_part)};
  validate(pair);
  return pair;
}

bool row_sums_consistent(const RationalTableau& t, bool explicit_part) {
  const auto s = t.b.size();
  if (t.A.size() != s || t.c.size() != s) return false;
  for (std::size_t i = 0; i < s; ++i) {
    Rational sum = 0;
    const std::size_t last = explicit_part ? i : i + 1;
    for (std::size_t j = 0; j < s; ++j) {
      if (j >= last) {
        if (t.A[i][j] != Rational(0)) return false;
        continue;
      }
      sum += t.A[i][j];
    }
    if (sum != t.c[i]) return false;
  }
  return true;
}

SchemeClassification classify(const IMEXPair& pair) {
  const auto& ex = pair.explicit_part;
  const auto& im = pair.implicit_part;
  const int s = im.stages();
  const int last = s - 1;

  SchemeClassification cls;
  cls.type_a = true;
  for (int l = 0; l < s; ++l) {
    if (std::abs(im.a(l, l)) <= kClassifyTolerance) cls.type_a = false;
  }

  bool implicit_sa = close(im.c[last], 1.0);
  bool explicit_sa = close(ex.c[last], 1.0);
  for (int j = 0; j < s; ++j) {
    implicit_sa = implicit_sa && close(im.b[j], im.a(last, j));
    explicit_sa = explicit_sa && close(ex.b[j], ex.a(last, j));
  }
  cls.isa = implicit_sa;
  cls.gsa = implicit_sa && explicit_sa;
  cls.order_two = check_order2(pair);
  return cls;
}

SchemeClassification classify_exact(const RationalTableau& ex, const RationalTableau& im) {
  const auto s = im.b.size();
  const auto last = s - 1;
  SchemeClassification cls;
  cls.type_a = true;
  for (std::size_t l = 0; l < s; ++l) {
    if (im.A[l][l] == Rational(0)) cls.type_a = false;
  }
  bool implicit_sa = im.c[last] == Rational(1);
  bool explicit_sa = ex.c[last] == Rational(1);
  for (std::size_t j = 0; j < s; ++j) {
    implicit_sa = implicit_sa && im.b[j] == im.A[last][j];
    explicit_sa = explicit_sa && ex.b[j] == ex.A[last][j];
  }
  cls.isa = implicit_sa;
  cls.gsa = implicit_sa && explicit_sa;

  auto order2 = [](const RationalTableau& t) {
    Rational sum_b = 0;
    Rational sum_bc = 0;
    for (std::size_t i = 0; i < t.b.size(); ++i) {
      sum_b += t.b[i];
      sum_bc += t.b[i] * t.c[i];
    }
    return sum_b == Rational(1) && sum_bc == Rational(1, 2);
  };
  cls.order_two = order2(ex) && order2(im);
  return cls;
}

bool check_order2(const IMEXPair& pair) {
  auto satisfies = [](const ButcherTableau& t) {
    double sum_b = 0.0;
    double sum_bc = 0.0;
    for (int i = 0; i < t.stages(); ++i) {
      sum_b += t.b[i];
      sum_bc += t.b[i] * t.c[i];
    }
    return std::abs(sum_b - 1.0) <= kOrderTolerance && std::abs(sum_bc - 0.5) <= kOrderTolerance;
  };
  return satisfies(pair.explicit_part) && satisfies(pair.implicit_part);
}

std::vector<double> explicit_weight_defect(const IMEXPair& pair) {
  const auto& ex = pair.explicit_part;
  const int s = ex.stages();
  std::vector<double> d(s);
  for (int k = 0; k < s; ++k) d[k] = ex.b[k] - ex.a(s - 1, k);
  return d;
}

std::vector<Rational> explicit_weight_defect(const RationalTableau& ex) {
  const auto s = ex.b.size();
  std::vector<Rational> d(s);
  for (std::size_t k = 0; k < s; ++k) d[k] = ex.b[k] - ex.A[s - 1][k];
  return d;
}

std::optional<Rational> parse_rational(std::string_view text) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return v;
  };
  text = trim(text);
  auto parse_int = [](std::string_view v, long long& out) {
    if (!v.empty() && v.front() == '+') v.remove_prefix(1);
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    return ec == std::errc() && ptr == end && !v.empty();
  };
  long long num = 0;
  long long den = 1;
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (!parse_int(text, num)) return std::nullopt;
  } else {
    if (!parse_int(trim(text.substr(0, slash)), num) || !parse_int(trim(text.substr(slash + 1)), den))
      return std::nullopt;
    if (den == 0) throw std::invalid_argument("zero denominator in coefficient '" + std::string(text) + "'");
  }
  return Rational(num, den);
}

double parse_coefficient(std::string_view text) {
  if (auto r = parse_rational(text)) return to_double(*r);
  std::string s(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse coefficient '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size()) throw std::invalid_argument("cannot parse coefficient '" + s + "'");
  return value;
}

}  // namespace gtap
