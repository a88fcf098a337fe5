#pragma once

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "canardkit/rational.hpp"

namespace canardkit {

/// Ordered list of variable symbols shared (cheaply) between polynomials.
/// The declaration order fixes the term order: earlier variables are larger.
class VarList {
 public:
  VarList();
  VarList(std::initializer_list<std::string> names);
  explicit VarList(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_->size(); }
  bool empty() const noexcept { return names_->empty(); }
  const std::string& operator[](std::size_t i) const { return (*names_)[i]; }
  const std::vector<std::string>& names() const noexcept { return *names_; }
  auto begin() const noexcept { return names_->begin(); }
  auto end() const noexcept { return names_->end(); }

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Index of `name`; throws AlgebraError when absent.
  std::size_t require(std::string_view name) const;

  friend bool operator==(const VarList& a, const VarList& b) {
    return a.names_ == b.names_ || *a.names_ == *b.names_;
  }

 private:
  std::shared_ptr<const std::vector<std::string>> names_;
};

/// The planar-system variables {x, y, eps}.
const VarList& default_vars();

using Exponents = std::vector<unsigned>;

/// Graded lexicographic order: total degree first, then lexicographic with
/// the first declared variable largest.
bool grlex_less(const Exponents& a, const Exponents& b);

struct GrlexDescending {
  bool operator()(const Exponents& a, const Exponents& b) const { return grlex_less(b, a); }
};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in descending graded-lex order with no zero coefficients,
/// so two polynomials over the same variables are equal iff their term maps are.
class MultiPoly {
 public:
  using TermMap = std::map<Exponents, Rational, GrlexDescending>;

  explicit MultiPoly(VarList vars = VarList());

  static MultiPoly constant(VarList vars, const Rational& value);
  static MultiPoly variable(VarList vars, std::string_view name);
  static MultiPoly monomial(VarList vars, Exponents exponents, const Rational& coefficient);

  const VarList& vars() const noexcept { return vars_; }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept;
  /// Value of a constant polynomial, nullopt otherwise.
  std::optional<Rational> constant_value() const;
  Rational coefficient(const Exponents& exponents) const;

  /// Total degree; zero for the zero polynomial.
  unsigned total_degree() const noexcept;
  unsigned degree_in(std::size_t var) const noexcept;
  bool involves(std::size_t var) const noexcept;

  /// Leading term under graded-lex. Precondition: nonzero.
  const Exponents& leading_exponents() const;
  const Rational& leading_coefficient() const;
  /// Scaled so the leading coefficient is 1 (zero stays zero).
  MultiPoly monic() const;

  /// Accumulates `coefficient * x^exponents` into this polynomial.
  void add_term(const Exponents& exponents, const Rational& coefficient);

  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& other);
  MultiPoly& operator-=(const MultiPoly& other);
  MultiPoly& operator*=(const MultiPoly& other);
  MultiPoly& operator*=(const Rational& scalar);

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(MultiPoly a, const Rational& s) { return a *= s; }
  friend MultiPoly operator*(const Rational& s, MultiPoly a) { return a *= s; }

  MultiPoly pow(unsigned exponent) const;

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

  /// Exact evaluation; `point` is aligned with vars().
  Rational eval(std::span<const Rational> point) const;
  /// Floating evaluation; `point` is aligned with vars().
  double eval(std::span<const double> point) const;

  /// Re-expresses the polynomial over `target`. Every variable that occurs
  /// with a nonzero exponent must exist in `target`.
  MultiPoly with_vars(const VarList& target) const;

  /// Canonical text, e.g. "x^2 - 5/4*x*y + 1/2". Parses back to the same polynomial.
  std::string to_string() const;

 private:
  void require_same_vars(const MultiPoly& other) const;

  VarList vars_;
  TermMap terms_;
};

/// A polynomial vector field; all components share one variable list.
struct PolyVectorField {
  std::vector<MultiPoly> components;

  PolyVectorField() = default;
  explicit PolyVectorField(std::vector<MultiPoly> comps);

  std::size_t size() const noexcept { return components.size(); }
  const MultiPoly& operator[](std::size_t i) const { return components[i]; }
  const VarList& vars() const;
  bool is_zero() const;
};

/// Sentinel valuation of the zero polynomial.
inline constexpr unsigned kInfiniteValuation = std::numeric_limits<unsigned>::max();

MultiPoly differentiate(const MultiPoly& p, std::string_view var);
MultiPoly differentiate(const MultiPoly& p, std::size_t var);

/// Composition p(bindings), expanded over `target`. A variable with no binding
/// is kept as itself when `target` declares the same symbol.
MultiPoly substitute(const MultiPoly& p, const std::map<std::string, MultiPoly>& bindings,
                     const VarList& target);

/// Largest k with var^k dividing p; kInfiniteValuation for zero.
unsigned r_valuation(const MultiPoly& p, std::string_view var);
/// p / var^k. Throws AlgebraError when the division is not exact.
MultiPoly divide_by_power(const MultiPoly& p, std::string_view var, unsigned k);

/// Exact quotient p / d, or nullopt when d does not divide p.
std::optional<MultiPoly> exact_divide(const MultiPoly& p, const MultiPoly& d);

Rational eval_poly(const MultiPoly& p, const std::map<std::string, Rational>& point);
double eval_poly(const MultiPoly& p, const std::map<std::string, double>& point);

}  // namespace canardkit
