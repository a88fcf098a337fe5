#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "canardkit/multipoly.hpp"
#include "canardkit/rational.hpp"

namespace canardkit {

/// Dense univariate polynomial over the rationals, coefficients low to high.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coefficients);

  /// Converts a MultiPoly that involves at most the variable `var`.
  static UniPoly from_multi(const MultiPoly& p, std::size_t var);
  MultiPoly to_multi(const VarList& vars, std::size_t var) const;

  /// Degree, -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }
  const Rational& leading() const { return coeffs_.back(); }

  Rational eval(const Rational& x) const;
  double eval(double x) const;
  int sign_at(const Rational& x) const { return eval(x).sign(); }

  UniPoly derivative() const;
  UniPoly monic() const;
  /// Integer-coefficient primitive multiple (positive leading coefficient).
  UniPoly primitive_integer() const;

  friend UniPoly operator+(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator-(const UniPoly& a, const UniPoly& b);
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
  friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.coeffs_ == b.coeffs_; }

  std::string to_string(const std::string& var = "t") const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// Quotient and remainder of Euclidean division; `b` must be nonzero.
std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b);
/// Monic greatest common divisor (zero when both inputs are zero).
UniPoly gcd(const UniPoly& a, const UniPoly& b);
/// p / gcd(p, p'), monic.
UniPoly squarefree_part(const UniPoly& p);

/// Sturm sequence of a square-free polynomial.
std::vector<UniPoly> sturm_sequence(const UniPoly& p);
/// Number of distinct real roots in (a, b] via sign variations.
int sturm_count(const std::vector<UniPoly>& sequence, const Rational& a, const Rational& b);

/// An isolating interval for one real root. When `exact` holds, lo == hi is the root.
struct RootInterval {
  Rational lo;
  Rational hi;
  bool exact = false;

  Rational midpoint() const { return (lo + hi) / Rational(2); }
  double approx() const { return midpoint().to_double(); }
};

/// All distinct real roots of `p` in the closed interval [lo, hi], each isolated
/// to width below `width`. Rational roots are always detected and returned exactly.
std::vector<RootInterval> isolate_real_roots(const UniPoly& p, const Rational& lo, const Rational& hi,
                                             const Rational& width);

/// Every distinct real root of `p`, with an automatically chosen bounding interval.
std::vector<RootInterval> isolate_real_roots(const UniPoly& p, const Rational& width);

/// All distinct rational roots of `p`, ascending.
std::vector<Rational> rational_roots(const UniPoly& p);

}  // namespace canardkit
