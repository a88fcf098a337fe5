#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "canardkit/multipoly.hpp"

namespace canardkit {

/// Greatest common divisor over Q[vars], monic under graded-lex.
/// Throws AlgebraError when both inputs are zero.
MultiPoly gcd_poly(const MultiPoly& p, const MultiPoly& q);

/// Content of `p` seen as a polynomial in variable `var` (monic).
MultiPoly content_in(const MultiPoly& p, std::size_t var);

struct Factor {
  MultiPoly poly;           ///< monic under graded-lex
  unsigned multiplicity = 1;
  /// False when the factor is square-free but may still be reducible: it has
  /// degree >= 4 with no linear factor, or involves three or more variables.
  bool irreducible = true;
};

struct Factorization {
  Rational unit{1};
  std::vector<Factor> factors;

  /// unit * prod factor^multiplicity.
  MultiPoly expand(const VarList& vars) const;
  bool fully_split() const;
};

/// Square-free decomposition, with each square-free part further split into
/// irreducible rational factors where those have total degree <= 2 (or the
/// remaining cofactor is provably irreducible). Factors are pairwise coprime
/// and sorted by multiplicity, then by graded-lex leading term. Throws on zero.
Factorization squarefree_factor(const MultiPoly& p);

/// Square-free decomposition only (Yun), without the irreducible splitting.
Factorization squarefree_decompose(const MultiPoly& p);

/// Resultant of p and q with respect to `var`, via a fraction-free Sylvester determinant.
MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, std::string_view var);

}  // namespace canardkit
