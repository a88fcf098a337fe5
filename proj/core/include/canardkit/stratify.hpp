#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "canardkit/algebra.hpp"
#include "canardkit/compiled_poly.hpp"
#include "canardkit/geometry.hpp"
#include "canardkit/multipoly.hpp"

namespace canardkit {

/// One irreducible component V(F_i) of the critical set.
struct Branch {
  int id = 0;
  MultiPoly defining_poly;  ///< over {x, y, eps}
  std::array<MultiPoly, 2> gradient;  ///< (dF/dx, dF/dy)
  /// False when the factorizer could not prove irreducibility.
  bool proven_irreducible = true;

  Branch() = default;
  Branch(int id, MultiPoly f, bool irreducible = true);

  Rational eval(const Rational& x, const Rational& y) const;
  double eval(double x, double y) const;
  std::array<Rational, 2> grad(const Rational& x, const Rational& y) const;
  Vec2 grad(double x, double y) const;
  /// Rotated gradient (-F_y, F_x).
  std::array<Rational, 2> tangent(const Rational& x, const Rational& y) const;
  Vec2 tangent(double x, double y) const;

 private:
  CompiledPoly f_;
  CompiledPoly fx_;
  CompiledPoly fy_;
};

struct CriticalSet {
  /// X0 after the odd-power rescaling (identical to the input when nothing was rescaled).
  PolyVectorField x0;
  std::vector<Branch> branches;
  MultiPoly common_poly;                   ///< F
  std::array<MultiPoly, 2> fast_cofactor;  ///< (A^, B^) with X0 = F * (A^, B^)
  bool standard_form = false;
  /// True when F is non-constant, i.e. X0 + eps X1 is a singular perturbation.
  bool singular = false;
  bool rescaled = false;
  std::vector<std::string> warnings;

  const Branch& branch(int id) const;
};

/// Splits X0 = (A, B) into common factor and cofactor. Throws AssumptionViolation
/// for X0 = (0, 0) and for common factors of even multiplicity.
CriticalSet build_critical_set(const PolyVectorField& x0);

/// F / prod F_i^(mult - 1). Throws AssumptionViolation naming any factor of even multiplicity.
MultiPoly odd_power_rescale(const MultiPoly& f, const Factorization& factors);

struct SingularPoint {
  PlanePoint location;
  std::vector<int> incident_branches;  ///< ascending
  bool pairwise_transversal = true;
  /// Gradient determinants det(grad F_i, grad F_j) for i < j in incident order.
  std::vector<double> determinants;
};

/// Pairwise branch intersections inside `box`. Throws AlgebraError if two
/// branches share a component.
std::vector<SingularPoint> find_singular_points(const CriticalSet& cs, const Box& box);

/// Points on one half-branch leaving a singular point, walking the coordinate
/// in which the tangent at p_s is larger. side = +1 follows the tangent.
class HalfBranch {
 public:
  HalfBranch(const Branch& branch, const PlanePoint& origin, int side, const Box& box);

  int side() const noexcept { return side_; }
  const Branch& branch() const noexcept { return *branch_; }
  /// Extent of the walking parameter before leaving the box.
  double length() const noexcept { return length_; }
  /// Point at parameter s in (0, length()]; exact whenever s is rational and the
  /// other coordinate turns out rational. nullopt if the branch leaves the box
  /// or stops being a graph before s.
  std::optional<PlanePoint> point_at(const Rational& s) const;
  std::optional<Vec2> point_at(double s) const;
  /// n evenly spaced samples s = length * k / n, k = 1..n, inside the box.
  std::vector<PlanePoint> samples(int n) const;

 private:
  double solve_other(double c, double guess) const;

  const Branch* branch_;
  PlanePoint origin_;
  int side_;
  Box box_;
  std::size_t walk_ = 0;  ///< 0: walk x, 1: walk y
  double direction_ = 1.0;
  double slope_ = 0.0;    ///< d(other)/d(walk) at the origin
  double length_ = 0.0;
};

struct Stratum {
  int id = 0;
  int dimension = 1;
  int branch = 0;  ///< branch id for 1-strata, 0 for the point stratum
  /// -1 / +1 for half-branches; 0 for the point stratum and for full branches.
  int side = 0;
  bool contains_point = false;  ///< the 1-stratum passes through p_s
  std::vector<int> closure_links;  ///< ids of 0-strata in the closure
  bool rank_maximal = true;        ///< rank DX0 = 1 at every sampled point
};

struct Stratification {
  enum class Kind { whitney, relaxed };
  Kind kind = Kind::whitney;
  std::vector<Stratum> strata;
  std::optional<SingularPoint> point;

  std::size_t count(int dimension) const;
};

const char* to_string(Stratification::Kind kind);

/// 2N half-branch strata plus {p_s}. Throws AssumptionViolation if p is not
/// pairwise transversal.
Stratification whitney_stratify(const CriticalSet& cs, const SingularPoint& p, const Box& box = Box{});
/// Stratification of a critical set without singular points: one stratum per branch.
Stratification whitney_stratify(const CriticalSet& cs);

/// One relaxed stratification per incident branch; identity when there is no point stratum.
std::vector<Stratification> relaxed_stratifications(const Stratification& ws);

}  // namespace canardkit
