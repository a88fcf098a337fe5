#pragma once

#include <array>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "canardkit/compiled_poly.hpp"
#include "canardkit/error.hpp"
#include "canardkit/multipoly.hpp"
#include "canardkit/stratify.hpp"

namespace canardkit {

struct Weights {
  unsigned ax = 1;
  unsigned ay = 1;
  unsigned ae = 1;

  /// Throws AssumptionViolation unless all are positive with gcd 1.
  void validate() const;
  /// "a,b,c"
  static Weights parse(const std::string& text);
  std::array<unsigned, 3> as_array() const { return {ax, ay, ae}; }
  std::string to_string() const;
  friend bool operator==(const Weights&, const Weights&) = default;
};

/// Raised when the weights do not give a polynomial desingularized field.
class WeightError : public AssumptionViolation {
 public:
  WeightError(const std::string& component, const std::string& message)
      : AssumptionViolation("weights invalid for component " + component + ": " + message), component_(component) {}
  const std::string& component() const noexcept { return component_; }

 private:
  std::string component_;
};

/// (X0 + eps X1, 0) over {x, y, eps}.
PolyVectorField extend_field(const PolyVectorField& x0, const PolyVectorField& x1);

/// Exponent m of the common r-power removed by the weighted blow-up of `field`
/// (one component per variable, in variable order). When `parameter` names a
/// variable, its terms may not lower the order set by the parameter-free part.
int division_exponent(const PolyVectorField& field, std::span<const unsigned> weights,
                      std::optional<std::size_t> parameter = std::nullopt);
int division_exponent(const PolyVectorField& xhat, const Weights& w);

enum class ChartId { x_plus, x_minus, y_plus, y_minus, eps };
const char* to_string(ChartId c);
std::optional<ChartId> parse_chart(const std::string& name);
inline constexpr std::array<ChartId, 5> kAllCharts{ChartId::x_plus, ChartId::x_minus, ChartId::y_plus,
                                                    ChartId::y_minus, ChartId::eps};

/// Variables {r, u, v} of every directional chart.
const VarList& chart_vars();

struct BlownUpChart {
  ChartId chart = ChartId::eps;
  /// (x, y, eps) as polynomials in (r, u, v).
  std::array<MultiPoly, 3> blowup_map;
  /// (r', u', v') after division by r^m.
  PolyVectorField field;
  int division_exponent = 0;
  /// Smallest r-valuation among the Laurent chart components before division.
  int chart_valuation = 0;
};

BlownUpChart chart_field(const PolyVectorField& xhat, const Weights& w, ChartId chart);

struct PushforwardCheck {
  int samples = 0;
  int failures = 0;
  bool ok() const { return failures == 0 && samples > 0; }
};

/// Verifies D(blowup map) * chart field * r^m == xhat(blowup map) exactly at
/// `samples` pseudo-random rational points with r in (0, 1/100].
PushforwardCheck check_pushforward(const BlownUpChart& chart, const PolyVectorField& xhat, int samples,
                                   unsigned long long seed = 1);

/// Desingularized dynamics on the unit sphere of a weighted blow-up at r = 0, for
/// a field with one component per variable.
class WeightedSphere {
 public:
  WeightedSphere(const PolyVectorField& field, std::vector<unsigned> weights,
                 std::optional<std::size_t> parameter = std::nullopt);

  int division_exponent() const noexcept { return m_; }
  std::size_t dimension() const noexcept { return weights_.size(); }
  /// Lowest weighted-order part of each component.
  const std::vector<MultiPoly>& principal_part() const noexcept { return principal_; }
  /// Tangent vector of the r = 0 flow at a unit vector z.
  std::vector<double> zeta(std::span<const double> z) const;

 private:
  std::vector<unsigned> weights_;
  int m_ = 0;
  std::vector<MultiPoly> principal_;
  std::vector<CompiledPoly> compiled_;
};

/// Spherical coordinates x = r^ax cos(theta) sin(phi), y = r^ay sin(theta) sin(phi),
/// eps = r^ae cos(phi); the eps > 0 hemisphere is phi < pi/2.
class BlowupSphere {
 public:
  BlowupSphere(const PolyVectorField& xhat, const Weights& w);

  const Weights& weights() const noexcept { return w_; }
  int division_exponent() const noexcept { return sphere_.division_exponent(); }
  const WeightedSphere& sphere() const noexcept { return sphere_; }

  /// (theta', phi') of the desingularized field at radius r > 0 via the inverse
  /// Jacobian of the blow-up map. Throws NumericError near coordinate singularities.
  std::array<double, 2> at_radius(double r, double theta, double phi) const;
  /// r = 0 limit by linear Richardson extrapolation from radii r1 > r2.
  std::array<double, 2> extrapolated(double theta, double phi, double r1 = 1e-4, double r2 = 1e-5) const;
  /// r = 0 field from the principal part.
  std::array<double, 2> exact(double theta, double phi) const;
  /// Cartesian tangent vector on the unit sphere.
  std::array<double, 3> cartesian(const std::array<double, 3>& z) const;

 private:
  PolyVectorField xhat_;
  Weights w_;
  std::array<CompiledPoly, 3> f_;
  WeightedSphere sphere_;
};

/// (theta', phi') on the blown-up sphere by Richardson extrapolation.
std::array<double, 2> sphere_field(const PolyVectorField& xhat, const Weights& w, double theta, double phi);

struct EquilibriumOrigin {
  enum class Kind { fast_foliation, branch, interior };
  Kind kind = Kind::interior;
  std::vector<int> branches;
  std::string to_string() const;
};

struct SphereEquilibrium {
  double theta = 0.0;
  double phi = 0.0;
  std::array<std::complex<double>, 2> eigenvalues{};
  std::string classification;  ///< stable node, unstable node, saddle, source, sink, nonhyperbolic
  EquilibriumOrigin origin;
  bool tangential = false;     ///< double root of theta' (no sign change)
  double residual = 0.0;       ///< |theta'| at the root
  std::string chart;           ///< chart used for the cross-check
  bool chart_check = false;    ///< chart field vanishes at the transition image
};

/// Labels for equator equilibria: the branch polynomials and the fast direction at p_s.
struct EquatorContext {
  std::vector<Branch> branches;
  Vec2 fast_direction{1.0, 0.0};

  static EquatorContext from(const CriticalSet& cs, const SingularPoint& ps);
};

std::vector<SphereEquilibrium> equator_equilibria(const PolyVectorField& xhat, const Weights& w,
                                                  const EquatorContext& ctx = EquatorContext{});

std::string classify_eigenvalues(const std::array<std::complex<double>, 2>& ev, double tol = 1e-7);

struct ConnectionResult {
  bool connected = false;
  double arclength = 0.0;
  double closest_distance = 0.0;
  /// Smallest gap to the reversed orbit from `to`, when the forward orbit alone misses.
  double match_gap = std::numeric_limits<double>::infinity();
  std::vector<std::array<double, 2>> orbit;  ///< (theta, phi) samples
  std::string stop_reason;
};

/// Integrates the sphere field from `from`, pushed 1e-3 into the eps > 0
/// hemisphere, and reports whether it reaches the 1e-2 neighbourhood of `to`.
/// If it does not, the reversed-time orbit from `to` is traced as well and the
/// two count as connected when they meet within 1e-3 away from both ends.
ConnectionResult connection_trace(const PolyVectorField& xhat, const Weights& w, const SphereEquilibrium& from,
                                  const SphereEquilibrium& to, double arclength_budget = 1e3);

struct SymmetryResult {
  bool holds = false;
  double worst_deviation = 0.0;
  double worst_theta = 0.0;
  double worst_phi = 0.0;
};

/// Reversibility about the meridian theta = pi/2 on a 32 x 32 grid.
SymmetryResult symmetry_check_pitchfork(const PolyVectorField& xhat, const Weights& w, double tol = 1e-6);

struct CircleEquilibrium {
  double psi = 0.0;
  double derivative = 0.0;  ///< d psi'/d psi
  bool stable = false;
  bool hyperbolic = false;
};

struct CircleLemmaSystem {
  int k = 1;
  int sign = 1;  ///< x' = x^(2k+1) + sign * eps
  std::function<double(double)> psi_dot;          ///< closed form
  std::function<double(double)> psi_dot_derived;  ///< from the weighted blow-up
  int division_exponent = 0;
  double max_deviation = 0.0;  ///< over 1000 samples of [0, pi]
  std::vector<CircleEquilibrium> equilibria;
};

/// Motion on the blow-up circle of x' = x^(2k+1) + sign*eps, y' = alpha*eps.
CircleLemmaSystem circle_lemma(int k, int sign = 1);

}  // namespace canardkit
