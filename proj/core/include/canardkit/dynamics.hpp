#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "canardkit/canard.hpp"
#include "canardkit/geometry.hpp"
#include "canardkit/multipoly.hpp"
#include "canardkit/ode.hpp"
#include "canardkit/stratify.hpp"

namespace canardkit {

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.5;
  long max_steps = 5'000'000;
  double epsilon = 1e-3;

  /// Tolerances in (0, 1e-2], epsilon in (0, 1e-1], positive max_step and max_steps.
  void validate() const;
};

/// max(10 sqrt(eps), 1e-3)
double default_tube_radius(double epsilon);

struct TrajectoryEvent {
  double t = 0.0;
  Vec2 point{};
  std::string tag;  ///< "entered tube <id>", "left tube <id>", "passed p_s", "undefined at p_s"
  double value = 0.0;  ///< speed for the p_s events
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec2> states;
  std::vector<TrajectoryEvent> events;
  OdeStatus status = OdeStatus::completed;
  std::string diagnostic;

  std::size_t size() const noexcept { return times.size(); }
  bool empty() const noexcept { return times.empty(); }
};

/// Tube of radius `radius` around V(branch), measured by |F| / |grad F|.
struct TubeSpec {
  const Branch* branch = nullptr;
  double radius = 1e-2;
};

struct EventSpec {
  std::vector<TubeSpec> tubes;
  /// Reports crossings of the line through p_s normal to X1(p_s) within `pass_radius`.
  std::optional<Vec2> singular_point;
  double pass_radius = 1e-2;
};

/// X0 + eps X1 over (x, y) with Dormand-Prince 5(4). t_end = 0 gives an empty trajectory.
Trajectory integrate_full(const PolyVectorField& x0, const PolyVectorField& x1, const IntegratorConfig& cfg,
                          const Vec2& q0, double t_end, const EventSpec& events = {});

/// Reduced flow q' = alpha(q) t(q) on `branch`, started at q0 on the branch, with
/// each accepted state pulled back onto V(F) by Newton steps along the gradient.
/// On a canard branch the flow crosses p_s ("passed p_s"); otherwise it stops
/// there ("undefined at p_s").
Trajectory integrate_reduced(const Branch& branch, const FastFrame& frame, const PolyVectorField& x1,
                             const SingularPoint& ps, const Vec2& q0, double s_end,
                             const IntegratorConfig& cfg = {});

/// Length of the stretch past p_s, on the half-branch `repelling_side` (+1 follows
/// the branch tangent at p_s), that the trajectory spends within `tube_radius`
/// of the branch, from its first entry on that side until it leaves the tube.
double canard_metric(const Trajectory& traj, const Branch& branch, const Vec2& ps, double tube_radius,
                     int repelling_side);

/// q -> q + delta (X0 + eps X1)(q).
struct EulerMap {
  PolyVectorField x0;
  PolyVectorField x1;
  Rational delta;
  Rational epsilon;
  /// Rational iteration switches to doubles once a coordinate exceeds this many bits.
  std::size_t bit_budget = 4096;

  EulerMap(PolyVectorField x0, PolyVectorField x1, Rational delta, Rational epsilon);
  std::array<Rational, 2> apply(const std::array<Rational, 2>& q) const;
  Vec2 apply(const Vec2& q) const;
};

struct EulerOrbit {
  std::vector<Vec2> points;  ///< q0 and n iterates
  std::vector<std::array<Rational, 2>> exact_points;  ///< the iterates computed exactly
  bool switched_to_float = false;
  std::size_t switch_index = 0;  ///< first iterate computed in doubles
};

/// n iterates of the map; exact while q0 is exact and within the bit budget.
EulerOrbit euler_iterate(const EulerMap& map, const PlanePoint& q0, std::size_t n);

struct ShadowingResult {
  double delta = 0.0;
  double max_deviation = 0.0;
};

/// Max distance between Euler iterates and a tight-tolerance flow at t = k delta for k delta <= t_end.
ShadowingResult shadowing_error(const PolyVectorField& x0, const PolyVectorField& x1, double epsilon,
                                const Vec2& q0, double delta, double t_end = 1.0);

struct MultiplierReport {
  Vec2 point{};
  std::array<std::complex<double>, 2> multipliers{};
  std::complex<double> transverse{};  ///< the multiplier farther from 1
  bool normally_hyperbolic = false;
};

/// Eigenvalues of Id + delta DX0 at points of the critical set. The multiplier
/// closest to 1 is the tangential one and is left out of the hyperbolicity test.
/// Throws AssumptionViolation for points with |X0| > 1e-10.
std::vector<MultiplierReport> multiplier_check(const PolyVectorField& x0, double delta, const std::vector<Vec2>& points);

}  // namespace canardkit
