#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "canardkit/geometry.hpp"
#include "canardkit/multipoly.hpp"
#include "canardkit/stratify.hpp"

namespace canardkit {

/// Generator of the fast foliation near C: the cofactor (A^, B^).
struct FastFrame {
  std::array<MultiPoly, 2> generator;

  explicit FastFrame(const CriticalSet& cs) : generator(cs.fast_cofactor) {}
  FastFrame(MultiPoly a, MultiPoly b) : generator{std::move(a), std::move(b)} {}

  std::array<Rational, 2> at(const Rational& x, const Rational& y) const;
  Vec2 at(double x, double y) const;
};

struct FrameViolation {
  int branch = 0;
  Vec2 point{};
  std::string reason;
};

/// Checks the generator is nonzero and transverse to each incident branch at
/// sampled half-branch points around p_s.
std::vector<FrameViolation> validate_frame(const FastFrame& frame, const CriticalSet& cs, const SingularPoint& ps,
                                           const Box& box, int samples_per_half = 16);

/// Rotated gradient (-dF/dy, dF/dx) at a point of the branch. Throws
/// AlgebraError when p is off the branch or the gradient vanishes.
std::array<Rational, 2> tangent_at(const Branch& branch, const Rational& x, const Rational& y);

struct WedgeValue {
  std::optional<Rational> exact;  ///< set when p_s is rational
  double approx = 0.0;
  bool vanishes = false;  ///< exact zero, or |value| < 1e-10 when inexact
};

/// det[X1(p_s), T_{p_s} V(F_i)]. Throws AssumptionViolation when X1(p_s) = 0.
WedgeValue wedge_condition(const PolyVectorField& x1, const SingularPoint& ps, const Branch& branch);

/// 2x2 determinant u ^ v of planar vectors.
Rational wedge(const std::array<Rational, 2>& u, const std::array<Rational, 2>& v);

/// X1 evaluated on the plane (the eps variable, if present, is set to 0).
std::array<Rational, 2> eval_field(const PolyVectorField& f, const Rational& x, const Rational& y);
Vec2 eval_field(const PolyVectorField& f, double x, double y);

struct ReducedFlowSample {
  PlanePoint point;
  double tangent_component = 0.0;  ///< alpha
  double fast_component = 0.0;     ///< beta
  std::optional<Rational> exact_alpha;
  std::optional<Rational> exact_beta;
  double residual = 0.0;  ///< |X1 - alpha t - beta g|
  bool well_defined = true;
};

/// Solves X1(p) = alpha t + beta g with t the branch tangent and g the fast generator.
ReducedFlowSample project_rho(const PolyVectorField& x1, const PlanePoint& p, const Branch& branch,
                              const FastFrame& frame);

/// The value of rho at the singular point itself: X1(p_s).
std::array<double, 2> rho_at_singular_point(const PolyVectorField& x1, const SingularPoint& ps);

enum class Stability { attracting, repelling, mixed };
const char* to_string(Stability s);

struct HalfBranchReport {
  int side = 0;
  Stability stability = Stability::mixed;
  std::vector<double> transverse_eigenvalues;  ///< trace DX0 at the stability samples
  std::vector<Vec2> reduced_flow_equilibria;
  double mean_alpha = 0.0;
};

struct BranchCanard {
  int branch = 0;
  std::array<Rational, 2> tangent_at_ps;
  std::optional<Vec2> tangent_approx;  ///< used when p_s is irrational
  WedgeValue wedge;
  bool is_canard = false;
  std::vector<Vec2> reduced_flow_equilibria_found;
  std::array<HalfBranchReport, 2> halves;  ///< sides -1, +1
  std::string orientation_note;  ///< "attracting->repelling", "repelling->attracting" or "mixed"
};

struct CanardReport {
  SingularPoint singular_point;
  std::vector<BranchCanard> per_branch;

  std::vector<int> canard_branches() const;
};

/// Wedge test, reduced-flow scan (64 samples per half-branch) and stability
/// labels (8 samples per half-branch) for every branch through p_s.
CanardReport detect_singular_canards(const PolyVectorField& x1, const CriticalSet& cs, const SingularPoint& ps,
                                     const FastFrame& frame, const Box& box);

}  // namespace canardkit
