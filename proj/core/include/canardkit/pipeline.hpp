#pragma once

#include <optional>
#include <string>
#include <vector>

#include "canardkit/blowup.hpp"
#include "canardkit/canard.hpp"
#include "canardkit/dynamics.hpp"
#include "canardkit/stratify.hpp"
#include "canardkit/system_file.hpp"

namespace canardkit {

/// Critical set, singular points, stratifications and canard verdicts of a system.
struct Analysis {
  SystemFile system;
  Box box;
  CriticalSet critical_set;
  std::vector<SingularPoint> points;
  std::vector<Stratification> whitney;                ///< one per singular point, or one without a point
  std::vector<std::vector<Stratification>> relaxed;   ///< per singular point
  std::vector<std::vector<FrameViolation>> frame_violations;
  std::vector<CanardReport> canards;                  ///< per singular point
  std::vector<std::string> warnings;
  bool assumption_violated = false;
};

/// Throws AssumptionViolation when the critical set itself is unusable (X0 = 0,
/// even multiplicities). Violations at a singular point are recorded as warnings.
Analysis run_analysis(const SystemFile& sys, const std::optional<Box>& box_override = std::nullopt);

struct ConnectionReport {
  int branch = 0;
  SphereEquilibrium from;
  SphereEquilibrium to;
  ConnectionResult result;
};

struct BlowupAnalysis {
  Weights weights;
  Vec2 center{};  ///< the singular point moved to the origin before blowing up
  PolyVectorField xhat;
  int division_exponent = 0;
  std::vector<BlownUpChart> charts;
  std::vector<PushforwardCheck> pushforward;
  std::vector<SphereEquilibrium> equator;
  double equator_invariance = 0.0;      ///< max |phi'| on 1024 equator points
  double richardson_consistency = 0.0;  ///< max change between radius pairs on a 10 x 10 grid
  SymmetryResult symmetry;
  std::vector<ConnectionReport> connections;
};

/// Blow-up at the first singular point of `a`, which must be rational.
/// Throws WeightError / AssumptionViolation for unusable weights.
BlowupAnalysis run_blowup(const Analysis& a, const Weights& w, int pushforward_samples = 100);

/// Equator angle of the half-branch of `branch` on `side`, read off a point near p_s.
double half_branch_equator_angle(const Branch& branch, const SingularPoint& ps, int side, const Weights& w,
                                 const Box& box);

enum class SimulationMode { flow, euler, sweep };
const char* to_string(SimulationMode m);

/// Second tube radius for the canard metric when none is requested.
inline constexpr double kNarrowTube = 1e-2;

struct SimulationRequest {
  SimulationMode mode = SimulationMode::flow;
  double epsilon = 1e-3;
  std::optional<Rational> epsilon_exact;  ///< used by the Euler map when given
  std::optional<Vec2> q0;
  std::optional<Rational> q0_exact_x;
  std::optional<Rational> q0_exact_y;
  std::optional<double> t_end;
  Rational delta{1, 1000};
  std::optional<double> tube;  ///< default: default_tube_radius(epsilon) and kNarrowTube
};

struct MetricEntry {
  int branch = 0;
  int repelling_side = 0;
  double tube = 0.0;
  double metric = 0.0;
  double rotated_metric = 0.0;  ///< same run with X1 rotated by 0.1 rad
  bool separated = false;       ///< metric > 5 * rotated_metric and metric > 0
};

struct SimulationResult {
  SimulationMode mode = SimulationMode::flow;
  double epsilon = 0.0;
  Vec2 q0{};
  double t_end = 0.0;
  Trajectory trajectory;
  std::vector<MetricEntry> metrics;
  bool switched_to_float = false;
  std::size_t switch_index = 0;
  std::vector<ShadowingResult> shadowing;
  double shadowing_ratio = 0.0;
  std::vector<std::string> warnings;
};

SimulationResult run_simulation(const Analysis& a, const SimulationRequest& req);

}  // namespace canardkit
