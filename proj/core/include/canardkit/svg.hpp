#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "canardkit/blowup.hpp"
#include "canardkit/geometry.hpp"
#include "canardkit/pipeline.hpp"
#include "canardkit/stratify.hpp"

namespace canardkit {

/// Plane panel: branches of the critical set, fast fibres and trajectories.
struct PlaneView {
  Box box;
  std::vector<Branch> branches;
  std::vector<int> canard_branches;  ///< drawn highlighted
  std::optional<PolyVectorField> fast_field;
  std::optional<Vec2> singular_point;
  std::vector<std::vector<Vec2>> trajectories;
  int grid = 200;  ///< marching-squares resolution per axis
};

/// Upper hemisphere of the blow-up sphere seen from the pole; the equator is the rim.
struct HemisphereView {
  std::vector<SphereEquilibrium> equilibria;
  std::vector<std::vector<std::array<double, 2>>> orbits;  ///< (theta, phi) samples
};

struct SvgScene {
  std::optional<PlaneView> plane;
  std::optional<HemisphereView> hemisphere;
};

/// Deterministic SVG document. An empty scene gives a plane frame with axes only.
std::string render_svg(const SvgScene& scene);

/// Scene for a report: plane view of `a`, plus the hemisphere when `b` is given and
/// the trajectory of `s` when given.
SvgScene make_scene(const Analysis& a, const BlowupAnalysis* b = nullptr, const SimulationResult* s = nullptr);

}  // namespace canardkit
