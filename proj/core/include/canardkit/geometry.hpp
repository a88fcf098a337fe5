#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "canardkit/rational.hpp"

namespace canardkit {

using Vec2 = std::array<double, 2>;

/// A planar point, exact when both coordinates are known as rationals.
struct PlanePoint {
  std::optional<std::array<Rational, 2>> exact;
  Vec2 approx{0.0, 0.0};

  static PlanePoint from_exact(const Rational& x, const Rational& y) {
    return PlanePoint{std::array<Rational, 2>{x, y}, Vec2{x.to_double(), y.to_double()}};
  }
  static PlanePoint from_double(double x, double y) { return PlanePoint{std::nullopt, Vec2{x, y}}; }

  bool is_exact() const noexcept { return exact.has_value(); }
  double x() const noexcept { return approx[0]; }
  double y() const noexcept { return approx[1]; }
};

/// Axis-aligned rectangle with rational corners.
struct Box {
  Rational xmin{-1};
  Rational xmax{1};
  Rational ymin{-1};
  Rational ymax{1};

  /// Throws AssumptionViolation unless both sides have positive length.
  void validate() const;
  bool contains(const Rational& x, const Rational& y) const {
    return xmin <= x && x <= xmax && ymin <= y && y <= ymax;
  }
  bool contains(double x, double y, double slack = 0.0) const {
    return xmin.to_double() - slack <= x && x <= xmax.to_double() + slack && ymin.to_double() - slack <= y &&
           y <= ymax.to_double() + slack;
  }
  std::string to_string() const;
};

inline double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

}  // namespace canardkit
