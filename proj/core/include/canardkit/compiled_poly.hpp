#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "canardkit/multipoly.hpp"

namespace canardkit {

/// Flattened double-precision copy of a MultiPoly for repeated evaluation.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const MultiPoly& p);

  double operator()(std::span<const double> point) const;
  std::size_t num_vars() const noexcept { return num_vars_; }

 private:
  std::size_t num_vars_ = 0;
  unsigned max_degree_ = 0;
  std::vector<double> coeffs_;
  std::vector<unsigned> exponents_;  // term-major, num_vars_ per term
};

/// A planar field compiled together with its Jacobian.
class CompiledPlanarField {
 public:
  CompiledPlanarField() = default;
  /// `field` has two components over any variable list in which only the two
  /// `state_vars` actually occur.
  CompiledPlanarField(const PolyVectorField& field, std::array<std::string, 2> state_vars);

  std::array<double, 2> value(double x, double y) const;
  /// Row-major [[dF1/dx, dF1/dy], [dF2/dx, dF2/dy]].
  std::array<double, 4> jacobian(double x, double y) const;

 private:
  std::array<CompiledPoly, 2> f_;
  std::array<CompiledPoly, 4> df_;
  std::size_t ix_ = 0;
  std::size_t iy_ = 1;
  std::size_t nvars_ = 2;
};

}  // namespace canardkit
