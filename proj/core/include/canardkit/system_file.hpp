#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "canardkit/blowup.hpp"
#include "canardkit/geometry.hpp"
#include "canardkit/multipoly.hpp"
#include "canardkit/rational.hpp"

namespace canardkit {

/// Contents of a system file:
///
///     # comment
///     X0 = <expr> ; <expr>
///     X1 = <expr> ; <expr>
///     weights = a,b,c
///     box = xmin,xmax,ymin,ymax
///     epsilon = <number>
///     delta = <number>
///
/// X0 and X1 are required. Numbers may be integers, decimals, "p/q" or use an exponent.
struct SystemFile {
  std::string source = "<input>";
  PolyVectorField x0;
  PolyVectorField x1;
  std::optional<Weights> weights;
  std::optional<Box> box;
  std::optional<Rational> epsilon;
  std::optional<Rational> delta;

  /// Canonical text that parses back to an equal system.
  std::string to_text() const;
};

/// Throws ParseError (with the file line) for syntax errors and
/// AssumptionViolation for invalid weights or boxes.
SystemFile parse_system(std::string_view text, std::string source = "<input>");
/// Throws IoError when the file cannot be read.
SystemFile load_system(const std::string& path);

/// Exact value of "3", "-0.25", "1e-3", "2.5E+2" or "5/4". Throws ParseError.
Rational parse_number(std::string_view text, std::size_t line = 1, std::size_t column = 1);

/// "xmin,xmax,ymin,ymax"
Box parse_box(std::string_view text, std::size_t line = 1, std::size_t column = 1);
/// "a,b,c" with positive integer entries.
Weights parse_weights(std::string_view text, std::size_t line = 1, std::size_t column = 1);

}  // namespace canardkit
