#pragma once

#include <string_view>

#include "canardkit/multipoly.hpp"

namespace canardkit {

/// Parses a polynomial expression into canonical expanded form.
///
/// Grammar:
///   expr   := term (("+" | "-") term)*
///   term   := unary (("*" | "/") unary)*
///   unary  := "-" unary | factor
///   factor := base ("^" UINT)?
///   base   := UINT | IDENT | "(" expr ")"
///
/// Division is accepted only by a nonzero rational constant, which covers
/// rational literals such as "5/4" and scalings such as "x/2". Implicit
/// multiplication ("2x") is rejected. Throws ParseError with line/column.
MultiPoly parse_poly(std::string_view source, const VarList& vars = default_vars());

}  // namespace canardkit
