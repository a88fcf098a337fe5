#pragma once

#include <string>

#include "canardkit/system_file.hpp"

namespace canardkit {

/// Four lines through the origin, ((y-x)(y+x)(y-x/2)(y+x/2), 0) with X1 = (1, 1/2)
/// and weights 1,1,4.
SystemFile transcritical_fixture();

/// Two lines and the parabola y = x^2, ((x+y/2)(x-y/2)(y-x^2), 0) with
/// X1 = -(1, x) and weights 1,2,4.
SystemFile pitchfork_fixture();

/// System-file text of a named fixture ("transcritical" or "pitchfork"); empty if unknown.
std::string fixture_text(const std::string& name);

}  // namespace canardkit
