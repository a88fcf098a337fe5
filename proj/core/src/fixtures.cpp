#include "canardkit/fixtures.hpp"

namespace canardkit {

namespace {

constexpr const char* kTranscritical =
    "# four lines of equilibria through the origin\n"
    "X0 = (y-x)*(y+x)*(y-x/2)*(y+x/2) ; 0\n"
    "X1 = 1 ; 1/2\n"
    "weights = 1,1,4\n"
    "box = -1,1,-1,1\n"
    "epsilon = 1e-3\n"
    "delta = 1e-3\n";

constexpr const char* kPitchfork =
    "# two lines and a parabola through the origin\n"
    "X0 = (x+y/2)*(x-y/2)*(y-x^2) ; 0\n"
    "X1 = -1 ; -x\n"
    "weights = 1,2,4\n"
    "box = -1,1,-1,1\n"
    "epsilon = 1e-3\n"
    "delta = 1e-3\n";

}  // namespace

SystemFile transcritical_fixture() { return parse_system(kTranscritical, "transcritical"); }

SystemFile pitchfork_fixture() { return parse_system(kPitchfork, "pitchfork"); }

std::string fixture_text(const std::string& name) {
  if (name == "transcritical") return kTranscritical;
  if (name == "pitchfork") return kPitchfork;
  return {};
}

}  // namespace canardkit
