#include "canardkit/ode.hpp"

namespace canardkit {

const char* to_string(OdeStatus s) {
  switch (s) {
    case OdeStatus::completed: return "completed";
    case OdeStatus::stopped: return "stopped";
    case OdeStatus::step_underflow: return "step size underflow";
    case OdeStatus::max_steps: return "step budget exhausted";
    case OdeStatus::non_finite: return "non-finite state";
  }
  return "unknown";
}

}  // namespace canardkit
