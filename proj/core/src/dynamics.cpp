#include "canardkit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "canardkit/compiled_poly.hpp"
#include "canardkit/error.hpp"

namespace canardkit {

void IntegratorConfig::validate() const {
  auto tol_ok = [](double t) { return t > 0.0 && t <= 1e-2; };
  if (!tol_ok(rel_tol) || !tol_ok(abs_tol)) throw AssumptionViolation("integrator tolerances must lie in (0, 1e-2]");
  if (!(epsilon > 0.0 && epsilon <= 0.1)) throw AssumptionViolation("epsilon must lie in (0, 0.1]");
  if (!(max_step > 0.0)) throw AssumptionViolation("max_step must be positive");
  if (max_steps <= 0) throw AssumptionViolation("max_steps must be positive");
}

double default_tube_radius(double epsilon) { return std::max(10.0 * std::sqrt(epsilon), 1e-3); }

namespace {

PolyVectorField combined_field(const PolyVectorField& x0, const PolyVectorField& x1, const Rational& eps) {
  if (x0.size() != 2 || x1.size() != 2) throw AlgebraError("planar fields need two components");
  const VarList& dv = default_vars();
  std::vector<MultiPoly> c;
  for (std::size_t i = 0; i < 2; ++i) {
    MultiPoly p = x0[i].with_vars(dv) + x1[i].with_vars(dv) * eps;
    // eps occurring inside X0 or X1 is set to its numeric value too.
    p = substitute(p, {{"eps", MultiPoly::constant(dv, eps)}}, dv);
    c.push_back(std::move(p));
  }
  return PolyVectorField(std::move(c));
}

double tube_distance(const Branch& b, const Vec2& q) {
  const Vec2 g = b.grad(q[0], q[1]);
  const double n = norm(g);
  const double f = std::abs(b.eval(q[0], q[1]));
  return n > 0.0 ? f / n : (f == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
}

Vec2 to_vec(const State<2>& s) { return {s[0], s[1]}; }

// Root of g along a dense step, given a sign change between its ends.
template <typename G>
double refine_crossing(const DenseStep<2>& s, G&& g, double g0) {
  double lo = s.t0, hi = s.t1;
  for (int it = 0; it < 60 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(to_vec(s.at(mid)));
    if ((gm > 0) == (g0 > 0)) {
      lo = mid;
      g0 = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void set_diagnostic(Trajectory& tr, OdeStatus st) {
  tr.status = st;
  switch (st) {
    case OdeStatus::completed:
    case OdeStatus::stopped: break;
    case OdeStatus::step_underflow:
      tr.diagnostic = "step size underflow at t = " + std::to_string(tr.times.back()) + "; trajectory is partial";
      break;
    case OdeStatus::max_steps:
      tr.diagnostic = "step budget exhausted at t = " + std::to_string(tr.times.back()) + "; trajectory is partial";
      break;
    case OdeStatus::non_finite:
      tr.diagnostic = "non-finite state near t = " + std::to_string(tr.times.back());
      break;
  }
}

}  // namespace

Trajectory integrate_full(const PolyVectorField& x0, const PolyVectorField& x1, const IntegratorConfig& cfg,
                          const Vec2& q0, double t_end, const EventSpec& events) {
  cfg.validate();
  if (t_end < 0.0) throw AssumptionViolation("t_end must be non-negative");
  Trajectory tr;
  if (t_end == 0.0) return tr;
  if (!std::isfinite(q0[0]) || !std::isfinite(q0[1])) throw NumericError("initial state is not finite");

  const CompiledPlanarField field(combined_field(x0, x1, Rational::from_double(cfg.epsilon)), {"x", "y"});
  auto rhs = [&](double, const State<2>& y, State<2>& dy) {
    const auto v = field.value(y[0], y[1]);
    dy = {v[0], v[1]};
  };

  Vec2 pass_normal{0.0, 0.0};
  if (events.singular_point) {
    const Vec2 v = eval_field(x1, (*events.singular_point)[0], (*events.singular_point)[1]);
    const double n = norm(v);
    if (n > 0) pass_normal = {v[0] / n, v[1] / n};
  }
  auto pass_fn = [&](const Vec2& q) {
    return (q[0] - (*events.singular_point)[0]) * pass_normal[0] + (q[1] - (*events.singular_point)[1]) * pass_normal[1];
  };

  tr.times.push_back(0.0);
  tr.states.push_back(q0);
  for (std::size_t i = 0; i < events.tubes.size(); ++i) {
    if (tube_distance(*events.tubes[i].branch, q0) < events.tubes[i].radius) {
      tr.events.push_back({0.0, q0, "entered tube " + std::to_string(events.tubes[i].branch->id), 0.0});
    }
  }

  OdeOptions opt;
  opt.rel_tol = cfg.rel_tol;
  opt.abs_tol = cfg.abs_tol;
  opt.max_step = cfg.max_step;
  opt.max_steps = cfg.max_steps;
  auto observer = [&](const DenseStep<2>& s) {
    const Vec2 a = to_vec(s.y0), b = to_vec(s.y1);
    for (const auto& tube : events.tubes) {
      auto g = [&](const Vec2& q) { return tube_distance(*tube.branch, q) - tube.radius; };
      const double g0 = g(a), g1 = g(b);
      if ((g0 < 0) != (g1 < 0)) {
        const double tc = refine_crossing(s, g, g0);
        tr.events.push_back({tc, to_vec(s.at(tc)),
                             std::string(g1 < 0 ? "entered" : "left") + " tube " + std::to_string(tube.branch->id),
                             0.0});
      }
    }
    if (events.singular_point && norm(pass_normal) > 0) {
      const double g0 = pass_fn(a), g1 = pass_fn(b);
      if ((g0 < 0) != (g1 < 0)) {
        const double tc = refine_crossing(s, pass_fn, g0);
        const Vec2 q = to_vec(s.at(tc));
        if (std::hypot(q[0] - (*events.singular_point)[0], q[1] - (*events.singular_point)[1]) <
            events.pass_radius) {
          tr.events.push_back({tc, q, "passed p_s", norm(field.value(q[0], q[1]))});
        }
      }
    }
    tr.times.push_back(s.t1);
    tr.states.push_back(b);
    return true;
  };
  State<2> y{q0[0], q0[1]};
  set_diagnostic(tr, dopri5<2>(rhs, 0.0, y, t_end, opt, observer));
  std::stable_sort(tr.events.begin(), tr.events.end(),
                   [](const TrajectoryEvent& a, const TrajectoryEvent& b) { return a.t < b.t; });
  return tr;
}

namespace {

void pull_back(const Branch& b, Vec2& q) {
  for (int it = 0; it < 4; ++it) {
    const double f = b.eval(q[0], q[1]);
    const Vec2 g = b.grad(q[0], q[1]);
    const double n2 = g[0] * g[0] + g[1] * g[1];
    if (n2 == 0.0 || f == 0.0) return;
    q[0] -= f * g[0] / n2;
    q[1] -= f * g[1] / n2;
  }
}

}  // namespace

Trajectory integrate_reduced(const Branch& branch, const FastFrame& frame, const PolyVectorField& x1,
                             const SingularPoint& ps, const Vec2& q0, double s_end, const IntegratorConfig& cfg) {
  cfg.validate();
  if (s_end < 0.0) throw AssumptionViolation("s_end must be non-negative");
  if (tube_distance(branch, q0) > 1e-8) {
    throw AssumptionViolation("initial point is not on branch " + branch.defining_poly.to_string());
  }
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(q0);
  if (s_end == 0.0) return tr;

  const bool canard = wedge_condition(x1, ps, branch).vanishes;
  const Vec2 p{ps.location.x(), ps.location.y()};
  const Vec2 t_ps = branch.tangent(p[0], p[1]);
  auto velocity = [&](const Vec2& q, bool& ok) -> Vec2 {
    const auto r = project_rho(x1, PlanePoint::from_double(q[0], q[1]), branch, frame);
    ok = r.well_defined;
    if (!ok) return {0.0, 0.0};
    const Vec2 t = branch.tangent(q[0], q[1]);
    return {r.tangent_component * t[0], r.tangent_component * t[1]};
  };
  bool defined = true;
  auto rhs = [&](double, const State<2>& y, State<2>& dy) {
    bool ok = true;
    const Vec2 v = velocity({y[0], y[1]}, ok);
    if (!ok) defined = false;
    dy = {ok ? v[0] : std::nan(""), ok ? v[1] : std::nan("")};
  };
  auto side = [&](const Vec2& q) { return (q[0] - p[0]) * t_ps[0] + (q[1] - p[1]) * t_ps[1]; };
  auto observer = [&](const DenseStep<2>& s) {
    Vec2 b = to_vec(s.y1);
    pull_back(branch, b);
    const double g0 = side(to_vec(s.y0)), g1 = side(b);
    if (g0 != 0.0 && (g0 < 0) != (g1 < 0)) {
      const double tc = refine_crossing(s, side, g0);
      bool ok = true;
      const Vec2 v = velocity(p, ok);
      if (canard) {
        tr.events.push_back({tc, p, "passed p_s", ok ? norm(v) : 0.0});
      } else {
        tr.times.push_back(tc);
        tr.states.push_back(p);
        tr.events.push_back({tc, p, "undefined at p_s", ok ? norm(v) : 0.0});
        return false;
      }
    }
    tr.times.push_back(s.t1);
    tr.states.push_back(b);
    return true;
  };
  auto project = [&](State<2>& y) {
    Vec2 q{y[0], y[1]};
    pull_back(branch, q);
    const bool moved = q[0] != y[0] || q[1] != y[1];
    y = {q[0], q[1]};
    return moved;
  };
  OdeOptions opt;
  opt.rel_tol = cfg.rel_tol;
  opt.abs_tol = cfg.abs_tol;
  opt.max_step = cfg.max_step;
  opt.max_steps = cfg.max_steps;
  State<2> y{q0[0], q0[1]};
  set_diagnostic(tr, dopri5<2>(rhs, 0.0, y, s_end, opt, observer, project));
  if (!defined && tr.diagnostic.empty()) tr.diagnostic = "reduced flow undefined where the fast frame is tangent";
  return tr;
}

double canard_metric(const Trajectory& traj, const Branch& branch, const Vec2& ps, double tube_radius,
                     int repelling_side) {
  if (traj.states.empty()) return 0.0;
  const Vec2 t = branch.tangent(ps[0], ps[1]);
  auto side = [&](const Vec2& q) {
    const double s = (q[0] - ps[0]) * t[0] + (q[1] - ps[1]) * t[1];
    return (s > 0) - (s < 0);
  };
  // First state on the repelling side, then the first one there inside the tube.
  std::size_t i = 0;
  while (i < traj.states.size() && side(traj.states[i]) != repelling_side) ++i;
  while (i < traj.states.size() && side(traj.states[i]) == repelling_side &&
         tube_distance(branch, traj.states[i]) >= tube_radius) {
    ++i;
  }
  if (i == traj.states.size() || side(traj.states[i]) != repelling_side) return 0.0;
  double length = 0.0;
  for (std::size_t k = i + 1; k < traj.states.size(); ++k) {
    const Vec2& q = traj.states[k];
    if (tube_distance(branch, q) >= tube_radius || side(q) != repelling_side) break;
    length += std::hypot(q[0] - traj.states[k - 1][0], q[1] - traj.states[k - 1][1]);
  }
  return length;
}

EulerMap::EulerMap(PolyVectorField x0_, PolyVectorField x1_, Rational delta_, Rational epsilon_)
    : x0(std::move(x0_)), x1(std::move(x1_)), delta(std::move(delta_)), epsilon(std::move(epsilon_)) {
  if (delta.sign() < 0) throw AssumptionViolation("Euler step delta must be non-negative");
}

std::array<Rational, 2> EulerMap::apply(const std::array<Rational, 2>& q) const {
  const auto a = eval_field(x0, q[0], q[1]);
  const auto b = eval_field(x1, q[0], q[1]);
  return {q[0] + delta * (a[0] + epsilon * b[0]), q[1] + delta * (a[1] + epsilon * b[1])};
}

Vec2 EulerMap::apply(const Vec2& q) const {
  const Vec2 a = eval_field(x0, q[0], q[1]);
  const Vec2 b = eval_field(x1, q[0], q[1]);
  const double d = delta.to_double(), e = epsilon.to_double();
  return {q[0] + d * (a[0] + e * b[0]), q[1] + d * (a[1] + e * b[1])};
}

EulerOrbit euler_iterate(const EulerMap& map, const PlanePoint& q0, std::size_t n) {
  EulerOrbit orbit;
  orbit.points.push_back(q0.approx);
  std::optional<std::array<Rational, 2>> exact = q0.exact;
  if (exact) {
    orbit.exact_points.push_back(*exact);
  } else {
    orbit.switched_to_float = true;
  }
  Vec2 q = q0.approx;
  for (std::size_t k = 1; k <= n; ++k) {
    if (exact) {
      auto next = map.apply(*exact);
      if (next[0].bit_size() > map.bit_budget || next[1].bit_size() > map.bit_budget) {
        exact.reset();
        orbit.switched_to_float = true;
        orbit.switch_index = k;
      } else {
        exact = next;
        orbit.exact_points.push_back(next);
        q = {next[0].to_double(), next[1].to_double()};
        orbit.points.push_back(q);
        continue;
      }
    }
    q = map.apply(q);
    orbit.points.push_back(q);
  }
  return orbit;
}

ShadowingResult shadowing_error(const PolyVectorField& x0, const PolyVectorField& x1, double epsilon,
                                const Vec2& q0, double delta, double t_end) {
  if (!(delta > 0.0)) throw AssumptionViolation("Euler step delta must be positive");
  const Rational eps = Rational::from_double(epsilon);
  const CompiledPlanarField field(combined_field(x0, x1, eps), {"x", "y"});
  std::vector<DenseStep<2>> steps;
  OdeOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-14;
  opt.max_step = delta;
  State<2> y{q0[0], q0[1]};
  dopri5<2>(
      [&](double, const State<2>& s, State<2>& ds) {
        const auto v = field.value(s[0], s[1]);
        ds = {v[0], v[1]};
      },
      0.0, y, t_end, opt,
      [&](const DenseStep<2>& s) {
        steps.push_back(s);
        return true;
      });

  ShadowingResult res;
  res.delta = delta;
  Vec2 q = q0;
  std::size_t j = 0;
  const auto n = static_cast<std::size_t>(std::floor(t_end / delta + 1e-9));
  for (std::size_t k = 1; k <= n && !steps.empty(); ++k) {
    const auto v = field.value(q[0], q[1]);
    q = {q[0] + delta * v[0], q[1] + delta * v[1]};
    const double t = static_cast<double>(k) * delta;
    while (j + 1 < steps.size() && steps[j].t1 < t) ++j;
    const State<2> ref = steps[j].at(std::min(t, steps[j].t1));
    res.max_deviation = std::max(res.max_deviation, std::hypot(q[0] - ref[0], q[1] - ref[1]));
  }
  return res;
}

std::vector<MultiplierReport> multiplier_check(const PolyVectorField& x0, double delta,
                                               const std::vector<Vec2>& points) {
  const CompiledPlanarField field(x0, {"x", "y"});
  std::vector<MultiplierReport> out;
  for (const auto& q : points) {
    const auto v = field.value(q[0], q[1]);
    if (std::hypot(v[0], v[1]) > 1e-10) {
      throw AssumptionViolation("point (" + std::to_string(q[0]) + ", " + std::to_string(q[1]) +
                                ") is not on the critical set");
    }
    const auto j = field.jacobian(q[0], q[1]);
    const double a = 1.0 + delta * j[0], b = delta * j[1], c = delta * j[2], d = 1.0 + delta * j[3];
    const double tr = a + d, det = a * d - b * c;
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
    MultiplierReport r;
    r.point = q;
    r.multipliers = {(tr - disc) / 2.0, (tr + disc) / 2.0};
    const bool first_tangential = std::abs(r.multipliers[0] - 1.0) <= std::abs(r.multipliers[1] - 1.0);
    r.transverse = r.multipliers[first_tangential ? 1 : 0];
    r.normally_hyperbolic = std::abs(std::abs(r.transverse) - 1.0) > 1e-9;
    out.push_back(r);
  }
  return out;
}

}  // namespace canardkit
