#include "canardkit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

#include "canardkit/error.hpp"

namespace canardkit {

Analysis run_analysis(const SystemFile& sys, const std::optional<Box>& box_override) {
  Analysis a;
  a.system = sys;
  a.box = box_override ? *box_override : sys.box.value_or(Box{});
  a.box.validate();
  a.critical_set = build_critical_set(sys.x0);
  const CriticalSet& cs = a.critical_set;
  for (const auto& w : cs.warnings) a.warnings.push_back(w);
  if (!cs.singular) a.warnings.push_back("X0 has no common factor; the system is not singularly perturbed");
  a.points = find_singular_points(cs, a.box);
  if (a.points.empty()) {
    a.whitney.push_back(whitney_stratify(cs));
    return a;
  }
  const FastFrame frame(cs);
  for (const auto& p : a.points) {
    Stratification ws;
    try {
      ws = whitney_stratify(cs, p, a.box);
    } catch (const AssumptionViolation& e) {
      a.warnings.push_back(e.what());
      a.assumption_violated = true;
      ws.point = p;
    }
    a.relaxed.push_back(ws.strata.empty() ? std::vector<Stratification>{} : relaxed_stratifications(ws));
    a.whitney.push_back(std::move(ws));
    a.frame_violations.push_back(validate_frame(frame, cs, p, a.box));
    for (const auto& v : a.frame_violations.back()) {
      a.warnings.push_back("fast frame check failed on branch " + std::to_string(v.branch) + ": " + v.reason);
    }
    try {
      a.canards.push_back(detect_singular_canards(sys.x1, cs, p, frame, a.box));
      for (const auto& bc : a.canards.back().per_branch) {
        for (const auto& h : bc.halves) {
          if (h.stability == Stability::mixed) {
            a.warnings.push_back("branch " + std::to_string(bc.branch) + " side " + std::to_string(h.side) +
                                 " changes stability; normal hyperbolicity fails away from p_s");
          }
        }
      }
    } catch (const AssumptionViolation& e) {
      a.warnings.push_back(e.what());
      a.assumption_violated = true;
      CanardReport empty;
      empty.singular_point = p;
      a.canards.push_back(std::move(empty));
    }
  }
  return a;
}

double half_branch_equator_angle(const Branch& branch, const SingularPoint& ps, int side, const Weights& w,
                                 const Box& box) {
  const HalfBranch hb(branch, ps.location, side, box);
  const auto q = hb.point_at(std::min(1e-3, 0.5 * hb.length()));
  if (!q) throw NumericError("half-branch leaves the box immediately");
  const double dx = (*q)[0] - ps.location.x();
  const double dy = (*q)[1] - ps.location.y();
  // Weighted radius: (dx / r^ax)^2 + (dy / r^ay)^2 = 1, decreasing in r.
  auto g = [&](double lr) {
    const double r = std::exp(lr);
    return std::pow(dx / std::pow(r, w.ax), 2) + std::pow(dy / std::pow(r, w.ay), 2) - 1.0;
  };
  double lo = std::log(1e-300), hi = std::log(1e3);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  const double r = std::exp(0.5 * (lo + hi));
  return std::atan2(dy / std::pow(r, w.ay), dx / std::pow(r, w.ax));
}

BlowupAnalysis run_blowup(const Analysis& a, const Weights& w, int pushforward_samples) {
  w.validate();
  if (a.points.empty()) throw AssumptionViolation("no singular point inside the box; nothing to blow up");
  const SingularPoint& ps = a.points.front();
  if (!ps.location.is_exact()) throw AssumptionViolation("the blow-up needs a rational singular point");
  BlowupAnalysis b;
  b.weights = w;
  b.center = ps.location.approx;

  const VarList& dv = default_vars();
  const auto& [px, py] = *ps.location.exact;
  const std::map<std::string, MultiPoly> shift{
      {"x", MultiPoly::variable(dv, "x") + MultiPoly::constant(dv, px)},
      {"y", MultiPoly::variable(dv, "y") + MultiPoly::constant(dv, py)}};
  auto moved = [&](const PolyVectorField& f) {
    return PolyVectorField({substitute(f[0].with_vars(dv), shift, dv), substitute(f[1].with_vars(dv), shift, dv)});
  };
  b.xhat = extend_field(moved(a.critical_set.x0), moved(a.system.x1));
  b.division_exponent = division_exponent(b.xhat, w);
  for (auto c : kAllCharts) {
    b.charts.push_back(chart_field(b.xhat, w, c));
    b.pushforward.push_back(check_pushforward(b.charts.back(), b.xhat, pushforward_samples));
  }

  const EquatorContext ctx = EquatorContext::from(a.critical_set, ps);
  b.equator = equator_equilibria(b.xhat, w, ctx);

  const BlowupSphere sphere(b.xhat, w);
  constexpr double kPi = std::numbers::pi;
  for (int i = 0; i < 1024; ++i) {
    const double th = -kPi + 2 * kPi * (i + 0.5) / 1024;
    b.equator_invariance = std::max(b.equator_invariance, std::abs(sphere.extrapolated(th, kPi / 2)[1]));
  }
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double th = -kPi + 2 * kPi * (i + 0.5) / 10;
      const double ph = (kPi / 2) * (j + 1) / 10;
      const auto f1 = sphere.extrapolated(th, ph, 1e-4, 1e-5);
      const auto f2 = sphere.extrapolated(th, ph, 1e-3, 1e-4);
      b.richardson_consistency =
          std::max({b.richardson_consistency, std::abs(f1[0] - f2[0]), std::abs(f1[1] - f2[1])});
    }
  }
  b.symmetry = symmetry_check_pitchfork(b.xhat, w);

  if (a.canards.empty()) return b;
  for (const auto& bc : a.canards.front().per_branch) {
    if (!bc.is_canard) continue;
    int attracting = 0, repelling = 0;
    for (const auto& h : bc.halves) {
      if (h.stability == Stability::attracting) attracting = h.side;
      if (h.stability == Stability::repelling) repelling = h.side;
    }
    if (attracting == 0 || repelling == 0) continue;
    const Branch& br = a.critical_set.branch(bc.branch);
    auto nearest = [&](double angle) -> std::optional<SphereEquilibrium> {
      std::optional<SphereEquilibrium> best;
      double gap = std::numeric_limits<double>::infinity();
      for (const auto& e : b.equator) {
        const auto& ids = e.origin.branches;
        if (std::find(ids.begin(), ids.end(), bc.branch) == ids.end()) continue;
        const double d = std::abs(std::remainder(e.theta - angle, 2 * kPi));
        if (d < gap) {
          gap = d;
          best = e;
        }
      }
      return best;
    };
    const auto from = nearest(half_branch_equator_angle(br, ps, attracting, w, a.box));
    const auto to = nearest(half_branch_equator_angle(br, ps, repelling, w, a.box));
    if (!from || !to) continue;
    ConnectionReport cr;
    cr.branch = bc.branch;
    cr.from = *from;
    cr.to = *to;
    cr.result = connection_trace(b.xhat, w, *from, *to);
    b.connections.push_back(std::move(cr));
  }
  return b;
}

const char* to_string(SimulationMode m) {
  switch (m) {
    case SimulationMode::flow: return "flow";
    case SimulationMode::euler: return "euler";
    case SimulationMode::sweep: return "sweep";
  }
  return "flow";
}

namespace {

PolyVectorField rotated(const PolyVectorField& x1, double angle) {
  const Rational c = Rational::from_double(std::cos(angle));
  const Rational s = Rational::from_double(std::sin(angle));
  const VarList& dv = default_vars();
  const MultiPoly a = x1[0].with_vars(dv), b = x1[1].with_vars(dv);
  return PolyVectorField({a * c - b * s, a * s + b * c});
}

Trajectory euler_trajectory(const EulerMap& map, const PlanePoint& q0, std::size_t n, EulerOrbit* orbit_out) {
  EulerOrbit orbit = euler_iterate(map, q0, n);
  Trajectory tr;
  const double d = map.delta.to_double();
  for (std::size_t k = 0; k < orbit.points.size(); ++k) {
    if (!std::isfinite(orbit.points[k][0]) || !std::isfinite(orbit.points[k][1])) {
      tr.status = OdeStatus::non_finite;
      tr.diagnostic = "Euler iterate " + std::to_string(k) + " is not finite";
      break;
    }
    tr.times.push_back(static_cast<double>(k) * d);
    tr.states.push_back(orbit.points[k]);
  }
  if (orbit_out) *orbit_out = std::move(orbit);
  return tr;
}

}  // namespace

SimulationResult run_simulation(const Analysis& a, const SimulationRequest& req) {
  SimulationResult res;
  res.mode = req.mode;
  res.epsilon = req.epsilon;
  IntegratorConfig cfg;
  cfg.epsilon = req.epsilon;
  cfg.validate();

  const CanardReport* canard = a.canards.empty() ? nullptr : &a.canards.front();
  std::vector<const BranchCanard*> canard_branches;
  if (canard) {
    for (const auto& bc : canard->per_branch) {
      if (bc.is_canard) canard_branches.push_back(&bc);
    }
  }

  PlanePoint q0;
  if (req.q0) {
    q0 = (req.q0_exact_x && req.q0_exact_y) ? PlanePoint::from_exact(*req.q0_exact_x, *req.q0_exact_y)
                                            : PlanePoint::from_double((*req.q0)[0], (*req.q0)[1]);
  } else {
    if (canard_branches.empty()) throw AssumptionViolation("no canard branch to start from; give q0 explicitly");
    const BranchCanard& bc = *canard_branches.front();
    int side = 0;
    for (const auto& h : bc.halves) {
      if (h.stability == Stability::attracting) side = h.side;
    }
    if (side == 0) throw AssumptionViolation("the canard branch has no attracting half; give q0 explicitly");
    const HalfBranch hb(a.critical_set.branch(bc.branch), a.points.front().location, side, a.box);
    const auto p = hb.point_at(Rational(1, 2));
    if (!p) throw AssumptionViolation("cannot place a default q0 on the attracting half-branch; give q0 explicitly");
    if (p->is_exact()) {
      q0 = PlanePoint::from_exact((*p->exact)[0], (*p->exact)[1] + Rational(1, 10000));
    } else {
      q0 = PlanePoint::from_double(p->x(), p->y() + 1e-4);
    }
  }
  res.q0 = q0.approx;

  if (req.mode == SimulationMode::sweep) {
    res.t_end = req.t_end.value_or(1.0);
    const double d = req.delta.to_double();
    // The two step sizes are independent jobs.
    auto job = [&](double step) {
      return std::async(std::launch::async, [&a, &req, &res, step] {
        return shadowing_error(a.system.x0, a.system.x1, req.epsilon, res.q0, step, res.t_end);
      });
    };
    auto full = job(d);
    auto half = job(d / 2);
    res.shadowing.push_back(full.get());
    res.shadowing.push_back(half.get());
    res.shadowing_ratio = res.shadowing[1].max_deviation > 0
                              ? res.shadowing[0].max_deviation / res.shadowing[1].max_deviation
                              : std::numeric_limits<double>::infinity();
    return res;
  }

  res.t_end = req.t_end.value_or(1.5 / req.epsilon);
  if (res.t_end < 0) throw AssumptionViolation("t_end must be non-negative");
  const double tube = req.tube.value_or(default_tube_radius(req.epsilon));
  // Without an explicit radius the metric is also reported in a narrow tube.
  std::vector<double> radii{tube};
  if (!req.tube && tube != kNarrowTube) radii.push_back(kNarrowTube);
  const Rational eps_exact = req.epsilon_exact.value_or(Rational::from_double(req.epsilon));

  auto simulate = [&](const PolyVectorField& x1, EulerOrbit* orbit) {
    if (req.mode == SimulationMode::flow) {
      EventSpec ev;
      for (const auto& br : a.critical_set.branches) ev.tubes.push_back({&br, tube});
      if (!a.points.empty()) ev.singular_point = a.points.front().location.approx;
      ev.pass_radius = tube;
      return integrate_full(a.system.x0, x1, cfg, res.q0, res.t_end, ev);
    }
    if (res.t_end == 0.0) return Trajectory{};
    const EulerMap map(a.system.x0, x1, req.delta, eps_exact);
    const auto n = static_cast<std::size_t>(std::floor(res.t_end / req.delta.to_double() + 1e-9));
    return euler_trajectory(map, q0, n, orbit);
  };

  const bool want_metrics = !a.points.empty() && std::any_of(canard_branches.begin(), canard_branches.end(),
                                                               [](const BranchCanard* bc) {
                                                                 return std::any_of(bc->halves.begin(), bc->halves.end(),
                                                                                    [](const HalfBranchReport& h) {
                                                                                      return h.stability ==
                                                                                             Stability::repelling;
                                                                                    });
                                                               });
  // Comparison run with X1 rotated by 0.1 rad, alongside the main one.
  std::future<Trajectory> rotated_run;
  if (want_metrics) {
    rotated_run = std::async(std::launch::async, [&] { return simulate(rotated(a.system.x1, 0.1), nullptr); });
  }
  EulerOrbit orbit;
  res.trajectory = simulate(a.system.x1, &orbit);
  const Trajectory rot = want_metrics ? rotated_run.get() : Trajectory{};
  if (req.mode == SimulationMode::euler) {
    res.switched_to_float = orbit.switched_to_float;
    res.switch_index = orbit.switch_index;
  }
  if (!res.trajectory.diagnostic.empty()) res.warnings.push_back(res.trajectory.diagnostic);
  if (res.trajectory.empty() || a.points.empty()) return res;

  for (const BranchCanard* bc : canard_branches) {
    int repelling = 0;
    for (const auto& h : bc->halves) {
      if (h.stability == Stability::repelling) repelling = h.side;
    }
    if (repelling == 0) continue;
    const Branch& br = a.critical_set.branch(bc->branch);
    for (double radius : radii) {
      MetricEntry m;
      m.branch = bc->branch;
      m.repelling_side = repelling;
      m.tube = radius;
      m.metric = canard_metric(res.trajectory, br, a.points.front().location.approx, radius, repelling);
      m.rotated_metric = canard_metric(rot, br, a.points.front().location.approx, radius, repelling);
      m.separated = m.metric > 0.0 && m.metric >= 5.0 * m.rotated_metric;
      res.metrics.push_back(m);
    }
  }
  return res;
}

}  // namespace canardkit
