#include "canardkit/canard.hpp"

#include <algorithm>
#include <cmath>

#include "canardkit/error.hpp"

namespace canardkit {

namespace {

template <typename T>
std::vector<T> plane_point(const VarList& vars, const T& x, const T& y) {
  std::vector<T> pt(vars.size(), T(0));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i] == "x") pt[i] = x;
    if (vars[i] == "y") pt[i] = y;
  }
  return pt;
}

template <typename T>
T eval_planar(const MultiPoly& p, const T& x, const T& y) {
  const auto pt = plane_point<T>(p.vars(), x, y);
  return p.eval(std::span<const T>(pt));
}

int sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

std::array<Rational, 2> eval_field(const PolyVectorField& f, const Rational& x, const Rational& y) {
  if (f.size() != 2) throw AlgebraError("planar field must have two components");
  return {eval_planar(f[0], x, y), eval_planar(f[1], x, y)};
}

Vec2 eval_field(const PolyVectorField& f, double x, double y) {
  if (f.size() != 2) throw AlgebraError("planar field must have two components");
  return {eval_planar(f[0], x, y), eval_planar(f[1], x, y)};
}

std::array<Rational, 2> FastFrame::at(const Rational& x, const Rational& y) const {
  return {eval_planar(generator[0], x, y), eval_planar(generator[1], x, y)};
}

Vec2 FastFrame::at(double x, double y) const {
  return {eval_planar(generator[0], x, y), eval_planar(generator[1], x, y)};
}

Rational wedge(const std::array<Rational, 2>& u, const std::array<Rational, 2>& v) {
  return u[0] * v[1] - u[1] * v[0];
}

std::array<Rational, 2> tangent_at(const Branch& branch, const Rational& x, const Rational& y) {
  if (!branch.eval(x, y).is_zero()) {
    throw AlgebraError("point (" + x.to_string() + ", " + y.to_string() + ") is not on branch " +
                       branch.defining_poly.to_string());
  }
  const auto t = branch.tangent(x, y);
  if (t[0].is_zero() && t[1].is_zero()) {
    throw AlgebraError("branch " + branch.defining_poly.to_string() + " is singular at (" + x.to_string() + ", " +
                       y.to_string() + ")");
  }
  return t;
}

WedgeValue wedge_condition(const PolyVectorField& x1, const SingularPoint& ps, const Branch& branch) {
  WedgeValue w;
  if (ps.location.is_exact()) {
    const auto& [x, y] = *ps.location.exact;
    const auto v = eval_field(x1, x, y);
    if (v[0].is_zero() && v[1].is_zero()) {
      throw AssumptionViolation("X1 vanishes at the singular point; the assumption |X1(p_s)| = O(1) is violated");
    }
    const Rational d = wedge(v, tangent_at(branch, x, y));
    w.exact = d;
    w.approx = d.to_double();
    w.vanishes = d.is_zero();
    return w;
  }
  const Vec2 v = eval_field(x1, ps.location.x(), ps.location.y());
  if (norm(v) < 1e-12) {
    throw AssumptionViolation("X1 vanishes at the singular point; the assumption |X1(p_s)| = O(1) is violated");
  }
  const Vec2 t = branch.tangent(ps.location.x(), ps.location.y());
  w.approx = cross(v, t);
  w.vanishes = std::abs(w.approx) < 1e-10;
  return w;
}

ReducedFlowSample project_rho(const PolyVectorField& x1, const PlanePoint& p, const Branch& branch,
                              const FastFrame& frame) {
  ReducedFlowSample s;
  s.point = p;
  if (p.is_exact()) {
    const auto& [x, y] = *p.exact;
    const auto t = branch.tangent(x, y);
    const auto g = frame.at(x, y);
    const auto v = eval_field(x1, x, y);
    const Rational det = wedge(t, g);
    if (det.is_zero()) {
      s.well_defined = false;
      return s;
    }
    const Rational alpha = wedge(v, g) / det;
    const Rational beta = wedge(t, v) / det;
    s.exact_alpha = alpha;
    s.exact_beta = beta;
    s.tangent_component = alpha.to_double();
    s.fast_component = beta.to_double();
    const Rational r0 = v[0] - alpha * t[0] - beta * g[0];
    const Rational r1 = v[1] - alpha * t[1] - beta * g[1];
    s.residual = std::hypot(r0.to_double(), r1.to_double());
    if (!r0.is_zero() || !r1.is_zero()) throw AlgebraError("exact projection residual is nonzero");
    return s;
  }
  const Vec2 t = branch.tangent(p.x(), p.y());
  const Vec2 g = frame.at(p.x(), p.y());
  const Vec2 v = eval_field(x1, p.x(), p.y());
  const double det = cross(t, g);
  if (std::abs(det) <= 1e-14 * norm(t) * norm(g)) {
    s.well_defined = false;
    return s;
  }
  s.tangent_component = cross(v, g) / det;
  s.fast_component = cross(t, v) / det;
  s.residual = std::hypot(v[0] - s.tangent_component * t[0] - s.fast_component * g[0],
                          v[1] - s.tangent_component * t[1] - s.fast_component * g[1]);
  return s;
}

std::array<double, 2> rho_at_singular_point(const PolyVectorField& x1, const SingularPoint& ps) {
  if (ps.location.is_exact()) {
    const auto v = eval_field(x1, (*ps.location.exact)[0], (*ps.location.exact)[1]);
    return {v[0].to_double(), v[1].to_double()};
  }
  return eval_field(x1, ps.location.x(), ps.location.y());
}

std::vector<FrameViolation> validate_frame(const FastFrame& frame, const CriticalSet& cs, const SingularPoint& ps,
                                           const Box& box, int samples_per_half) {
  std::vector<FrameViolation> out;
  for (int id : ps.incident_branches) {
    const Branch& b = cs.branch(id);
    for (int side : {-1, 1}) {
      for (const auto& q : HalfBranch(b, ps.location, side, box).samples(samples_per_half)) {
        const Vec2 g = frame.at(q.x(), q.y());
        const Vec2 t = b.tangent(q.x(), q.y());
        if (norm(g) < 1e-12) {
          out.push_back({id, q.approx, "fast generator vanishes"});
        } else if (std::abs(cross(t, g)) < 1e-12 * norm(t) * norm(g)) {
          out.push_back({id, q.approx, "fast generator tangent to the branch"});
        }
      }
    }
  }
  return out;
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::attracting: return "attracting";
    case Stability::repelling: return "repelling";
    case Stability::mixed: return "mixed";
  }
  return "mixed";
}

std::vector<int> CanardReport::canard_branches() const {
  std::vector<int> ids;
  for (const auto& b : per_branch) {
    if (b.is_canard) ids.push_back(b.branch);
  }
  return ids;
}

namespace {

double trace_dx0(const CriticalSet& cs, double x, double y) {
  return eval_planar(differentiate(cs.x0[0], "x"), x, y) + eval_planar(differentiate(cs.x0[1], "y"), x, y);
}

double alpha_at(const PolyVectorField& x1, const Branch& b, const FastFrame& frame, const HalfBranch& hb, double s) {
  const auto q = hb.point_at(s);
  if (!q) return std::nan("");
  const auto r = project_rho(x1, PlanePoint::from_double((*q)[0], (*q)[1]), b, frame);
  return r.well_defined ? r.tangent_component : std::nan("");
}

HalfBranchReport scan_half(const PolyVectorField& x1, const CriticalSet& cs, const Branch& b, const FastFrame& frame,
                           const HalfBranch& hb) {
  HalfBranchReport rep;
  rep.side = hb.side();

  // Reduced flow on 64 samples, with bisection on sign changes.
  const auto pts = hb.samples(64);
  const double len = hb.length();
  std::vector<double> alphas;
  for (const auto& q : pts) {
    const auto r = project_rho(x1, q, b, frame);
    alphas.push_back(r.well_defined ? r.tangent_component : std::nan(""));
  }
  double sum = 0.0;
  int finite = 0;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    if (!std::isfinite(alphas[k])) continue;
    sum += alphas[k];
    ++finite;
    if (std::abs(alphas[k]) < 1e-10) {
      rep.reduced_flow_equilibria.push_back(pts[k].approx);
      continue;
    }
    if (k + 1 < alphas.size() && std::isfinite(alphas[k + 1]) && std::abs(alphas[k + 1]) >= 1e-10 &&
        sign(alphas[k]) != sign(alphas[k + 1])) {
      double lo = len * static_cast<double>(k + 1) / static_cast<double>(pts.size());
      double hi = len * static_cast<double>(k + 2) / static_cast<double>(pts.size());
      double flo = alphas[k];
      for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = alpha_at(x1, b, frame, hb, mid);
        if (!std::isfinite(fm)) break;
        if (sign(fm) == sign(flo)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      if (auto q = hb.point_at(0.5 * (lo + hi))) rep.reduced_flow_equilibria.push_back(*q);
    }
  }
  rep.mean_alpha = finite > 0 ? sum / finite : 0.0;

  // Transverse eigenvalue trace(DX0) on 8 samples.
  bool neg = true;
  bool pos = true;
  for (const auto& q : hb.samples(8)) {
    const double lam = trace_dx0(cs, q.x(), q.y());
    rep.transverse_eigenvalues.push_back(lam);
    neg = neg && lam < 0.0;
    pos = pos && lam > 0.0;
  }
  if (rep.transverse_eigenvalues.empty()) {
    rep.stability = Stability::mixed;
  } else {
    rep.stability = neg ? Stability::attracting : (pos ? Stability::repelling : Stability::mixed);
  }
  return rep;
}

}  // namespace

CanardReport detect_singular_canards(const PolyVectorField& x1, const CriticalSet& cs, const SingularPoint& ps,
                                     const FastFrame& frame, const Box& box) {
  if (!ps.pairwise_transversal) {
    throw AssumptionViolation("singular point is not pairwise transversal; intersection number exceeds one");
  }
  CanardReport report;
  report.singular_point = ps;
  const Vec2 x1_ps = rho_at_singular_point(x1, ps);
  for (int id : ps.incident_branches) {
    const Branch& b = cs.branch(id);
    BranchCanard bc;
    bc.branch = id;
    bc.wedge = wedge_condition(x1, ps, b);
    Vec2 t{};
    if (ps.location.is_exact()) {
      bc.tangent_at_ps = tangent_at(b, (*ps.location.exact)[0], (*ps.location.exact)[1]);
      t = {bc.tangent_at_ps[0].to_double(), bc.tangent_at_ps[1].to_double()};
    } else {
      t = b.tangent(ps.location.x(), ps.location.y());
      bc.tangent_approx = t;
    }
    bc.is_canard = bc.wedge.vanishes;
    for (int k = 0; k < 2; ++k) {
      const HalfBranch hb(b, ps.location, k == 0 ? -1 : 1, box);
      bc.halves[k] = scan_half(x1, cs, b, frame, hb);
      for (const auto& e : bc.halves[k].reduced_flow_equilibria) bc.reduced_flow_equilibria_found.push_back(e);
    }
    // The flow at p_s runs along +t when X1(p_s) . t > 0.
    const int along = sign(dot(x1_ps, t));
    const auto& from = bc.halves[along >= 0 ? 0 : 1];
    const auto& to = bc.halves[along >= 0 ? 1 : 0];
    if (along != 0 && from.stability == Stability::attracting && to.stability == Stability::repelling) {
      bc.orientation_note = "attracting->repelling";
    } else if (along != 0 && from.stability == Stability::repelling && to.stability == Stability::attracting) {
      bc.orientation_note = "repelling->attracting";
    } else {
      bc.orientation_note = "mixed";
    }
    report.per_branch.push_back(std::move(bc));
  }
  return report;
}

}  // namespace canardkit
