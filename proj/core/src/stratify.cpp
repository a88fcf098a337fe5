#include "canardkit/stratify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "canardkit/error.hpp"
#include "canardkit/univariate.hpp"

namespace canardkit {

void Box::validate() const {
  if (!(xmin < xmax) || !(ymin < ymax)) throw AssumptionViolation("analysis box must have positive area");
}

std::string Box::to_string() const {
  return "[" + xmin.to_string() + ", " + xmax.to_string() + "] x [" + ymin.to_string() + ", " + ymax.to_string() +
         "]";
}

Branch::Branch(int branch_id, MultiPoly f, bool irreducible)
    : id(branch_id),
      defining_poly(std::move(f)),
      gradient{differentiate(defining_poly, "x"), differentiate(defining_poly, "y")},
      proven_irreducible(irreducible),
      f_(defining_poly),
      fx_(gradient[0]),
      fy_(gradient[1]) {
  if (!(defining_poly.vars() == default_vars())) throw AlgebraError("branch polynomials must be over {x, y, eps}");
}

namespace {

std::array<Rational, 3> exact_xy(const Rational& x, const Rational& y) { return {x, y, Rational(0)}; }
std::array<double, 3> float_xy(double x, double y) { return {x, y, 0.0}; }

}  // namespace

Rational Branch::eval(const Rational& x, const Rational& y) const {
  return defining_poly.eval(std::span<const Rational>(exact_xy(x, y)));
}

double Branch::eval(double x, double y) const { return f_(float_xy(x, y)); }

std::array<Rational, 2> Branch::grad(const Rational& x, const Rational& y) const {
  const auto pt = exact_xy(x, y);
  return {gradient[0].eval(std::span<const Rational>(pt)), gradient[1].eval(std::span<const Rational>(pt))};
}

Vec2 Branch::grad(double x, double y) const {
  const auto pt = float_xy(x, y);
  return {fx_(pt), fy_(pt)};
}

std::array<Rational, 2> Branch::tangent(const Rational& x, const Rational& y) const {
  const auto g = grad(x, y);
  return {-g[1], g[0]};
}

Vec2 Branch::tangent(double x, double y) const {
  const auto g = grad(x, y);
  return {-g[1], g[0]};
}

const Branch& CriticalSet::branch(int id) const {
  for (const auto& b : branches) {
    if (b.id == id) return b;
  }
  throw AlgebraError("no branch with id " + std::to_string(id));
}

MultiPoly odd_power_rescale(const MultiPoly& f, const Factorization& factors) {
  MultiPoly divisor = MultiPoly::constant(f.vars(), Rational(1));
  for (const auto& factor : factors.factors) {
    if (factor.multiplicity % 2 == 0) {
      throw AssumptionViolation("even multiplicity " + std::to_string(factor.multiplicity) + " of factor " +
                                factor.poly.to_string() + "; the odd-power rescaling does not apply");
    }
    if (factor.multiplicity > 1) divisor = divisor * factor.poly.with_vars(f.vars()).pow(factor.multiplicity - 1);
  }
  auto q = exact_divide(f, divisor);
  if (!q) throw AlgebraError("factorization does not divide " + f.to_string());
  return *q;
}

namespace {

void check_planar(const PolyVectorField& x0) {
  if (x0.size() != 2) throw AlgebraError("X0 must have two components");
  for (const auto& c : x0.components) {
    for (std::size_t i = 0; i < c.vars().size(); ++i) {
      const auto& name = c.vars()[i];
      if (name != "x" && name != "y" && c.involves(i)) {
        throw AlgebraError("X0 may only depend on x and y, found '" + name + "'");
      }
    }
  }
}

void add_branches(CriticalSet& cs, const Factorization& f) {
  int id = 1;
  for (const auto& factor : f.factors) {
    cs.branches.emplace_back(id++, factor.poly.with_vars(default_vars()), factor.irreducible);
    if (!factor.irreducible) {
      cs.warnings.push_back("factor " + factor.poly.to_string() +
                            " could not be split further and is treated as one branch");
    }
  }
}

}  // namespace

CriticalSet build_critical_set(const PolyVectorField& x0_in) {
  check_planar(x0_in);
  if (x0_in.is_zero()) throw AssumptionViolation("X0 is identically zero");
  const VarList& vars = default_vars();
  const MultiPoly a = x0_in[0].with_vars(vars);
  const MultiPoly b = x0_in[1].with_vars(vars);
  const MultiPoly one = MultiPoly::constant(vars, Rational(1));
  const MultiPoly zero(vars);

  CriticalSet cs;
  cs.standard_form = a.is_zero() || b.is_zero();

  if (cs.standard_form) {
    const MultiPoly& p = a.is_zero() ? b : a;
    if (p.is_constant()) {
      cs.x0 = PolyVectorField({a, b});
      cs.common_poly = one;
      cs.fast_cofactor = {a, b};
      return cs;
    }
    const Factorization f = squarefree_factor(p);
    const MultiPoly rescaled = odd_power_rescale(p, f);
    cs.rescaled = !(rescaled == p);
    cs.common_poly = rescaled;
    cs.fast_cofactor = a.is_zero() ? std::array<MultiPoly, 2>{zero, one} : std::array<MultiPoly, 2>{one, zero};
    cs.x0 = a.is_zero() ? PolyVectorField({zero, rescaled}) : PolyVectorField({rescaled, zero});
    add_branches(cs, f);
  } else {
    const MultiPoly g = gcd_poly(a, b);
    if (g.is_constant()) {
      cs.x0 = PolyVectorField({a, b});
      cs.common_poly = one;
      cs.fast_cofactor = {a, b};
      return cs;
    }
    const Factorization f = squarefree_factor(g);
    const MultiPoly g_rescaled = odd_power_rescale(g, f);
    const MultiPoly divisor = *exact_divide(g, g_rescaled);
    cs.rescaled = !divisor.is_constant();
    const MultiPoly ar = *exact_divide(a, divisor);
    const MultiPoly br = *exact_divide(b, divisor);
    cs.common_poly = g_rescaled;
    cs.fast_cofactor = {*exact_divide(ar, g_rescaled), *exact_divide(br, g_rescaled)};
    cs.x0 = PolyVectorField({ar, br});
    add_branches(cs, f);
  }
  cs.singular = !cs.common_poly.is_constant();
  if (cs.rescaled) cs.warnings.push_back("odd powers of common factors were rescaled away");
  return cs;
}

namespace {

std::size_t ix() { return 0; }
std::size_t iy() { return 1; }

MultiPoly bind_x(const MultiPoly& p, const Rational& x) {
  return substitute(p, {{"x", MultiPoly::constant(default_vars(), x)}}, default_vars());
}

UniPoly in_y(const MultiPoly& p) { return UniPoly::from_multi(p, iy()); }

// Newton polish of F_i = F_j = 0 from (x, y).
std::optional<Vec2> newton2(const Branch& bi, const Branch& bj, Vec2 p) {
  for (int it = 0; it < 60; ++it) {
    const double f1 = bi.eval(p[0], p[1]);
    const double f2 = bj.eval(p[0], p[1]);
    const Vec2 g1 = bi.grad(p[0], p[1]);
    const Vec2 g2 = bj.grad(p[0], p[1]);
    const double det = g1[0] * g2[1] - g1[1] * g2[0];
    if (det == 0.0) break;
    const double dx = (f1 * g2[1] - f2 * g1[1]) / det;
    const double dy = (g1[0] * f2 - g2[0] * f1) / det;
    p[0] -= dx;
    p[1] -= dy;
    if (std::abs(dx) + std::abs(dy) < 1e-16) break;
  }
  if (std::abs(bi.eval(p[0], p[1])) < 1e-12 && std::abs(bj.eval(p[0], p[1])) < 1e-12) return p;
  return std::nullopt;
}

bool same_point(const PlanePoint& a, const PlanePoint& b) {
  if (a.is_exact() && b.is_exact()) return *a.exact == *b.exact;
  return std::abs(a.x() - b.x()) < 1e-9 && std::abs(a.y() - b.y()) < 1e-9;
}

std::vector<PlanePoint> intersect(const Branch& bi, const Branch& bj, const Box& box) {
  const MultiPoly res = resultant(bi.defining_poly, bj.defining_poly, "y");
  if (res.is_zero()) {
    throw AlgebraError("branches " + bi.defining_poly.to_string() + " and " + bj.defining_poly.to_string() +
                       " share a component");
  }
  std::vector<PlanePoint> out;
  if (res.is_constant()) return out;
  const Rational width(1, 1000000000000L);
  const auto xroots = isolate_real_roots(UniPoly::from_multi(res, ix()), box.xmin, box.xmax, width);
  for (const auto& xr : xroots) {
    if (xr.exact) {
      const UniPoly ui = in_y(bind_x(bi.defining_poly, xr.lo));
      const UniPoly uj = in_y(bind_x(bj.defining_poly, xr.lo));
      UniPoly g = gcd(ui, uj);
      if (ui.is_zero()) g = uj;
      if (uj.is_zero()) g = ui;
      if (g.is_zero()) {
        throw AlgebraError("branches share the vertical line x = " + xr.lo.to_string());
      }
      if (g.degree() <= 0) continue;
      for (const auto& yr : isolate_real_roots(g, box.ymin, box.ymax, width)) {
        if (yr.exact) {
          out.push_back(PlanePoint::from_exact(xr.lo, yr.lo));
        } else if (auto p = newton2(bi, bj, {xr.lo.to_double(), yr.approx()})) {
          out.push_back(PlanePoint::from_double((*p)[0], (*p)[1]));
        }
      }
    } else {
      // Irrational abscissa: candidate ordinates from branch i at the midpoint, then polish.
      const UniPoly ui = in_y(bind_x(bi.defining_poly, xr.midpoint()));
      if (ui.degree() <= 0) continue;
      for (const auto& yr : isolate_real_roots(ui, box.ymin - Rational(1), box.ymax + Rational(1), width)) {
        auto p = newton2(bi, bj, {xr.approx(), yr.approx()});
        if (!p || !box.contains((*p)[0], (*p)[1])) continue;
        PlanePoint cand = PlanePoint::from_double((*p)[0], (*p)[1]);
        bool dup = false;
        for (const auto& q : out) dup = dup || same_point(q, cand);
        if (!dup) out.push_back(cand);
      }
    }
  }
  return out;
}

double gradient_det(const Branch& bi, const Branch& bj, const PlanePoint& p, bool& exact_zero) {
  if (p.is_exact()) {
    const auto& [x, y] = *p.exact;
    const auto gi = bi.grad(x, y);
    const auto gj = bj.grad(x, y);
    const Rational d = gi[0] * gj[1] - gi[1] * gj[0];
    exact_zero = d.is_zero();
    return d.to_double();
  }
  const Vec2 gi = bi.grad(p.x(), p.y());
  const Vec2 gj = bj.grad(p.x(), p.y());
  const double d = cross(gi, gj);
  exact_zero = std::abs(d) < 1e-10;
  return d;
}

}  // namespace

std::vector<SingularPoint> find_singular_points(const CriticalSet& cs, const Box& box) {
  box.validate();
  std::vector<SingularPoint> points;
  for (std::size_t i = 0; i < cs.branches.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.branches.size(); ++j) {
      for (const auto& loc : intersect(cs.branches[i], cs.branches[j], box)) {
        auto it = std::find_if(points.begin(), points.end(),
                               [&](const SingularPoint& s) { return same_point(s.location, loc); });
        if (it == points.end()) {
          points.push_back(SingularPoint{loc, {}, true, {}});
          it = points.end() - 1;
        }
        for (int id : {cs.branches[i].id, cs.branches[j].id}) {
          if (std::find(it->incident_branches.begin(), it->incident_branches.end(), id) ==
              it->incident_branches.end()) {
            it->incident_branches.push_back(id);
          }
        }
      }
    }
  }
  for (auto& sp : points) {
    std::sort(sp.incident_branches.begin(), sp.incident_branches.end());
    sp.pairwise_transversal = true;
    sp.determinants.clear();
    for (std::size_t a = 0; a < sp.incident_branches.size(); ++a) {
      for (std::size_t b = a + 1; b < sp.incident_branches.size(); ++b) {
        bool zero = false;
        sp.determinants.push_back(
            gradient_det(cs.branch(sp.incident_branches[a]), cs.branch(sp.incident_branches[b]), sp.location, zero));
        if (zero) sp.pairwise_transversal = false;
      }
    }
  }
  std::sort(points.begin(), points.end(), [](const SingularPoint& a, const SingularPoint& b) {
    return a.location.approx < b.location.approx;
  });
  return points;
}

HalfBranch::HalfBranch(const Branch& branch, const PlanePoint& origin, int side, const Box& box)
    : branch_(&branch), origin_(origin), side_(side), box_(box) {
  Vec2 t = branch.tangent(origin.x(), origin.y());
  if (origin.is_exact()) {
    const auto te = branch.tangent((*origin.exact)[0], (*origin.exact)[1]);
    t = {te[0].to_double(), te[1].to_double()};
  }
  if (t[0] == 0.0 && t[1] == 0.0) throw AlgebraError("branch is singular at the walk origin");
  walk_ = std::abs(t[0]) >= std::abs(t[1]) ? 0 : 1;
  const std::size_t other = 1 - walk_;
  direction_ = (t[walk_] > 0 ? 1.0 : -1.0) * side;
  slope_ = t[other] / t[walk_];
  const double c0 = origin.approx[walk_];
  const double lo = walk_ == 0 ? box.xmin.to_double() : box.ymin.to_double();
  const double hi = walk_ == 0 ? box.xmax.to_double() : box.ymax.to_double();
  length_ = std::max(0.0, direction_ > 0 ? hi - c0 : c0 - lo);
}

double HalfBranch::solve_other(double c, double guess) const {
  double o = guess;
  for (int it = 0; it < 50; ++it) {
    const double x = walk_ == 0 ? c : o;
    const double y = walk_ == 0 ? o : c;
    const double f = branch_->eval(x, y);
    const double d = branch_->grad(x, y)[1 - walk_];
    if (d == 0.0 || !std::isfinite(d)) return std::nan("");
    const double step = f / d;
    o -= step;
    if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(o))) break;
  }
  return o;
}

std::optional<Vec2> HalfBranch::point_at(double s) const {
  if (!(s > 0.0) || s > length_ * (1 + 1e-12)) return std::nullopt;
  const double c0 = origin_.approx[walk_];
  const double o0 = origin_.approx[1 - walk_];
  const int steps = std::max(8, static_cast<int>(std::ceil(s / 0.005)));
  double o = o0;
  double slope = slope_;
  double c_prev = c0;
  for (int k = 1; k <= steps; ++k) {
    const double c = c0 + direction_ * s * k / steps;
    o = solve_other(c, o + slope * (c - c_prev));
    if (!std::isfinite(o)) return std::nullopt;
    const double x = walk_ == 0 ? c : o;
    const double y = walk_ == 0 ? o : c;
    const Vec2 g = branch_->grad(x, y);
    if (std::abs(g[1 - walk_]) < 1e-14) return std::nullopt;
    slope = -g[walk_] / g[1 - walk_];
    c_prev = c;
  }
  const double c = c0 + direction_ * s;
  Vec2 p = walk_ == 0 ? Vec2{c, o} : Vec2{o, c};
  if (!box_.contains(p[0], p[1], 1e-12)) return std::nullopt;
  return p;
}

std::optional<PlanePoint> HalfBranch::point_at(const Rational& s) const {
  auto approx = point_at(s.to_double());
  if (!approx) return std::nullopt;
  if (!origin_.is_exact()) return PlanePoint::from_double((*approx)[0], (*approx)[1]);
  const Rational c = (*origin_.exact)[walk_] + (direction_ > 0 ? s : -s);
  const VarList& vars = default_vars();
  const MultiPoly bound =
      substitute(branch_->defining_poly, {{walk_ == 0 ? "x" : "y", MultiPoly::constant(vars, c)}}, vars);
  const UniPoly u = UniPoly::from_multi(bound, 1 - walk_);
  for (const auto& r : rational_roots(u)) {
    if (std::abs(r.to_double() - (*approx)[1 - walk_]) < 1e-9) {
      return walk_ == 0 ? PlanePoint::from_exact(c, r) : PlanePoint::from_exact(r, c);
    }
  }
  return PlanePoint::from_double((*approx)[0], (*approx)[1]);
}

std::vector<PlanePoint> HalfBranch::samples(int n) const {
  std::vector<PlanePoint> out;
  if (length_ <= 0.0) return out;
  // Rational step that never overshoots the box.
  const Rational len = Rational::from_double(length_);
  for (int k = 1; k <= n; ++k) {
    if (auto p = point_at(len * Rational(k, n))) out.push_back(*p);
  }
  return out;
}

std::size_t Stratification::count(int dimension) const {
  return static_cast<std::size_t>(
      std::count_if(strata.begin(), strata.end(), [&](const Stratum& s) { return s.dimension == dimension; }));
}

const char* to_string(Stratification::Kind kind) {
  return kind == Stratification::Kind::whitney ? "whitney" : "relaxed";
}

namespace {

// rank of DX0 at a point of C (maximal means 1).
bool rank_is_one(const PolyVectorField& x0, const PlanePoint& p) {
  const VarList& vars = default_vars();
  int rank_witness = 0;
  if (p.is_exact()) {
    const std::array<Rational, 3> pt{(*p.exact)[0], (*p.exact)[1], Rational(0)};
    for (const auto& c : x0.components) {
      for (const char* v : {"x", "y"}) {
        if (!differentiate(c.with_vars(vars), v).eval(std::span<const Rational>(pt)).is_zero()) rank_witness = 1;
      }
    }
    return rank_witness == 1;  // a 2x2 Jacobian on a curve of zeros has rank <= 1
  }
  const std::array<double, 3> pt{p.x(), p.y(), 0.0};
  double biggest = 0.0;
  for (const auto& c : x0.components) {
    for (const char* v : {"x", "y"}) {
      biggest = std::max(biggest, std::abs(differentiate(c.with_vars(vars), v).eval(std::span<const double>(pt))));
    }
  }
  return biggest > 1e-12;
}

}  // namespace

Stratification whitney_stratify(const CriticalSet& cs, const SingularPoint& p, const Box& box) {
  if (!p.pairwise_transversal) {
    throw AssumptionViolation("singular point is not pairwise transversal; intersection number exceeds one");
  }
  Stratification ws;
  ws.kind = Stratification::Kind::whitney;
  ws.point = p;
  ws.strata.push_back(Stratum{0, 0, 0, 0, true, {}, true});
  int next = 1;
  for (int id : p.incident_branches) {
    const Branch& b = cs.branch(id);
    for (int side : {-1, 1}) {
      Stratum s{next++, 1, id, side, false, {0}, true};
      const HalfBranch hb(b, p.location, side, box);
      for (const auto& q : hb.samples(16)) s.rank_maximal = s.rank_maximal && rank_is_one(cs.x0, q);
      ws.strata.push_back(s);
    }
  }
  return ws;
}

Stratification whitney_stratify(const CriticalSet& cs) {
  Stratification ws;
  ws.kind = Stratification::Kind::whitney;
  int next = 1;
  for (const auto& b : cs.branches) ws.strata.push_back(Stratum{next++, 1, b.id, 0, false, {}, true});
  return ws;
}

std::vector<Stratification> relaxed_stratifications(const Stratification& ws) {
  const bool has_point = std::any_of(ws.strata.begin(), ws.strata.end(),
                                     [](const Stratum& s) { return s.dimension == 0; });
  if (!has_point) {
    Stratification id = ws;
    id.kind = Stratification::Kind::relaxed;
    return {id};
  }
  std::vector<int> branch_ids;
  for (const auto& s : ws.strata) {
    if (s.dimension == 1 && std::find(branch_ids.begin(), branch_ids.end(), s.branch) == branch_ids.end()) {
      branch_ids.push_back(s.branch);
    }
  }
  std::vector<Stratification> out;
  for (int joined : branch_ids) {
    Stratification rs;
    rs.kind = Stratification::Kind::relaxed;
    rs.point = ws.point;
    int next = 1;
    bool rank = true;
    for (const auto& s : ws.strata) {
      if (s.dimension == 1 && s.branch == joined) rank = rank && s.rank_maximal;
    }
    rs.strata.push_back(Stratum{next++, 1, joined, 0, true, {}, rank});
    for (const auto& s : ws.strata) {
      if (s.dimension == 1 && s.branch != joined) {
        Stratum copy = s;
        copy.id = next++;
        copy.closure_links.clear();
        rs.strata.push_back(copy);
      }
    }
    out.push_back(std::move(rs));
  }
  return out;
}

}  // namespace canardkit
