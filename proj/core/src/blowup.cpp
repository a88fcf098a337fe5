#include "canardkit/blowup.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "canardkit/ode.hpp"

namespace canardkit {

namespace {

constexpr double kPi = std::numbers::pi;

std::string component_name(const VarList& vars, std::size_t i) { return "d" + vars[i] + "/dt"; }

}  // namespace

void Weights::validate() const {
  if (ax == 0 || ay == 0 || ae == 0) throw AssumptionViolation("blow-up weights must be positive");
  if (std::gcd(std::gcd(ax, ay), ae) != 1) throw AssumptionViolation("blow-up weights must have gcd 1");
}

Weights Weights::parse(const std::string& text) {
  Weights w;
  std::array<unsigned*, 3> slots{&w.ax, &w.ay, &w.ae};
  std::stringstream ss(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(ss, item, ',')) {
    if (n == 3) throw AssumptionViolation("weights need exactly three entries: '" + text + "'");
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      throw AssumptionViolation("weights must be integers: '" + text + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size() || v <= 0) throw AssumptionViolation("weights must be positive integers: '" + text + "'");
    *slots[n++] = static_cast<unsigned>(v);
  }
  if (n != 3) throw AssumptionViolation("weights need exactly three entries: '" + text + "'");
  w.validate();
  return w;
}

std::string Weights::to_string() const {
  return std::to_string(ax) + "," + std::to_string(ay) + "," + std::to_string(ae);
}

PolyVectorField extend_field(const PolyVectorField& x0, const PolyVectorField& x1) {
  if (x0.size() != 2 || x1.size() != 2) throw AlgebraError("extend_field needs planar X0 and X1");
  const VarList& vars = default_vars();
  const MultiPoly eps = MultiPoly::variable(vars, "eps");
  return PolyVectorField({x0[0].with_vars(vars) + eps * x1[0].with_vars(vars),
                          x0[1].with_vars(vars) + eps * x1[1].with_vars(vars), MultiPoly(vars)});
}

int division_exponent(const PolyVectorField& field, std::span<const unsigned> weights,
                      std::optional<std::size_t> parameter) {
  const VarList& vars = field.vars();
  if (field.size() != weights.size() || vars.size() != weights.size()) {
    throw AlgebraError("weighted blow-up needs one weight and one component per variable");
  }
  const std::size_t n = weights.size();
  std::vector<int> free_order(n, INT_MAX);
  std::vector<int> param_order(n, INT_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [e, c] : field[i].terms()) {
      int d = 0;
      for (std::size_t j = 0; j < n; ++j) d += static_cast<int>(weights[j] * e[j]);
      d -= static_cast<int>(weights[i]);
      auto& slot = (parameter && e[*parameter] > 0) ? param_order[i] : free_order[i];
      slot = std::min(slot, d);
    }
  }
  const int m_free = *std::min_element(free_order.begin(), free_order.end());
  if (parameter) {
    for (std::size_t i = 0; i < n; ++i) {
      if (param_order[i] < m_free) {
        throw WeightError(component_name(vars, i),
                          "terms in " + vars[*parameter] + " have weighted order " + std::to_string(param_order[i]) +
                              (m_free == INT_MAX ? std::string(" while the remaining part vanishes")
                                                 : " below the order " + std::to_string(m_free) +
                                                       " of the " + vars[*parameter] + "-free part"));
      }
    }
  }
  int m = INT_MAX;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int o = std::min(free_order[i], param_order[i]);
    if (o < m) {
      m = o;
      arg = i;
    }
  }
  if (m == INT_MAX) throw WeightError("all", "the field vanishes identically");
  if (m < 1) {
    throw WeightError(component_name(vars, arg), "weighted order " + std::to_string(m) + " leaves no power of r to divide");
  }
  return m;
}

int division_exponent(const PolyVectorField& xhat, const Weights& w) {
  const auto a = w.as_array();
  return division_exponent(xhat, a, xhat.vars().require("eps"));
}

const char* to_string(ChartId c) {
  switch (c) {
    case ChartId::x_plus: return "x+";
    case ChartId::x_minus: return "x-";
    case ChartId::y_plus: return "y+";
    case ChartId::y_minus: return "y-";
    case ChartId::eps: return "eps";
  }
  return "?";
}

std::optional<ChartId> parse_chart(const std::string& name) {
  for (auto c : kAllCharts) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

const VarList& chart_vars() {
  static const VarList vars{"r", "u", "v"};
  return vars;
}

namespace {

MultiPoly r_power(unsigned k) {
  Exponents e{k, 0, 0};
  return MultiPoly::monomial(chart_vars(), e, Rational(1));
}

struct Laurent {
  MultiPoly num;
  int shift = 0;  // value = num / r^shift
};

}  // namespace

BlownUpChart chart_field(const PolyVectorField& xhat_in, const Weights& w, ChartId chart) {
  w.validate();
  if (xhat_in.size() != 3) throw AlgebraError("chart_field needs a three-component field over {x, y, eps}");
  const VarList& dv = default_vars();
  const PolyVectorField xhat({xhat_in[0].with_vars(dv), xhat_in[1].with_vars(dv), xhat_in[2].with_vars(dv)});
  const int m = division_exponent(xhat, w);

  const VarList& cv = chart_vars();
  const MultiPoly r = MultiPoly::variable(cv, "r");
  const MultiPoly u = MultiPoly::variable(cv, "u");
  const MultiPoly v = MultiPoly::variable(cv, "v");
  const auto a = w.as_array();

  // fixed: index of the coordinate pinned to +-1; coord[j]: chart variable of the others.
  std::size_t fixed = 2;
  int sigma = 1;
  std::array<const MultiPoly*, 3> coord{&u, &v, nullptr};
  switch (chart) {
    case ChartId::eps: fixed = 2; coord = {&u, &v, nullptr}; break;
    case ChartId::x_plus: fixed = 0; coord = {nullptr, &v, &u}; break;
    case ChartId::x_minus: fixed = 0; sigma = -1; coord = {nullptr, &v, &u}; break;
    case ChartId::y_plus: fixed = 1; coord = {&u, nullptr, &v}; break;
    case ChartId::y_minus: fixed = 1; sigma = -1; coord = {&u, nullptr, &v}; break;
  }

  BlownUpChart out;
  out.chart = chart;
  out.division_exponent = m;
  std::map<std::string, MultiPoly> bind;
  for (std::size_t j = 0; j < 3; ++j) {
    MultiPoly map_j = r_power(a[j]);
    if (j == fixed) {
      map_j = map_j * Rational(sigma);
    } else {
      map_j = map_j * *coord[j];
    }
    out.blowup_map[j] = map_j;
    bind.emplace(dv[j], map_j);
  }
  std::array<MultiPoly, 3> p;
  for (std::size_t j = 0; j < 3; ++j) p[j] = substitute(xhat[j], bind, cv);

  // R = r'/r = sigma * P_fixed / (a_fixed r^a_fixed).
  const Rational rf = Rational(sigma) / Rational(static_cast<long>(a[fixed]));
  Laurent rdot{p[fixed] * rf, static_cast<int>(a[fixed]) - 1};
  std::array<Laurent, 2> angular;
  std::array<std::size_t, 2> angular_src{};
  std::size_t slot = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    if (j == fixed) continue;
    const unsigned k = std::max(a[j], a[fixed]);
    MultiPoly num = p[j] * r_power(k - a[j]) -
                    p[fixed] * *coord[j] * r_power(k - a[fixed]) * (Rational(static_cast<long>(a[j])) * rf);
    angular[slot] = Laurent{num, static_cast<int>(k)};
    angular_src[slot++] = j;
  }
  // Chart order (r, u, v): u and v are whichever coordinates the chart assigned.
  std::array<Laurent, 3> comps;
  comps[0] = rdot;
  for (std::size_t s = 0; s < 2; ++s) comps[coord[angular_src[s]] == &u ? 1 : 2] = angular[s];

  const std::array<std::string, 3> names{"dr/dt", "du/dt", "dv/dt"};
  int min_val = INT_MAX;
  std::vector<MultiPoly> field;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& c = comps[i];
    if (c.num.is_zero()) {
      field.push_back(MultiPoly(cv));
      continue;
    }
    const int val = static_cast<int>(r_valuation(c.num, "r")) - c.shift;
    min_val = std::min(min_val, val);
    if (val < m) {
      throw WeightError(names[i] + " in chart " + std::string(to_string(chart)),
                        "keeps r^" + std::to_string(val) + " after dividing by r^" + std::to_string(m));
    }
    const int total = c.shift + m;
    field.push_back(total >= 0 ? divide_by_power(c.num, "r", static_cast<unsigned>(total))
                               : c.num * r_power(static_cast<unsigned>(-total)));
  }
  out.field = PolyVectorField(std::move(field));
  out.chart_valuation = min_val == INT_MAX ? m : min_val;
  return out;
}

PushforwardCheck check_pushforward(const BlownUpChart& chart, const PolyVectorField& xhat_in, int samples,
                                   unsigned long long seed) {
  const VarList& dv = default_vars();
  const VarList& cv = chart_vars();
  std::array<std::array<MultiPoly, 3>, 3> jac;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) jac[i][j] = differentiate(chart.blowup_map[i], j);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> rnum(1, 100);
  std::uniform_int_distribution<long> anum(-40, 40);
  std::uniform_int_distribution<long> aden(1, 13);
  PushforwardCheck check;
  for (int s = 0; s < samples; ++s) {
    const std::array<Rational, 3> q{Rational(rnum(rng), 10000), Rational(anum(rng), aden(rng)),
                                    Rational(anum(rng), aden(rng))};
    std::array<Rational, 3> xyz;
    for (std::size_t i = 0; i < 3; ++i) xyz[i] = chart.blowup_map[i].eval(std::span<const Rational>(q));
    std::array<Rational, 3> chart_val;
    for (std::size_t i = 0; i < 3; ++i) chart_val[i] = chart.field[i].eval(std::span<const Rational>(q));
    const Rational rm = q[0].pow(chart.division_exponent);
    bool ok = true;
    for (std::size_t i = 0; i < 3; ++i) {
      Rational pushed;
      for (std::size_t j = 0; j < 3; ++j) pushed += jac[i][j].eval(std::span<const Rational>(q)) * chart_val[j];
      const Rational target = xhat_in[i].with_vars(dv).eval(std::span<const Rational>(xyz));
      ok = ok && pushed * rm == target;
    }
    (void)cv;
    ++check.samples;
    if (!ok) ++check.failures;
  }
  return check;
}

WeightedSphere::WeightedSphere(const PolyVectorField& field, std::vector<unsigned> weights,
                               std::optional<std::size_t> parameter)
    : weights_(std::move(weights)) {
  m_ = canardkit::division_exponent(field, weights_, parameter);
  const std::size_t n = weights_.size();
  for (std::size_t i = 0; i < n; ++i) {
    MultiPoly g(field.vars());
    for (const auto& [e, c] : field[i].terms()) {
      int d = 0;
      for (std::size_t j = 0; j < n; ++j) d += static_cast<int>(weights_[j] * e[j]);
      if (d - static_cast<int>(weights_[i]) == m_) g.add_term(e, c);
    }
    principal_.push_back(g);
    compiled_.emplace_back(g);
  }
}

std::vector<double> WeightedSphere::zeta(std::span<const double> z) const {
  const std::size_t n = weights_.size();
  std::vector<double> g(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = compiled_[i](z);
    num += z[i] * g[i];
    den += weights_[i] * z[i] * z[i];
  }
  const double rho = num / den;
  for (std::size_t i = 0; i < n; ++i) g[i] -= rho * weights_[i] * z[i];
  return g;
}

namespace {

std::array<double, 3> unit_vector(double theta, double phi) {
  return {std::cos(theta) * std::sin(phi), std::sin(theta) * std::sin(phi), std::cos(phi)};
}

std::array<double, 2> angular_rates(const std::vector<double>& zeta, double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
  return {(-st * zeta[0] + ct * zeta[1]) / sp, ct * cp * zeta[0] + st * cp * zeta[1] - sp * zeta[2]};
}

PolyVectorField over_default(const PolyVectorField& f) {
  const VarList& dv = default_vars();
  std::vector<MultiPoly> c;
  for (const auto& p : f.components) c.push_back(p.with_vars(dv));
  return PolyVectorField(std::move(c));
}

}  // namespace

BlowupSphere::BlowupSphere(const PolyVectorField& xhat, const Weights& w)
    : xhat_(over_default(xhat)),
      w_(w),
      f_{CompiledPoly(xhat_[0]), CompiledPoly(xhat_[1]), CompiledPoly(xhat_[2])},
      sphere_((w.validate(), xhat_), {w.ax, w.ay, w.ae}, default_vars().require("eps")) {}

std::array<double, 2> BlowupSphere::at_radius(double r, double theta, double phi) const {
  const auto a = w_.as_array();
  const auto z = unit_vector(theta, phi);
  const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
  const std::array<double, 3> dth{-st * sp, ct * sp, 0.0};
  const std::array<double, 3> dph{ct * cp, st * cp, -sp};
  std::array<double, 3> point;
  for (std::size_t i = 0; i < 3; ++i) point[i] = std::pow(r, a[i]) * z[i];
  const int m = division_exponent();
  std::array<double, 3> b;
  for (std::size_t i = 0; i < 3; ++i) b[i] = f_[i](point) / std::pow(r, static_cast<double>(a[i]) + m);
  // Rows scaled by r^-a_i: [a_i z_i, dz/dtheta, dz/dphi] (r'/r, theta', phi') = b.
  std::array<std::array<double, 3>, 3> mat;
  for (std::size_t i = 0; i < 3; ++i) mat[i] = {a[i] * z[i], dth[i], dph[i]};
  auto det3 = [](const std::array<std::array<double, 3>, 3>& M) {
    return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
           M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
  };
  const double det = det3(mat);
  if (std::abs(det) < 1e-12) {
    throw NumericError("blow-up Jacobian is singular at theta = " + std::to_string(theta) +
                       ", phi = " + std::to_string(phi));
  }
  auto replaced = [&](std::size_t col) {
    auto M = mat;
    for (std::size_t i = 0; i < 3; ++i) M[i][col] = b[i];
    return det3(M) / det;
  };
  return {replaced(1), replaced(2)};
}

std::array<double, 2> BlowupSphere::extrapolated(double theta, double phi, double r1, double r2) const {
  const auto f1 = at_radius(r1, theta, phi);
  const auto f2 = at_radius(r2, theta, phi);
  return {(r1 * f2[0] - r2 * f1[0]) / (r1 - r2), (r1 * f2[1] - r2 * f1[1]) / (r1 - r2)};
}

std::array<double, 2> BlowupSphere::exact(double theta, double phi) const {
  const auto z = unit_vector(theta, phi);
  return angular_rates(sphere_.zeta(z), theta, phi);
}

std::array<double, 3> BlowupSphere::cartesian(const std::array<double, 3>& z) const {
  const auto g = sphere_.zeta(z);
  return {g[0], g[1], g[2]};
}

std::array<double, 2> sphere_field(const PolyVectorField& xhat, const Weights& w, double theta, double phi) {
  if (!(phi > 0.0 && phi <= kPi / 2 + 1e-15)) throw NumericError("sphere_field needs phi in (0, pi/2]");
  return BlowupSphere(xhat, w).extrapolated(theta, phi);
}

std::string EquilibriumOrigin::to_string() const {
  switch (kind) {
    case Kind::fast_foliation: return "fast-foliation";
    case Kind::interior: return "interior";
    case Kind::branch: {
      std::string s = "branch";
      for (std::size_t i = 0; i < branches.size(); ++i) s += (i == 0 ? " " : ",") + std::to_string(branches[i]);
      return s;
    }
  }
  return "interior";
}

EquatorContext EquatorContext::from(const CriticalSet& cs, const SingularPoint& ps) {
  EquatorContext ctx;
  const VarList& dv = default_vars();
  std::map<std::string, MultiPoly> shift;
  if (ps.location.is_exact()) {
    shift.emplace("x", MultiPoly::variable(dv, "x") + MultiPoly::constant(dv, (*ps.location.exact)[0]));
    shift.emplace("y", MultiPoly::variable(dv, "y") + MultiPoly::constant(dv, (*ps.location.exact)[1]));
  }
  for (int id : ps.incident_branches) {
    const Branch& b = cs.branch(id);
    ctx.branches.emplace_back(id, shift.empty() ? b.defining_poly : substitute(b.defining_poly, shift, dv),
                              b.proven_irreducible);
  }
  const std::array<double, 3> pt{ps.location.x(), ps.location.y(), 0.0};
  ctx.fast_direction = {cs.fast_cofactor[0].eval(std::span<const double>(pt)),
                        cs.fast_cofactor[1].eval(std::span<const double>(pt))};
  return ctx;
}

std::string classify_eigenvalues(const std::array<std::complex<double>, 2>& ev, double tol) {
  const double re0 = ev[0].real(), re1 = ev[1].real();
  if (std::abs(re0) < tol || std::abs(re1) < tol) return "nonhyperbolic";
  if (std::abs(ev[0].imag()) > tol) return re0 < 0 ? "sink" : "source";
  if (re0 < 0 && re1 < 0) return "stable node";
  if (re0 > 0 && re1 > 0) return "unstable node";
  return "saddle";
}

namespace {

double wrap_angle(double t) {
  // Into (-pi, pi].
  double w = std::fmod(t + kPi, 2 * kPi);
  if (w < 0) w += 2 * kPi;
  w -= kPi;
  if (w <= -kPi + 1e-13) w = kPi;
  return w;
}

double angle_gap(double a, double b) { return std::abs(wrap_angle(a - b)); }

template <typename Fn>
double bisect(Fn&& f, double lo, double hi, double flo, double tol = 1e-13) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Lowest weighted-degree part of a branch polynomial in (x, y).
MultiPoly leading_weighted(const MultiPoly& f, const Weights& w) {
  int best = INT_MAX;
  for (const auto& [e, c] : f.terms()) best = std::min(best, static_cast<int>(w.ax * e[0] + w.ay * e[1]));
  MultiPoly out(f.vars());
  for (const auto& [e, c] : f.terms()) {
    if (static_cast<int>(w.ax * e[0] + w.ay * e[1]) == best) out.add_term(e, c);
  }
  return out;
}

}  // namespace

std::vector<SphereEquilibrium> equator_equilibria(const PolyVectorField& xhat, const Weights& w,
                                                  const EquatorContext& ctx) {
  const BlowupSphere sphere(xhat, w);
  const double eq = kPi / 2;
  auto f = [&](double th) { return sphere.exact(th, eq)[0]; };
  const double hd = 1e-5;
  auto df = [&](double th) { return (f(th + hd) - f(th - hd)) / (2 * hd); };

  constexpr int kGrid = 2048;
  std::vector<double> grid(kGrid + 1);
  std::vector<double> vals(kGrid + 1);
  std::vector<double> dvals(kGrid + 1);
  for (int k = 0; k <= kGrid; ++k) {
    grid[k] = -kPi + 2 * kPi * k / kGrid;
    vals[k] = f(grid[k]);
    dvals[k] = df(grid[k]);
  }
  double scale = 0.0;
  for (double v : vals) scale = std::max(scale, std::abs(v));
  const double zero_tol = 1e-12 * std::max(1.0, scale);

  struct Cand {
    double theta;
    bool tangential;
  };
  std::vector<Cand> cands;
  for (int k = 0; k < kGrid; ++k) {
    const double a = grid[k], b = grid[k + 1];
    if (std::abs(vals[k]) <= zero_tol) cands.push_back({a, false});
    if (vals[k] * vals[k + 1] < 0 && std::abs(vals[k]) > zero_tol && std::abs(vals[k + 1]) > zero_tol) {
      cands.push_back({bisect(f, a, b, vals[k]), false});
    }
    // Tangential roots show up as sign changes of the derivative where the field is small.
    if (dvals[k] * dvals[k + 1] < 0) {
      const double t = bisect(df, a, b, dvals[k]);
      if (std::abs(f(t)) < 1e-10 * std::max(1.0, scale)) cands.push_back({t, true});
    }
  }
  std::vector<Cand> roots;
  for (const auto& c : cands) {
    const double th = wrap_angle(c.theta);
    auto it = std::find_if(roots.begin(), roots.end(), [&](const Cand& r) { return angle_gap(r.theta, th) < 1e-7; });
    if (it == roots.end()) {
      roots.push_back({th, c.tangential});
    } else if (!c.tangential && it->tangential) {
      *it = {th, false};
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Cand& a, const Cand& b) { return a.theta < b.theta; });

  // Directional charts for the cross-check.
  std::array<std::optional<BlownUpChart>, 4> charts;
  std::array<std::array<CompiledPoly, 2>, 4> compiled;
  const std::array<ChartId, 4> ids{ChartId::x_plus, ChartId::x_minus, ChartId::y_plus, ChartId::y_minus};
  for (std::size_t c = 0; c < 4; ++c) {
    charts[c] = chart_field(xhat, w, ids[c]);
    compiled[c] = {CompiledPoly(charts[c]->field[1]), CompiledPoly(charts[c]->field[2])};
  }

  std::vector<MultiPoly> leading;
  for (const auto& b : ctx.branches) leading.push_back(leading_weighted(b.defining_poly, w));

  std::vector<SphereEquilibrium> out;
  for (const auto& root : roots) {
    SphereEquilibrium e;
    e.theta = root.theta;
    e.phi = eq;
    e.tangential = root.tangential;
    e.residual = std::abs(f(root.theta));

    const double h = 1e-6;
    const auto fp_t = sphere.exact(e.theta + h, eq), fm_t = sphere.exact(e.theta - h, eq);
    const auto fp_p = sphere.exact(e.theta, eq + h), fm_p = sphere.exact(e.theta, eq - h);
    const double j00 = (fp_t[0] - fm_t[0]) / (2 * h), j01 = (fp_p[0] - fm_p[0]) / (2 * h);
    const double j10 = (fp_t[1] - fm_t[1]) / (2 * h), j11 = (fp_p[1] - fm_p[1]) / (2 * h);
    const double tr = j00 + j11, det = j00 * j11 - j01 * j10;
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4 * det, 0.0));
    e.eigenvalues = {(tr - disc) / 2.0, (tr + disc) / 2.0};
    e.classification = classify_eigenvalues(e.eigenvalues);

    const double ct = std::cos(e.theta), st = std::sin(e.theta);
    for (std::size_t i = 0; i < leading.size(); ++i) {
      const std::array<double, 3> pt{ct, st, 0.0};
      if (std::abs(leading[i].eval(std::span<const double>(pt))) < 1e-8) {
        e.origin.branches.push_back(ctx.branches[i].id);
      }
    }
    if (!e.origin.branches.empty()) {
      e.origin.kind = EquilibriumOrigin::Kind::branch;
    } else if (norm(ctx.fast_direction) > 0 &&
               std::abs(cross(ctx.fast_direction, {ct, st})) < 1e-8 * norm(ctx.fast_direction)) {
      e.origin.kind = EquilibriumOrigin::Kind::fast_foliation;
    } else {
      e.origin.kind = EquilibriumOrigin::Kind::interior;
    }

    // Transition to the x- or y-directional chart at r = 0 on the equator.
    const double xs = std::pow(std::abs(ct), 1.0 / w.ax);
    const double ys = std::pow(std::abs(st), 1.0 / w.ay);
    std::size_t c = 0;
    std::array<double, 3> q{0.0, 0.0, 0.0};
    if (xs >= ys) {
      c = ct > 0 ? 0 : 1;
      q[2] = st / std::pow(std::abs(ct), static_cast<double>(w.ay) / w.ax);
    } else {
      c = st > 0 ? 2 : 3;
      q[1] = ct / std::pow(std::abs(st), static_cast<double>(w.ax) / w.ay);
    }
    e.chart = to_string(ids[c]);
    const double resid = std::max(std::abs(compiled[c][0](q)), std::abs(compiled[c][1](q)));
    e.chart_check = resid < 1e-9;
    out.push_back(e);
  }
  return out;
}

namespace {

struct Leg {
  std::vector<State<3>> points;
  double arclength = 0.0;
  double closest = 0.0;
  bool reached = false;
  std::string stop_reason;
};

double distance3(const State<3>& a, const State<3>& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

// Follows the sphere flow (time-reversed when direction < 0) from `start` until it
// comes within 1e-2 of `target`, stalls, or spends the arclength budget.
Leg trace_leg(const BlowupSphere& sphere, State<3> z, const State<3>& target, double direction, double budget) {
  Leg leg;
  leg.points.push_back(z);
  leg.closest = distance3(z, target);
  OdeOptions opt;
  opt.rel_tol = 1e-11;
  opt.abs_tol = 1e-13;
  opt.max_step = 0.05;
  opt.max_steps = 2'000'000;
  long steps = 0;
  double checkpoint = 0.0;
  auto rhs = [&](double, const State<3>& y, State<3>& dy) {
    dy = sphere.cartesian(y);
    for (double& c : dy) c *= direction;
  };
  auto observer = [&](const DenseStep<3>& s) {
    const double ds = distance3(s.y0, s.y1);
    leg.arclength += ds;
    leg.points.push_back(s.y1);
    const double d = distance3(s.y1, target);
    leg.closest = std::min(leg.closest, d);
    if (d < 1e-2) {
      leg.reached = true;
      leg.stop_reason = "reached target neighbourhood";
      return false;
    }
    if (leg.arclength > budget) {
      leg.stop_reason = "arclength budget exhausted";
      return false;
    }
    // Stalled: less than 1e-6 of progress over the last 5000 steps.
    if (++steps % 5000 == 0) {
      if (leg.arclength - checkpoint < 1e-6) {
        leg.stop_reason = "orbit stalled at an equilibrium";
        return false;
      }
      checkpoint = leg.arclength;
    }
    return true;
  };
  auto project = [](State<3>& y) {
    const double n = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    for (double& c : y) c /= n;
    return true;
  };
  const OdeStatus st = dopri5<3>(rhs, 0.0, z, 1e9, opt, observer, project);
  if (leg.stop_reason.empty()) leg.stop_reason = to_string(st);
  return leg;
}

double point_segment_distance(const State<3>& p, const State<3>& a, const State<3>& b) {
  State<3> ab, ap;
  double len2 = 0.0, proj = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    ab[i] = b[i] - a[i];
    ap[i] = p[i] - a[i];
    len2 += ab[i] * ab[i];
    proj += ab[i] * ap[i];
  }
  const double t = len2 > 0 ? std::clamp(proj / len2, 0.0, 1.0) : 0.0;
  State<3> q;
  for (std::size_t i = 0; i < 3; ++i) q[i] = a[i] + t * ab[i];
  return distance3(p, q);
}

}  // namespace

ConnectionResult connection_trace(const PolyVectorField& xhat, const Weights& w, const SphereEquilibrium& from,
                                  const SphereEquilibrium& to, double arclength_budget) {
  const BlowupSphere sphere(xhat, w);
  const State<3> source = unit_vector(from.theta, from.phi);
  const State<3> target = unit_vector(to.theta, to.phi);
  ConnectionResult res;
  auto to_angles = [](const State<3>& p) {
    return std::array<double, 2>{std::atan2(p[1], p[0]), std::acos(std::clamp(p[2], -1.0, 1.0))};
  };

  const Leg fwd = trace_leg(sphere, unit_vector(from.theta, from.phi - 1e-3), target, 1.0, arclength_budget);
  res.arclength = fwd.arclength;
  res.closest_distance = fwd.closest;
  res.stop_reason = fwd.stop_reason;
  for (const auto& p : fwd.points) res.orbit.push_back(to_angles(p));
  if (fwd.reached) {
    res.connected = true;
    return res;
  }

  // Near a nonhyperbolic target, rounding errors are amplified along its unstable
  // direction and the forward orbit drifts off before arriving. The orbit leaving
  // `to` in reversed time is computed stably instead, and the two are matched away
  // from both equilibria.
  const Leg bwd = trace_leg(sphere, unit_vector(to.theta, to.phi - 1e-3), source, -1.0, arclength_budget);
  constexpr double kAway = 0.1;
  constexpr double kMatch = 1e-3;
  // Bucket the reversed orbit's segments on a grid so each forward point only
  // looks at nearby segments.
  constexpr double kCell = 0.02;
  auto cell_of = [](double c) { return static_cast<long>(std::floor(c / kCell)); };
  std::map<std::array<long, 3>, std::vector<std::size_t>> grid;
  for (std::size_t j = 0; j + 1 < bwd.points.size(); ++j) {
    const auto& a = bwd.points[j];
    const auto& b = bwd.points[j + 1];
    std::array<long, 3> lo, hi;
    for (std::size_t k = 0; k < 3; ++k) {
      lo[k] = cell_of(std::min(a[k], b[k]) - kMatch);
      hi[k] = cell_of(std::max(a[k], b[k]) + kMatch);
    }
    for (long i0 = lo[0]; i0 <= hi[0]; ++i0)
      for (long i1 = lo[1]; i1 <= hi[1]; ++i1)
        for (long i2 = lo[2]; i2 <= hi[2]; ++i2) grid[{i0, i1, i2}].push_back(j);
  }
  std::optional<std::pair<std::size_t, std::size_t>> match;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fwd.points.size() && !match; ++i) {
    const auto& p = fwd.points[i];
    if (distance3(p, source) < kAway || distance3(p, target) < kAway) continue;
    const auto it = grid.find({cell_of(p[0]), cell_of(p[1]), cell_of(p[2])});
    if (it == grid.end()) continue;
    for (std::size_t j : it->second) {
      const double d = point_segment_distance(p, bwd.points[j], bwd.points[j + 1]);
      best = std::min(best, d);
      if (d < kMatch) {
        match = {i, j};
        break;
      }
    }
  }
  res.match_gap = best;
  if (!match) {
    res.stop_reason += "; reversed orbit from the target does not meet it";
    return res;
  }
  res.connected = true;
  res.stop_reason = "matched the reversed orbit leaving the target";
  res.orbit.resize(match->first + 1);
  res.arclength = 0.0;
  for (std::size_t i = 0; i < match->first; ++i) res.arclength += distance3(fwd.points[i], fwd.points[i + 1]);
  for (std::size_t j = match->second + 1; j-- > 0;) {
    res.orbit.push_back(to_angles(bwd.points[j]));
    if (j > 0) res.arclength += distance3(bwd.points[j], bwd.points[j - 1]);
  }
  res.closest_distance = distance3(bwd.points.front(), target);
  return res;
}

SymmetryResult symmetry_check_pitchfork(const PolyVectorField& xhat, const Weights& w, double tol) {
  const BlowupSphere sphere(xhat, w);
  SymmetryResult res;
  constexpr int kN = 32;
  for (int i = 0; i < kN; ++i) {
    const double th = -kPi + 2 * kPi * (i + 0.5) / kN;
    for (int j = 0; j < kN; ++j) {
      const double ph = (kPi / 2) * (j + 1) / kN;
      const auto a = sphere.exact(th, ph);
      const auto b = sphere.exact(kPi - th, ph);
      const double dev = std::max(std::abs(b[0] - a[0]), std::abs(b[1] + a[1]));
      if (dev > res.worst_deviation) {
        res.worst_deviation = dev;
        res.worst_theta = th;
        res.worst_phi = ph;
      }
    }
  }
  res.holds = res.worst_deviation < tol;
  return res;
}

CircleLemmaSystem circle_lemma(int k, int sign) {
  if (k < 1) throw AssumptionViolation("circle lemma needs k >= 1");
  if (sign < -1 || sign > 1) throw AssumptionViolation("circle lemma sign must be -1, 0 or +1");
  CircleLemmaSystem sys;
  sys.k = k;
  sys.sign = sign;
  const double kk = k;
  const double sg = sign;
  sys.psi_dot = [kk, sg](double psi) {
    return (2 * kk + 1) * std::sin(psi) * (std::pow(std::cos(psi), 2 * kk + 1) + sg * std::sin(psi)) /
           (kk * std::cos(2 * psi) - kk - 1);
  };

  // x' = x^(2k+1) + sign * eps over (x, eps) with weights (1, 2k+1).
  const VarList vars{"x", "eps"};
  const MultiPoly x = MultiPoly::variable(vars, "x");
  const MultiPoly eps = MultiPoly::variable(vars, "eps");
  const PolyVectorField field({x.pow(static_cast<unsigned>(2 * k + 1)) + eps * Rational(sign), MultiPoly(vars)});
  auto sphere = std::make_shared<WeightedSphere>(field, std::vector<unsigned>{1, static_cast<unsigned>(2 * k + 1)},
                                                 std::size_t{1});
  sys.division_exponent = sphere->division_exponent();
  sys.psi_dot_derived = [sphere](double psi) {
    const std::array<double, 2> z{std::cos(psi), std::sin(psi)};
    const auto g = sphere->zeta(z);
    return -std::sin(psi) * g[0] + std::cos(psi) * g[1];
  };

  for (int s = 0; s < 1000; ++s) {
    const double psi = kPi * s / 999.0;
    sys.max_deviation = std::max(sys.max_deviation, std::abs(sys.psi_dot(psi) - sys.psi_dot_derived(psi)));
  }

  // Equilibria on [0, pi]: the endpoints and interior sign changes at resolution 1e-4.
  const auto& f = sys.psi_dot_derived;
  std::vector<double> roots{0.0};
  const int n = static_cast<int>(std::ceil(kPi / 1e-4));
  double prev_t = 1e-4;
  double prev = f(prev_t);
  for (int i = 2; i < n; ++i) {
    const double t = std::min(kPi - 1e-4, i * 1e-4);
    const double v = f(t);
    if (prev == 0.0) {
      roots.push_back(prev_t);
    } else if (prev * v < 0) {
      roots.push_back(bisect(f, prev_t, t, prev, 1e-15));
    }
    prev_t = t;
    prev = v;
  }
  roots.push_back(kPi);
  for (double r : roots) {
    CircleEquilibrium e;
    e.psi = r;
    const double h = 1e-6;
    e.derivative = (f(r + h) - f(r - h)) / (2 * h);
    e.stable = e.derivative < 0;
    e.hyperbolic = std::abs(e.derivative) > 1e-8;
    sys.equilibria.push_back(e);
  }
  return sys;
}

}  // namespace canardkit
