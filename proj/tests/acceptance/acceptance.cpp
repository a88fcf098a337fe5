// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "canardkit/algebra.hpp"
#include "canardkit/blowup.hpp"
#include "canardkit/dynamics.hpp"
#include "canardkit/fixtures.hpp"
#include "canardkit/parser.hpp"
#include "canardkit/pipeline.hpp"

using namespace canardkit;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
  int id;
  std::string description;
  double budget_seconds;
  std::function<bool(std::string&)> body;
};

PolyVectorField field(const char* a, const char* b) { return PolyVectorField({parse_poly(a), parse_poly(b)}); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double angle_gap(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

// Bisection for a sign change of g on [lo, hi].
double bisect(const std::function<double(double)>& g, double lo, double hi) {
  const bool lo_negative = g(lo) < 0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((g(mid) < 0) == lo_negative ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Found angles match the expected ones one to one within tol.
bool same_angles(const std::vector<SphereEquilibrium>& found, const std::vector<double>& expected, double tol,
                 std::string& d) {
  double worst = 0.0;
  for (double e : expected) {
    double best = INFINITY;
    for (const auto& f : found) best = std::min(best, angle_gap(f.theta, e));
    worst = std::max(worst, best);
  }
  d = std::to_string(found.size()) + " equilibria, worst angle error " + fmt("%.1e", worst);
  return found.size() == expected.size() && worst < tol;
}

struct Example {
  SystemFile sys;
  Analysis analysis;
  BlowupAnalysis blowup;
  explicit Example(SystemFile s) : sys(std::move(s)), analysis(run_analysis(sys)), blowup(run_blowup(analysis, *sys.weights)) {}
};

const Example& transcritical() {
  static const Example e(transcritical_fixture());
  return e;
}
const Example& pitchfork() {
  static const Example e(pitchfork_fixture());
  return e;
}

double transcritical_equator(double th) {
  return -(1.0 / 16) * std::sin(th) * (-6 * std::cos(2 * th) + 5 * std::cos(4 * th) + 5);
}

double pitchfork_equator(double th) {
  const double s = std::sin(th), c = std::cos(th);
  return -(-3 * std::pow(std::sin(2 * th), 2) + 8 * s * std::pow(c, 4) + 4 * s * s * c * c) / (2 * (std::cos(2 * th) - 3));
}

// Interior root of sin t = cos^2 t in (0, pi/2).
double pitchfork_root() {
  return bisect([](double t) { return std::sin(t) - std::cos(t) * std::cos(t); }, 0.0, kPi / 2);
}

bool criterion_1(std::string& d) {
  const Analysis a = run_analysis(transcritical_fixture());
  if (a.canards.size() != 1) return false;
  const auto& rep = a.canards[0];
  int zeros = 0;
  bool ok = rep.per_branch.size() == 4;
  for (const auto& bc : rep.per_branch) {
    const Branch& br = a.critical_set.branch(bc.branch);
    // Oracle: the branch is the line y = m x, and det[(1, 1/2), (1, m)] = m - 1/2.
    Rational slope;
    bool found = false;
    for (const Rational& m : {Rational(1), Rational(-1), Rational(1, 2), Rational(-1, 2)}) {
      if (br.eval(Rational(1), m).is_zero()) {
        slope = m;
        found = true;
      }
    }
    ok = ok && found && bc.wedge.exact.has_value();
    if (!ok) break;
    const bool oracle_zero = (slope - Rational(1, 2)).is_zero();
    ok = ok && bc.wedge.exact->is_zero() == oracle_zero;
    if (bc.wedge.exact->is_zero()) ++zeros;
    d += br.defining_poly.to_string() + ": " + bc.wedge.exact->to_string() + "; ";
  }
  return ok && zeros == 1 && rep.canard_branches().size() == 1 &&
         a.critical_set.branch(rep.canard_branches()[0]).defining_poly == parse_poly("y - x/2").monic();
}

bool criterion_2(std::string& d) {
  const Analysis a = run_analysis(pitchfork_fixture());
  if (a.canards.size() != 1) return false;
  const auto& rep = a.canards[0];
  int zeros = 0;
  bool ok = rep.per_branch.size() == 3;
  for (const auto& bc : rep.per_branch) {
    const Branch& br = a.critical_set.branch(bc.branch);
    ok = ok && bc.wedge.exact.has_value();
    if (!ok) break;
    // Oracle: only the parabola has a horizontal tangent at the origin, parallel to X1 = (-1, 0).
    const bool parabola = br.eval(Rational(1, 3), Rational(1, 9)).is_zero() && br.eval(Rational(2), Rational(4)).is_zero();
    ok = ok && bc.wedge.exact->is_zero() == parabola;
    if (bc.wedge.exact->is_zero()) ++zeros;
    d += br.defining_poly.to_string() + ": " + bc.wedge.exact->to_string() + "; ";
  }
  return ok && zeros == 1;
}

bool criterion_3(std::string& d) {
  const Example& t = transcritical();
  const Example& p = pitchfork();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double th = -kPi + 2 * kPi * (i + 0.5) / 100;
    const auto a = sphere_field(t.blowup.xhat, t.blowup.weights, th, kPi / 2);
    const auto b = sphere_field(p.blowup.xhat, p.blowup.weights, th, kPi / 2);
    worst = std::max({worst, std::abs(a[0] - transcritical_equator(th)), std::abs(b[0] - pitchfork_equator(th)),
                      std::abs(a[1]), std::abs(b[1])});
  }
  d = "max error " + fmt("%.2e", worst);
  return worst < 1e-6;
}

bool criterion_4(std::string& d) {
  const double a = std::atan(0.5);
  return same_angles(transcritical().blowup.equator,
                     {0, kPi, kPi / 4, -kPi / 4, 3 * kPi / 4, -3 * kPi / 4, a, -a, kPi - a, -(kPi - a)}, 1e-9, d);
}

bool criterion_5(std::string& d) {
  const double r = pitchfork_root();
  const bool ok = same_angles(pitchfork().blowup.equator, {0, kPi, kPi / 2, -kPi / 2, r, kPi - r}, 1e-9, d);
  const double golden = (1 + std::sqrt(5.0)) / 2;
  d += "; root " + fmt("%.7f", r) + " is asin(1/phi) = " + fmt("%.7f", std::asin(1 / golden)) +
       ", the atan(1/phi) label gives " + fmt("%.7f", std::atan(1 / golden));
  return ok;
}

bool criterion_6(std::string& d) {
  const auto& b = transcritical().blowup;
  const double th = -kPi + std::atan(0.5);
  double worst = 0.0;
  for (int j = 1; j <= 50; ++j) {
    worst = std::max(worst, std::abs(sphere_field(b.xhat, b.weights, th, (kPi / 2) * j / 51.0)[0]));
  }
  d = "max |theta'| " + fmt("%.2e", worst);
  return worst < 1e-6;
}

bool criterion_7(std::string& d) {
  const double a = std::atan(0.5), r = pitchfork_root();
  bool ok = true;
  for (const auto& [ex, from, to] :
       {std::tuple{&transcritical(), -kPi + a, a}, std::tuple{&pitchfork(), r, kPi - r}}) {
    bool found = false;
    for (const auto& c : ex->blowup.connections) {
      if (angle_gap(c.from.theta, from) > 1e-6 || angle_gap(c.to.theta, to) > 1e-6) continue;
      found = true;
      const double gap = std::min(c.result.closest_distance, c.result.match_gap);
      ok = ok && c.result.connected && gap < 1e-2;
      d += fmt("%.5f", from) + " -> " + fmt("%.5f", to) + " gap " + fmt("%.2e", gap) + "; ";
    }
    ok = ok && found;
  }
  return ok;
}

bool criterion_8(std::string& d) {
  const auto& b = pitchfork().blowup;
  double worst = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double th = -kPi + 2 * kPi * (i + 0.5) / 32;
    for (int j = 0; j < 32; ++j) {
      const double ph = (kPi / 2) * (j + 1) / 32 * 0.999;
      const auto u = sphere_field(b.xhat, b.weights, th, ph);
      const auto v = sphere_field(b.xhat, b.weights, kPi - th, ph);
      worst = std::max({worst, std::abs(v[0] - u[0]), std::abs(v[1] + u[1])});
    }
  }
  d = "worst deviation " + fmt("%.2e", worst) + ", library check " + fmt("%.2e", b.symmetry.worst_deviation);
  return worst < 1e-6 && b.symmetry.holds;
}

bool criterion_9(std::string& d) {
  bool ok = true;
  double psi1 = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const CircleLemmaSystem s = circle_lemma(k);
    const int n = 2 * k + 1;
    // Oracle: x = r cos psi, eps = r^n sin psi with eps' = 0 gives, after dividing by r^(n-1),
    // psi' = -n sin psi (cos^n psi + sin psi) / (cos^2 psi + n sin^2 psi).
    auto oracle = [n](double psi) {
      const double c = std::cos(psi), sn = std::sin(psi);
      return -n * sn * (std::pow(c, n) + sn) / (c * c + n * sn * sn);
    };
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double psi = kPi * i / 999.0;
      worst = std::max({worst, std::abs(s.psi_dot(psi) - s.psi_dot_derived(psi)),
                        std::abs(oracle(psi) - s.psi_dot_derived(psi))});
    }
    const double star = bisect([n](double p) { return std::pow(std::cos(p), n) + std::sin(p); }, kPi / 2, kPi);
    if (k == 1) psi1 = star;
    ok = ok && worst < 1e-12 && s.equilibria.size() == 3;
    for (const auto& e : s.equilibria) {
      if (e.psi < 1e-12 || std::abs(e.psi - kPi) < 1e-12) {
        ok = ok && e.stable && e.hyperbolic;
      } else {
        ok = ok && std::abs(e.psi - star) < 1e-9 && !e.stable && e.hyperbolic && e.derivative > 0;
      }
    }
    d += "k=" + std::to_string(k) + " err " + fmt("%.1e", worst) + " psi* " + fmt("%.6f", star) + "; ";
  }
  return ok && std::abs(psi1 - 2.5420) < 1e-3;
}

bool criterion_10(std::string& d) {
  bool ok = true;
  for (const Example* ex : {&transcritical(), &pitchfork()}) {
    const auto& b = ex->blowup;
    ok = ok && b.division_exponent == 3;
    int failures = 0, samples = 0;
    for (ChartId id : kAllCharts) {
      const BlownUpChart c = chart_field(b.xhat, b.weights, id);
      const PushforwardCheck pc = check_pushforward(c, b.xhat, 100, 7);
      samples += pc.samples;
      failures += pc.failures;
      ok = ok && c.division_exponent == 3 && pc.samples == 100;
    }
    ok = ok && failures == 0;
    d += "m=" + std::to_string(b.division_exponent) + " " + std::to_string(failures) + "/" + std::to_string(samples) +
         " failures; ";
  }
  return ok;
}

bool criterion_11(std::string& d) {
  const PolyVectorField x0 = field("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0");
  const Analysis a = run_analysis(transcritical_fixture());
  const Branch& canard = a.critical_set.branch(a.canards[0].canard_branches().at(0));
  IntegratorConfig cfg;
  cfg.epsilon = 1e-3;
  auto metric = [&](const PolyVectorField& x1) {
    const Trajectory t = integrate_full(x0, x1, cfg, {-0.5, -0.25 + 1e-4}, 1500.0);
    // The repelling half is the one with x > 0.
    const Vec2 tan = canard.tangent(0.0, 0.0);
    return canard_metric(t, canard, {0.0, 0.0}, 1e-2, tan[0] > 0 ? 1 : -1);
  };
  const double aligned = metric(field("1", "1/2"));
  const double rotated = metric(field("1", "0"));
  const bool metric_ok = aligned > 0 && aligned >= 5 * rotated;

  const PolyVectorField x1 = field("1", "1/2");
  const auto s1 = shadowing_error(x0, x1, 1e-3, {-0.5, -0.1}, 1e-3);
  const auto s2 = shadowing_error(x0, x1, 1e-3, {-0.5, -0.1}, 5e-4);
  const double ratio = s1.max_deviation / s2.max_deviation;
  const bool shadow_ok = ratio >= 1.6 && ratio <= 2.4;

  // On y = x/2, DX0 is upper triangular with transverse eigenvalue x^3 - 5/2 x y^2.
  double worst = 0.0;
  bool mult_ok = true;
  for (double delta : {1e-2, 1e-3}) {
    for (double x : {-0.8, -0.5, -0.2, 0.3, 0.7}) {
      const double y = x / 2, lambda = x * x * x - 2.5 * x * y * y;
      const auto r = multiplier_check(x0, delta, {{x, y}});
      const double err = std::abs(r[0].transverse.real() - (1 + delta * lambda));
      worst = std::max(worst, err / (delta * delta));
      mult_ok = mult_ok && err <= delta * delta;
    }
  }
  d = "metric " + fmt("%.3f", aligned) + " vs " + fmt("%.3f", rotated) + ", shadowing ratio " + fmt("%.4f", ratio) +
      ", multiplier error / delta^2 " + fmt("%.1e", worst);
  return metric_ok && shadow_ok && mult_ok;
}

bool criterion_12(std::string& d) {
  std::mt19937_64 rng(2024);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto coef = [&] {
    int n = 0;
    while (n == 0) n = uni(-9, 9);
    return Rational(n, uni(1, 5));
  };
  auto poly = [&](int max_degree, int max_terms, bool nonconstant) {
    for (;;) {
      MultiPoly p(default_vars());
      const int terms = uni(1, max_terms);
      for (int t = 0; t < terms; ++t) {
        const int deg = uni(0, max_degree);
        const int a = uni(0, deg), b = uni(0, deg - a);
        p.add_term({static_cast<unsigned>(a), static_cast<unsigned>(b), static_cast<unsigned>(deg - a - b)}, coef());
      }
      if (!nonconstant || !p.is_constant()) return p;
    }
  };
  auto point = [&] {
    return std::array<Rational, 3>{Rational(uni(-30, 30), uni(1, 9)), Rational(uni(-30, 30), uni(1, 9)),
                                   Rational(uni(-30, 30), uni(1, 9))};
  };
  int cases = 0, failures = 0;
  auto expect = [&](bool c) { failures += c ? 0 : 1; };
  for (int i = 0; i < 500; ++i, ++cases) {
    const MultiPoly a = poly(3, 5, false), b = poly(3, 5, false), c = poly(2, 4, false);
    const auto q = point();
    expect(a * (b + c) == a * b + a * c);
    expect((a * b) * c == a * (b * c));
    expect(a * b == b * a);
    expect((a * b - c).eval(q) == a.eval(q) * b.eval(q) - c.eval(q));
  }
  for (int i = 0; i < 300; ++i, ++cases) {
    const MultiPoly common = poly(2, 3, true);
    const MultiPoly u = poly(2, 3, true) * common, v = poly(2, 3, true) * common;
    const MultiPoly g = gcd_poly(u, v);
    const auto qu = exact_divide(u, g), qv = exact_divide(v, g);
    expect(qu && qv && gcd_poly(*qu, *qv).is_constant() && exact_divide(g, common).has_value());
  }
  for (int i = 0; i < 300; ++i, ++cases) {
    const MultiPoly f1 = poly(2, 3, true), f2 = poly(1, 3, true);
    const MultiPoly p = f1 * f2 * f2 * Rational(uni(1, 7), uni(1, 7));
    const Factorization f = squarefree_factor(p);
    const auto q = point();
    expect(f.expand(default_vars()) == p);
    Rational product = f.unit;
    for (const auto& fac : f.factors) product *= fac.poly.eval(q).pow(fac.multiplicity);
    expect(product == p.eval(q));
    for (std::size_t j = 0; j < f.factors.size(); ++j) {
      for (std::size_t k = j + 1; k < f.factors.size(); ++k) {
        expect(gcd_poly(f.factors[j].poly, f.factors[k].poly).is_constant());
      }
    }
  }
  d = std::to_string(cases) + " randomized cases, " + std::to_string(failures) + " failures";
  return cases >= 1000 && failures == 0;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "canard selection, four-line example: only y - x/2 has zero wedge", 1, criterion_1},
      {2, "canard selection, pitchfork example: only the parabola has zero wedge", 1, criterion_2},
      {3, "equator field matches the closed forms on 100 points", 10, criterion_3},
      {4, "ten equator equilibria of the four-line example", 10, criterion_4},
      {5, "six equator equilibria of the pitchfork example", 10, criterion_5},
      {6, "invariant meridian theta = -pi + atan(1/2)", 5, criterion_6},
      {7, "attracting to repelling connections on the sphere", 30, criterion_7},
      {8, "reflection symmetry of the pitchfork sphere field", 5, criterion_8},
      {9, "circle lemma for k = 1..4", 5, criterion_9},
      {10, "chart pushforward identity, m = 3", 5, criterion_10},
      {11, "canard metric, Euler shadowing and multipliers", 60, criterion_11},
      {12, "randomized exact-algebra invariants", 30, criterion_12},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    std::string detail;
    bool pass = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      pass = c.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      pass = false;
      detail += " (over the " + fmt("%.0f", c.budget_seconds) + " s budget)";
    }
    if (!pass) ++failed;
    std::printf("%s [%d] %s (%.2fs): %s\n", pass ? "PASS" : "FAIL", c.id, c.description.c_str(), secs, detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
