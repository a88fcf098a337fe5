#include <cmath>

#include "canardkit/dynamics.hpp"
#include "canardkit/error.hpp"
#include "canardkit/parser.hpp"
#include "doctest.h"

using namespace canardkit;

namespace {

PolyVectorField field(const char* a, const char* b) { return PolyVectorField({parse_poly(a), parse_poly(b)}); }

const char* kFourLines = "(y-x)*(y+x)*(y-x/2)*(y+x/2)";

struct FourLines {
  CriticalSet cs = build_critical_set(field(kFourLines, "0"));
  SingularPoint ps = find_singular_points(cs, Box{}).at(0);
  const Branch& find(const char* poly) const {
    const MultiPoly want = parse_poly(poly).monic();
    for (const auto& b : cs.branches) {
      if (b.defining_poly.monic() == want) return b;
    }
    throw AlgebraError("branch not found");
  }
};

// X1 = (1, 1/2) rotated by `angle`.
PolyVectorField rotated_x1(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  const Rational a = Rational::from_double(c - 0.5 * s), b = Rational::from_double(s + 0.5 * c);
  return PolyVectorField({MultiPoly::constant(default_vars(), a), MultiPoly::constant(default_vars(), b)});
}

double metric_for(const PolyVectorField& x1, double eps, double tube) {
  static const FourLines f;
  IntegratorConfig cfg;
  cfg.epsilon = eps;
  const Trajectory t = integrate_full(field(kFourLines, "0"), x1, cfg, {-0.5, -0.25 + 1e-4}, 1.5 / eps);
  return canard_metric(t, f.find("y-x/2"), {0.0, 0.0}, tube, 1);
}

}  // namespace

TEST_CASE("integrator configuration") {
  IntegratorConfig c;
  CHECK_NOTHROW(c.validate());
  c.epsilon = 0.5;
  CHECK_THROWS_AS(c.validate(), AssumptionViolation);
  c = {};
  c.rel_tol = 0.1;
  CHECK_THROWS_AS(c.validate(), AssumptionViolation);
  CHECK(default_tube_radius(1e-4) == doctest::Approx(0.1));
  CHECK(default_tube_radius(1e-12) == doctest::Approx(1e-3));
}

TEST_CASE("equilibrium start gives a constant trajectory") {
  const Trajectory t = integrate_full(field("-x", "-y"), field("0", "0"), {}, {0.0, 0.0}, 5.0);
  REQUIRE(!t.empty());
  for (const auto& q : t.states) {
    CHECK(q[0] == 0.0);
    CHECK(q[1] == 0.0);
  }
  CHECK(integrate_full(field("-x", "-y"), field("0", "0"), {}, {1.0, 0.0}, 0.0).empty());
}

TEST_CASE("fifth-order convergence on x' = -x") {
  auto error_at = [](double tol) {
    IntegratorConfig c;
    c.rel_tol = tol;
    c.abs_tol = tol;
    c.max_step = 1.0;
    const Trajectory t = integrate_full(field("-x", "0"), field("0", "0"), c, {1.0, 0.0}, 1.0);
    return std::abs(t.states.back()[0] - std::exp(-1.0));
  };
  const double loose = error_at(1e-5), tight = error_at(1e-7);
  CHECK(tight > 0.0);
  CHECK(loose / tight >= 16.0);
}

TEST_CASE("tolerance sanity") {
  auto terminal = [](double tol) {
    IntegratorConfig c;
    c.rel_tol = tol;
    c.abs_tol = tol * 1e-3;
    return integrate_full(field(kFourLines, "0"), field("1", "1/2"), c, {-0.5, -0.25 + 1e-4}, 100.0).states.back();
  };
  const Vec2 a = terminal(1e-8), b = terminal(5e-9);
  CHECK(std::hypot(a[0] - b[0], a[1] - b[1]) < 10 * 1e-8);
}

TEST_CASE("trajectory follows y = x/2 through the origin") {
  const FourLines f;
  IntegratorConfig cfg;
  EventSpec ev;
  ev.tubes.push_back({&f.find("y-x/2"), 1e-2});
  ev.singular_point = Vec2{0.0, 0.0};
  const Trajectory t = integrate_full(field(kFourLines, "0"), field("1", "1/2"), cfg, {-0.5, -0.25 + 1e-4}, 1500.0, ev);
  CHECK(t.status == OdeStatus::completed);
  bool passed = false, far_along = false;
  for (const auto& e : t.events) passed = passed || e.tag == "passed p_s";
  for (const auto& q : t.states) far_along = far_along || (q[0] > 0.2 && std::abs(q[1] - q[0] / 2) < 1e-2);
  CHECK(passed);
  CHECK(far_along);
  for (std::size_t i = 1; i < t.times.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);
}

TEST_CASE("reduced flow crosses p_s only on the canard branch") {
  const FourLines f;
  const FastFrame frame(f.cs);
  const PolyVectorField x1 = field("1", "1/2");
  const Trajectory ok = integrate_reduced(f.find("y-x/2"), frame, x1, f.ps, {-0.5, -0.25}, 2.0);
  bool passed = false;
  for (const auto& e : ok.events) {
    if (e.tag == "passed p_s") {
      passed = true;
      CHECK(e.value > 0.0);
    }
  }
  CHECK(passed);
  CHECK(ok.states.back()[0] > 0.0);
  for (const char* b : {"y-x", "y+x", "y+x/2"}) {
    const Branch& br = f.find(b);
    const Vec2 g = br.grad(1.0, 0.0);
    const double slope = -g[0] / g[1];
    // The reduced flow reaches p_s from one of the two halves.
    bool stopped = false;
    for (double x : {-0.5, 0.5}) {
      const Trajectory t = integrate_reduced(br, frame, x1, f.ps, {x, slope * x}, 4.0);
      for (const auto& e : t.events) {
        CHECK(e.tag != "passed p_s");
        stopped = stopped || e.tag == "undefined at p_s";
      }
    }
    CHECK(stopped);
  }
  CHECK_THROWS_AS(integrate_reduced(f.find("y-x"), frame, x1, f.ps, {0.3, 0.1}, 1.0), AssumptionViolation);
}

TEST_CASE("canard metric trivial cases") {
  const FourLines f;
  Trajectory on;
  for (int i = 0; i <= 100; ++i) {
    on.times.push_back(i);
    on.states.push_back({i / 100.0, i / 200.0});
  }
  // Counted from the first state past p_s.
  CHECK(canard_metric(on, f.find("y-x/2"), {0.0, 0.0}, 1e-3, 1) == doctest::Approx(std::hypot(0.99, 0.495)));
  Trajectory away;
  for (int i = 0; i <= 100; ++i) {
    away.times.push_back(i);
    away.states.push_back({i / 100.0, -i / 100.0});
  }
  CHECK(canard_metric(away, f.find("y-x/2"), {0.0, 0.0}, 1e-3, 1) < 2e-3);
  CHECK(canard_metric(Trajectory{}, f.find("y-x/2"), {0.0, 0.0}, 1e-3, 1) == 0.0);
}

TEST_CASE("aligned perturbation follows the repelling branch longer") {
  const double aligned = metric_for(field("1", "1/2"), 1e-3, 1e-2);
  const double flat = metric_for(field("1", "0"), 1e-3, 1e-2);
  CHECK(aligned > 0.1);
  CHECK(aligned >= 5 * flat);
  for (double eps : {1e-2, 1e-3}) {
    const double a = metric_for(field("1", "1/2"), eps, 1e-2);
    for (double angle : {0.1, -0.1, 0.3, -0.3}) CHECK(a > metric_for(rotated_x1(angle), eps, 1e-2));
  }
}

TEST_CASE("Euler map") {
  const PolyVectorField x0 = field(kFourLines, "0"), x1 = field("1", "1/2");
  const EulerMap map(x0, x1, Rational(1, 1000), Rational(1, 1000));
  const std::array<Rational, 2> q{Rational(-1, 2), Rational(-1, 4)};
  const auto p = map.apply(q);
  const auto a = eval_field(x0, q[0], q[1]);
  const auto b = eval_field(x1, q[0], q[1]);
  CHECK(p[0] - q[0] == map.delta * (a[0] + map.epsilon * b[0]));
  CHECK(p[1] - q[1] == map.delta * (a[1] + map.epsilon * b[1]));

  // Fixed point of a field with an equilibrium at the origin.
  const EulerMap fixed(field("x*y", "y"), field("x", "0"), Rational(1, 10), Rational(1, 1000));
  const EulerOrbit o = euler_iterate(fixed, PlanePoint::from_exact(Rational(0), Rational(0)), 20);
  REQUIRE(o.points.size() == 21);
  for (const auto& pt : o.points) CHECK((pt[0] == 0.0 && pt[1] == 0.0));

  const EulerOrbit big = euler_iterate(map, PlanePoint::from_exact(q[0], q[1] + Rational(1, 10000)), 50);
  CHECK(big.points.size() == 51);
  CHECK(big.switched_to_float);
  CHECK(big.switch_index > 0);
  CHECK(big.exact_points.size() == big.switch_index);
  for (const auto& e : big.exact_points) {
    CHECK(e[0].bit_size() <= 2 * map.bit_budget);
  }
}

TEST_CASE("Euler shadowing is first order") {
  const PolyVectorField x0 = field(kFourLines, "0"), x1 = field("1", "1/2");
  const auto a = shadowing_error(x0, x1, 1e-3, {-0.5, -0.1}, 1e-3);
  const auto b = shadowing_error(x0, x1, 1e-3, {-0.5, -0.1}, 5e-4);
  const double ratio = a.max_deviation / b.max_deviation;
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.4);
}

TEST_CASE("multipliers of the Euler map") {
  const PolyVectorField x0 = field(kFourLines, "0");
  // On y = x/2 the transverse eigenvalue of DX0 is dF/dx = x^3 - 5/2 x y^2.
  auto lambda = [](double x) {
    const double y = x / 2;
    return x * x * x - 2.5 * x * y * y;
  };
  for (double delta : {1e-2, 1e-3}) {
    const auto r = multiplier_check(x0, delta, {{-0.5, -0.25}, {0.5, 0.25}, {0.0, 0.0}});
    REQUIRE(r.size() == 3);
    CHECK(std::abs(r[0].transverse.real() - (1 + delta * lambda(-0.5))) < delta * delta);
    CHECK(r[0].transverse.real() > 0.0);
    CHECK(r[0].transverse.real() < 1.0);
    CHECK(r[0].normally_hyperbolic);
    CHECK(r[1].transverse.real() > 1.0);
    CHECK(std::abs(r[2].transverse.real() - 1.0) < 1e-15);
    CHECK_FALSE(r[2].normally_hyperbolic);
  }
  const auto id = multiplier_check(x0, 0.0, {{-0.5, -0.25}});
  CHECK_FALSE(id[0].normally_hyperbolic);
  CHECK(id[0].multipliers[0] == std::complex<double>(1.0, 0.0));
  CHECK_THROWS_AS(multiplier_check(x0, 1e-3, {{0.3, 0.9}}), AssumptionViolation);
}
