#include <cmath>
#include <numbers>

#include "canardkit/blowup.hpp"
#include "canardkit/error.hpp"
#include "canardkit/fixtures.hpp"
#include "canardkit/parser.hpp"
#include "canardkit/pipeline.hpp"
#include "doctest.h"

using namespace canardkit;

namespace {

constexpr double kPi = std::numbers::pi;

PolyVectorField field(const char* a, const char* b) { return PolyVectorField({parse_poly(a), parse_poly(b)}); }

const PolyVectorField& xt() {
  static const PolyVectorField f = extend_field(field("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0"), field("1", "1/2"));
  return f;
}

const PolyVectorField& xp() {
  static const PolyVectorField f = extend_field(field("(x+y/2)*(x-y/2)*(y-x^2)", "0"), field("-1", "-x"));
  return f;
}

const Weights wt{1, 1, 4};
const Weights wp{1, 2, 4};

}  // namespace

TEST_CASE("weights") {
  CHECK(Weights::parse("1,2,4") == wp);
  CHECK(wp.to_string() == "1,2,4");
  CHECK_THROWS_AS(Weights::parse("1,2"), AssumptionViolation);
  CHECK_THROWS_AS(Weights::parse("1,a,2"), AssumptionViolation);
  CHECK_THROWS_AS((Weights{2, 2, 4}.validate()), AssumptionViolation);
  CHECK_THROWS_AS((Weights{0, 1, 1}.validate()), AssumptionViolation);
}

TEST_CASE("extended field") {
  const PolyVectorField& f = xt();
  REQUIRE(f.size() == 3);
  CHECK(f[0] == parse_poly("(y-x)*(y+x)*(y-x/2)*(y+x/2) + eps"));
  CHECK(f[1] == parse_poly("eps/2"));
  CHECK(f[2].is_zero());
}

TEST_CASE("division exponent") {
  CHECK(division_exponent(xt(), wt) == 3);
  CHECK(division_exponent(xp(), wp) == 3);
  try {
    division_exponent(xt(), Weights{1, 1, 1});
    FAIL("expected a weight error");
  } catch (const WeightError& e) {
    CHECK(e.component() == "dx/dt");
  }
}

TEST_CASE("eps chart of the four-line example") {
  const BlownUpChart c = chart_field(xt(), wt, ChartId::eps);
  const VarList& v = chart_vars();
  CHECK(c.division_exponent == 3);
  CHECK(c.field[0].is_zero());
  CHECK(c.field[1] == parse_poly("(v-u)*(v+u)*(v-u/2)*(v+u/2) + 1", v));
  CHECK(c.field[2] == parse_poly("1/2", v));
}

TEST_CASE("pushforward identity in every chart") {
  for (const auto& [f, w] : {std::pair{xt(), wt}, std::pair{xp(), wp}}) {
    for (ChartId id : kAllCharts) {
      const BlownUpChart c = chart_field(f, w, id);
      const PushforwardCheck pc = check_pushforward(c, f, 100);
      CHECK(pc.samples == 100);
      CHECK(pc.failures == 0);
    }
  }
  CHECK(parse_chart("y-") == ChartId::y_minus);
  CHECK_FALSE(parse_chart("z+").has_value());
}

TEST_CASE("sphere field on the equator matches the closed forms") {
  for (int i = 0; i < 100; ++i) {
    const double th = -kPi + 2 * kPi * (i + 0.5) / 100;
    const double ft = -(1.0 / 16) * std::sin(th) * (-6 * std::cos(2 * th) + 5 * std::cos(4 * th) + 5);
    const double s = std::sin(th), c = std::cos(th);
    const double fp =
        -(-3 * std::pow(std::sin(2 * th), 2) + 8 * s * std::pow(c, 4) + 4 * s * s * c * c) / (2 * (std::cos(2 * th) - 3));
    const auto a = sphere_field(xt(), wt, th, kPi / 2);
    const auto b = sphere_field(xp(), wp, th, kPi / 2);
    CHECK(std::abs(a[0] - ft) < 1e-6);
    CHECK(std::abs(b[0] - fp) < 1e-6);
    CHECK(std::abs(a[1]) < 1e-6);
    CHECK(std::abs(b[1]) < 1e-6);
  }
}

TEST_CASE("full sphere field of the four-line example") {
  const BlowupSphere s(xt(), wt);
  for (double ph : {0.2, 0.7, 1.2}) {
    for (double th : {-2.5, -0.4, 0.7, 2.9}) {
      const double expected =
          (1.0 / 16) * (std::sin(th) * (6 * std::cos(2 * th) - 5 * (std::cos(4 * th) + 1)) * std::pow(std::sin(ph), 3) +
                        8 / std::tan(ph) * (std::cos(th) - 2 * std::sin(th)));
      CHECK(s.exact(th, ph)[0] == doctest::Approx(expected).epsilon(1e-9));
      const auto e = s.exact(th, ph), r = s.extrapolated(th, ph);
      CHECK(std::abs(e[0] - r[0]) < 1e-6);
      CHECK(std::abs(e[1] - r[1]) < 1e-6);
    }
  }
}

TEST_CASE("invariant meridian") {
  const double th = -kPi + std::atan(0.5);
  for (int j = 1; j <= 50; ++j) {
    CHECK(std::abs(sphere_field(xt(), wt, th, kPi / 2 * j / 51.0)[0]) < 1e-6);
  }
}

TEST_CASE("equator equilibria of the four-line example") {
  const Analysis a = run_analysis(transcritical_fixture());
  const auto eq = equator_equilibria(xt(), wt, EquatorContext::from(a.critical_set, a.points.at(0)));
  REQUIRE(eq.size() == 10);
  int fast = 0;
  for (const auto& e : eq) {
    CHECK(std::abs(e.phi - kPi / 2) < 1e-12);
    CHECK(e.chart_check);
    CHECK(e.residual < 1e-9);
    if (e.origin.kind == EquilibriumOrigin::Kind::fast_foliation) {
      ++fast;
      CHECK((std::abs(e.theta) < 1e-9 || std::abs(std::abs(e.theta) - kPi) < 1e-9));
    } else {
      REQUIRE(e.origin.branches.size() == 1);
      // Equator angle lies on the branch direction.
      const Branch& b = a.critical_set.branch(e.origin.branches[0]);
      CHECK(std::abs(b.eval(std::cos(e.theta), std::sin(e.theta))) < 1e-9);
    }
  }
  CHECK(fast == 2);
}

TEST_CASE("eigenvalue classification") {
  using C = std::complex<double>;
  CHECK(classify_eigenvalues({C(-1, 0), C(-2, 0)}) == "stable node");
  CHECK(classify_eigenvalues({C(1, 0), C(2, 0)}) == "unstable node");
  CHECK(classify_eigenvalues({C(-1, 0), C(2, 0)}) == "saddle");
  CHECK(classify_eigenvalues({C(0, 0), C(2, 0)}) == "nonhyperbolic");
}

TEST_CASE("reflection symmetry") {
  const SymmetryResult p = symmetry_check_pitchfork(xp(), wp);
  CHECK(p.holds);
  CHECK(p.worst_deviation < 1e-6);
  CHECK_FALSE(symmetry_check_pitchfork(xt(), wt).holds);
}

TEST_CASE("connections") {
  for (const SystemFile& sys : {transcritical_fixture(), pitchfork_fixture()}) {
    const Analysis a = run_analysis(sys);
    const BlowupAnalysis b = run_blowup(a, *sys.weights, 20);
    REQUIRE(b.connections.size() == 1);
    const auto& c = b.connections[0];
    CHECK(c.result.connected);
    CHECK(std::min(c.result.closest_distance, c.result.match_gap) < 1e-2);
    CHECK(c.from.theta != c.to.theta);
  }
  // A pair on a branch that is not a canard does not connect.
  SphereEquilibrium from, to;
  from.phi = to.phi = kPi / 2;
  from.theta = -kPi + std::atan(0.5);
  to.theta = std::atan(0.5);
  const auto r = connection_trace(extend_field(field("(y-x)*(y+x)*(y-x/2)*(y+x/2)", "0"), field("1", "1")), wt, from, to);
  CHECK_FALSE(r.connected);
}

TEST_CASE("circle lemma") {
  for (int k = 1; k <= 4; ++k) {
    const CircleLemmaSystem s = circle_lemma(k);
    CHECK(s.max_deviation < 1e-12);
    REQUIRE(s.equilibria.size() == 3);
    // Interior root of cos^(2k) psi + tan psi = 0 in (pi/2, pi).
    double lo = kPi / 2 + 1e-12, hi = kPi;
    auto g = [k](double p) { return std::pow(std::cos(p), 2 * k) + std::tan(p); };
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < 0 ? lo : hi) = mid;
    }
    bool found = false;
    for (const auto& e : s.equilibria) {
      if (std::abs(e.psi - lo) < 1e-9) {
        found = true;
        CHECK_FALSE(e.stable);
        CHECK(e.hyperbolic);
      } else {
        CHECK((e.psi < 1e-12 || std::abs(e.psi - kPi) < 1e-12));
        CHECK(e.stable);
      }
    }
    CHECK(found);
  }
  CHECK_THROWS_AS(circle_lemma(0), AssumptionViolation);
}
