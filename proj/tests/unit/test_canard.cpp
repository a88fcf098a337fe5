#include "canardkit/canard.hpp"
#include "canardkit/error.hpp"
#include "canardkit/parser.hpp"
#include "doctest.h"

using namespace canardkit;

namespace {

PolyVectorField field(const char* a, const char* b) { return PolyVectorField({parse_poly(a), parse_poly(b)}); }

struct Setup {
  CriticalSet cs;
  SingularPoint ps;
  Setup(const char* x0) : cs(build_critical_set(field(x0, "0"))) { ps = find_singular_points(cs, Box{}).at(0); }
  const Branch& find(const char* poly) const {
    const MultiPoly want = parse_poly(poly).monic();
    for (const auto& b : cs.branches) {
      if (b.defining_poly.monic() == want) return b;
    }
    throw AlgebraError("branch not found");
  }
  CanardReport report(const PolyVectorField& x1) const {
    return detect_singular_canards(x1, cs, ps, FastFrame(cs), Box{});
  }
};

const Setup& transcritical() {
  static const Setup s("(y-x)*(y+x)*(y-x/2)*(y+x/2)");
  return s;
}

const Setup& pitchfork() {
  static const Setup s("(x+y/2)*(x-y/2)*(y-x^2)");
  return s;
}

// u ^ v = 0 iff parallel.
bool parallel(const std::array<Rational, 2>& u, const std::array<Rational, 2>& v) { return wedge(u, v).is_zero(); }

}  // namespace

TEST_CASE("tangent at a point") {
  const Setup& t = transcritical();
  CHECK(parallel(tangent_at(t.find("y-x/2"), Rational(0), Rational(0)), {Rational(2), Rational(1)}));
  CHECK(parallel(tangent_at(pitchfork().find("y-x^2"), Rational(0), Rational(0)), {Rational(1), Rational(0)}));
  const Branch line(1, parse_poly("x+y"));
  CHECK(parallel(tangent_at(line, Rational(1), Rational(-1)), {Rational(-1), Rational(1)}));
  CHECK_THROWS_AS(tangent_at(line, Rational(1), Rational(1)), AlgebraError);
  const Branch cusp(1, parse_poly("y^2-x^3"));
  CHECK_THROWS_AS(tangent_at(cusp, Rational(0), Rational(0)), AlgebraError);
}

TEST_CASE("wedge values of the four-line example") {
  const Setup& t = transcritical();
  const PolyVectorField x1 = field("1", "1/2");
  const WedgeValue w = wedge_condition(x1, t.ps, t.find("y-x/2"));
  REQUIRE(w.exact.has_value());
  CHECK(w.exact->is_zero());
  CHECK(w.vanishes);
  // det[(1, 1/2), (1, 1)] up to the orientation of the tangent.
  const WedgeValue d = wedge_condition(x1, t.ps, t.find("y-x"));
  REQUIRE(d.exact.has_value());
  CHECK(d.exact->abs() == Rational(1, 2));
  for (const char* b : {"y+x", "y+x/2"}) {
    const WedgeValue v = wedge_condition(x1, t.ps, t.find(b));
    REQUIRE(v.exact.has_value());
    CHECK_FALSE(v.exact->is_zero());
  }
  CHECK_THROWS_AS(wedge_condition(field("x", "y"), t.ps, t.find("y-x")), AssumptionViolation);
}

TEST_CASE("wedge is antisymmetric and bilinear") {
  const std::array<Rational, 2> u{Rational(3, 2), Rational(-1)}, v{Rational(2), Rational(5, 7)};
  CHECK(wedge(u, v) == -wedge(v, u));
  const Rational c(-4, 3);
  CHECK(wedge({c * u[0], c * u[1]}, v) == c * wedge(u, v));
}

TEST_CASE("canard selection") {
  const CanardReport r = transcritical().report(field("1", "1/2"));
  REQUIRE(r.canard_branches().size() == 1);
  const Branch& b = transcritical().cs.branch(r.canard_branches()[0]);
  CHECK(b.defining_poly.monic() == parse_poly("x-2*y").monic());
  for (const auto& bc : r.per_branch) {
    if (bc.is_canard) CHECK(bc.orientation_note == "attracting->repelling");
  }

  const CanardReport p = pitchfork().report(field("-1", "-x"));
  REQUIRE(p.canard_branches().size() == 1);
  CHECK(pitchfork().cs.branch(p.canard_branches()[0]).defining_poly.monic() == parse_poly("y-x^2").monic());

  // X1 = (1, 1) selects the line y = x instead.
  const CanardReport d = transcritical().report(field("1", "1"));
  REQUIRE(d.canard_branches().size() == 1);
  CHECK(transcritical().cs.branch(d.canard_branches()[0]).defining_poly.monic() == parse_poly("y-x").monic());
}

TEST_CASE("verdict is invariant under scaling X1") {
  const auto base = transcritical().report(field("1", "1/2")).canard_branches();
  for (const char* s : {"-3", "7/5", "1/1000"}) {
    const MultiPoly k = parse_poly(s);
    const auto scaled = transcritical().report(PolyVectorField({k, k * parse_poly("1/2")})).canard_branches();
    CHECK(scaled == base);
  }
}

TEST_CASE("projection onto the branch along the fast fibres") {
  const Setup& t = transcritical();
  const FastFrame frame(t.cs);
  const Branch& b = t.find("y-x/2");
  const ReducedFlowSample s =
      project_rho(field("1", "1/2"), PlanePoint::from_exact(Rational(1), Rational(1, 2)), b, frame);
  REQUIRE(s.well_defined);
  REQUIRE(s.exact_alpha.has_value());
  REQUIRE(s.exact_beta.has_value());
  CHECK(s.exact_beta->is_zero());
  // alpha times the tangent reproduces X1.
  const auto tan = tangent_at(b, Rational(1), Rational(1, 2));
  CHECK(*s.exact_alpha * tan[0] == Rational(1));
  CHECK(*s.exact_alpha * tan[1] == Rational(1, 2));

  // A purely fast perturbation has no tangential part.
  const ReducedFlowSample f =
      project_rho(field("1", "0"), PlanePoint::from_exact(Rational(1), Rational(1, 2)), b, frame);
  CHECK(f.exact_alpha->is_zero());
}

TEST_CASE("projection residual vanishes exactly on every sample") {
  for (const Setup* s : {&transcritical(), &pitchfork()}) {
    const FastFrame frame(s->cs);
    const PolyVectorField x1 = field("1+x", "1/2-y");
    for (const auto& b : s->cs.branches) {
      for (int side : {-1, 1}) {
        const HalfBranch hb(b, s->ps.location, side, Box{});
        for (const auto& q : hb.samples(64)) {
          const ReducedFlowSample r = project_rho(x1, q, b, frame);
          CHECK(r.well_defined);
          if (q.is_exact()) {
            REQUIRE(r.exact_alpha.has_value());
            const auto t = tangent_at(b, (*q.exact)[0], (*q.exact)[1]);
            const auto g = frame.at((*q.exact)[0], (*q.exact)[1]);
            const auto x = eval_field(x1, (*q.exact)[0], (*q.exact)[1]);
            CHECK(x[0] == *r.exact_alpha * t[0] + *r.exact_beta * g[0]);
            CHECK(x[1] == *r.exact_alpha * t[1] + *r.exact_beta * g[1]);
          } else {
            CHECK(r.residual < 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("rho at the singular point is X1 itself") {
  const auto v = rho_at_singular_point(field("1", "1/2"), transcritical().ps);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 0.5);
}

TEST_CASE("frame validation") {
  const Setup& t = transcritical();
  CHECK(validate_frame(FastFrame(t.cs), t.cs, t.ps, Box{}).empty());
  // Fibres along y = x are tangent to that branch.
  const auto bad = validate_frame(FastFrame(parse_poly("1"), parse_poly("1")), t.cs, t.ps, Box{});
  CHECK_FALSE(bad.empty());
}
