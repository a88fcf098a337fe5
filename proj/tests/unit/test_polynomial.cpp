#include <cmath>

#include "canardkit/compiled_poly.hpp"
#include "canardkit/error.hpp"
#include "canardkit/multipoly.hpp"
#include "canardkit/parser.hpp"
#include "canardkit/univariate.hpp"
#include "doctest.h"

using namespace canardkit;

TEST_CASE("parse and print canonical form") {
  CHECK(parse_poly("(y-x)*(y+x)").to_string() == "-x^2 + y^2");
  CHECK(parse_poly("x/2 - 5/4*x*y + 1/2").to_string() == "-5/4*x*y + 1/2*x + 1/2");
  CHECK(parse_poly("0").to_string() == "0");
  CHECK(parse_poly("-(x - eps)^2").to_string() == "-x^2 + 2*x*eps - eps^2");
  const MultiPoly p = parse_poly("3*x^3*y - 7/3*y^2*eps + x - 1");
  CHECK(parse_poly(p.to_string()) == p);
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_poly("2x"), ParseError);
  CHECK_THROWS_AS(parse_poly("x +"), ParseError);
  CHECK_THROWS_AS(parse_poly("x/y"), ParseError);
  CHECK_THROWS_AS(parse_poly("x/0"), ParseError);
  CHECK_THROWS_AS(parse_poly("z"), ParseError);
  CHECK_THROWS_AS(parse_poly("(x"), ParseError);
  try {
    parse_poly("x + 2y");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 6);
  }
}

TEST_CASE("custom variable lists") {
  const VarList v{"r", "u", "v"};
  const MultiPoly p = parse_poly("r^2*u - v", v);
  CHECK(p.vars() == v);
  CHECK(p.degree_in(0) == 2);
  CHECK_THROWS_AS(parse_poly("x", v), ParseError);
}

TEST_CASE("grlex ordering and leading term") {
  const MultiPoly p = parse_poly("y^3 + x*y^2 + x^2");
  CHECK(p.leading_exponents() == Exponents{1, 2, 0});
  CHECK(p.total_degree() == 3);
  CHECK(p.monic().leading_coefficient() == Rational(1));
  CHECK(grlex_less({0, 1, 0}, {1, 0, 0}));
  CHECK(grlex_less({2, 0, 0}, {0, 0, 3}));
}

TEST_CASE("ring operations") {
  const MultiPoly a = parse_poly("x + y"), b = parse_poly("x - y");
  CHECK(a * b == parse_poly("x^2 - y^2"));
  CHECK(a.pow(3) == a * a * a);
  CHECK((a - a).is_zero());
  CHECK(a * Rational(1, 2) == parse_poly("x/2 + y/2"));
  CHECK(parse_poly("7").constant_value() == Rational(7));
  CHECK_FALSE(a.constant_value().has_value());
}

TEST_CASE("differentiate, substitute, evaluate") {
  const MultiPoly p = parse_poly("x^3*y - y*eps");
  CHECK(differentiate(p, "x") == parse_poly("3*x^2*y"));
  CHECK(differentiate(p, "eps") == parse_poly("-y"));
  const VarList& v = default_vars();
  const MultiPoly s = substitute(p, {{"x", parse_poly("2*y")}}, v);
  CHECK(s == parse_poly("8*y^4 - y*eps"));
  const Rational pt[] = {Rational(1, 2), Rational(2), Rational(3)};
  CHECK(p.eval(pt) == Rational(1, 4) - Rational(6));
  CHECK(eval_poly(p, std::map<std::string, double>{{"x", 1.0}, {"y", 2.0}, {"eps", 0.5}}) == doctest::Approx(1.0));
}

TEST_CASE("valuation and exact division") {
  const VarList v{"r", "u"};
  const MultiPoly p = parse_poly("r^3*u + r^5", v);
  CHECK(r_valuation(p, "r") == 3);
  CHECK(divide_by_power(p, "r", 3) == parse_poly("u + r^2", v));
  CHECK_THROWS_AS(divide_by_power(p, "r", 4), AlgebraError);
  CHECK(r_valuation(MultiPoly(v), "r") == kInfiniteValuation);
  const auto q = exact_divide(parse_poly("x^2 - y^2"), parse_poly("x + y"));
  REQUIRE(q.has_value());
  CHECK(*q == parse_poly("x - y"));
  CHECK_FALSE(exact_divide(parse_poly("x^2 + y^2"), parse_poly("x + y")).has_value());
}

TEST_CASE("compiled evaluation agrees with exact evaluation") {
  const MultiPoly p = parse_poly("x^4/4 - 5/4*x^2*y^2 + y^4 + eps*x - 3");
  const CompiledPoly c(p);
  const double pt[] = {0.3, -0.7, 0.01};
  const Rational qt[] = {Rational::from_double(0.3), Rational::from_double(-0.7), Rational::from_double(0.01)};
  CHECK(c(pt) == doctest::Approx(p.eval(qt).to_double()).epsilon(1e-14));
  const CompiledPlanarField f(PolyVectorField({parse_poly("x*y"), parse_poly("x^2 - y")}), {"x", "y"});
  const auto j = f.jacobian(2.0, 3.0);
  CHECK(j[0] == 3.0);
  CHECK(j[1] == 2.0);
  CHECK(j[2] == 4.0);
  CHECK(j[3] == -1.0);
}

TEST_CASE("univariate division, gcd and Sturm") {
  const UniPoly p({Rational(-2), Rational(0), Rational(1)});  // t^2 - 2
  const UniPoly q({Rational(-1), Rational(1)});              // t - 1
  const auto [quo, rem] = divmod(p, q);
  CHECK(quo * q + rem == p);
  CHECK(rem.degree() < q.degree());
  CHECK(gcd(p * q, q * q) == q);
  const auto seq = sturm_sequence(p);
  CHECK(sturm_count(seq, Rational(-2), Rational(2)) == 2);
  CHECK(sturm_count(seq, Rational(0), Rational(2)) == 1);
  const auto roots = isolate_real_roots(p, Rational(1, 1000000));
  REQUIRE(roots.size() == 2);
  CHECK(roots[1].approx() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK_FALSE(roots[1].exact);
}

TEST_CASE("rational roots are exact") {
  // 4 t^3 - 4 t^2 - t + 1 = (2t - 1)(2t + 1)(t - 1)
  const UniPoly p({Rational(1), Rational(-1), Rational(-4), Rational(4)});
  const auto r = rational_roots(p);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == Rational(-1, 2));
  CHECK(r[1] == Rational(1, 2));
  CHECK(r[2] == Rational(1));
  const auto iso = isolate_real_roots(p, Rational(-10), Rational(10), Rational(1, 100));
  REQUIRE(iso.size() == 3);
  for (const auto& i : iso) CHECK(i.exact);
  CHECK(squarefree_part(p * p) == p.monic());
}
