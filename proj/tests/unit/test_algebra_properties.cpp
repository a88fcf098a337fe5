// Randomized ring, gcd, factorization and substitution invariants.
#include <random>

#include "canardkit/algebra.hpp"
#include "canardkit/multipoly.hpp"
#include "canardkit/parser.hpp"
#include "doctest.h"

using namespace canardkit;

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(unsigned long long seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  Rational coefficient() {
    int n = 0;
    while (n == 0) n = uniform(-9, 9);
    return Rational(n, uniform(1, 4));
  }

  // Sparse polynomial in x, y, eps of total degree <= max_degree.
  MultiPoly poly(unsigned max_degree, int max_terms) {
    MultiPoly p(default_vars());
    const int terms = uniform(1, max_terms);
    for (int t = 0; t < terms; ++t) {
      const unsigned d = static_cast<unsigned>(uniform(0, static_cast<int>(max_degree)));
      const unsigned a = static_cast<unsigned>(uniform(0, static_cast<int>(d)));
      const unsigned b = static_cast<unsigned>(uniform(0, static_cast<int>(d - a)));
      p.add_term({a, b, d - a - b}, coefficient());
    }
    return p;
  }

  MultiPoly nonconstant(unsigned max_degree, int max_terms) {
    for (;;) {
      MultiPoly p = poly(max_degree, max_terms);
      if (!p.is_constant()) return p;
    }
  }

  std::array<Rational, 3> point() { return {Rational(uniform(-20, 20), uniform(1, 7)), Rational(uniform(-20, 20), uniform(1, 7)), Rational(uniform(-20, 20), uniform(1, 7))}; }
};

Rational at(const MultiPoly& p, const std::array<Rational, 3>& q) { return p.eval(q); }

}  // namespace

TEST_CASE("ring axioms hold pointwise") {
  Gen g(11);
  int cases = 0;
  for (int i = 0; i < 400; ++i, ++cases) {
    const MultiPoly a = g.poly(3, 5), b = g.poly(3, 5), c = g.poly(3, 4);
    const auto q = g.point();
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(at(a * b + c, q) == at(a, q) * at(b, q) + at(c, q));
    CHECK(at(a - b, q) == at(a, q) - at(b, q));
    CHECK((a - a).is_zero());
    CHECK(parse_poly((a * b).to_string()) == a * b);
  }
  CHECK(cases == 400);
}

TEST_CASE("gcd divides both inputs and leaves coprime cofactors") {
  Gen g(23);
  int cases = 0;
  for (int i = 0; i < 250; ++i, ++cases) {
    const MultiPoly common = g.nonconstant(2, 3);
    const MultiPoly a = g.nonconstant(2, 3) * common;
    const MultiPoly b = g.nonconstant(2, 3) * common;
    const MultiPoly d = gcd_poly(a, b);
    REQUIRE(!d.is_zero());
    CHECK(d.leading_coefficient() == Rational(1));
    const auto qa = exact_divide(a, d), qb = exact_divide(b, d);
    REQUIRE(qa.has_value());
    REQUIRE(qb.has_value());
    CHECK(gcd_poly(*qa, *qb).is_constant());
    // The planted common factor divides the gcd.
    CHECK(exact_divide(d, common).has_value());
    CHECK(d.total_degree() <= 4);
  }
  CHECK(cases == 250);
}

TEST_CASE("square-free factorization reproduces its input") {
  Gen g(37);
  int cases = 0;
  for (int i = 0; i < 250; ++i, ++cases) {
    const MultiPoly f1 = g.nonconstant(2, 3), f2 = g.nonconstant(1, 3), f3 = g.nonconstant(1, 2);
    const unsigned e = static_cast<unsigned>(g.uniform(1, 2));
    const MultiPoly p = f1 * f2.pow(e) * f3 * Rational(g.uniform(1, 5), g.uniform(1, 5));
    REQUIRE(p.total_degree() <= 6);
    const Factorization f = squarefree_factor(p);
    CHECK(f.expand(default_vars()) == p);
    for (std::size_t j = 0; j < f.factors.size(); ++j) {
      CHECK(f.factors[j].poly.leading_coefficient() == Rational(1));
      CHECK_FALSE(f.factors[j].poly.is_constant());
      for (std::size_t k = j + 1; k < f.factors.size(); ++k) {
        CHECK(gcd_poly(f.factors[j].poly, f.factors[k].poly).is_constant());
      }
    }
    // Square-free parts have no repeated factor: a square divides f and every partial.
    for (const auto& fac : squarefree_decompose(p).factors) {
      MultiPoly common = fac.poly;
      for (std::size_t v = 0; v < 3; ++v) {
        if (fac.poly.degree_in(v) > 0) common = gcd_poly(common, differentiate(fac.poly, v));
      }
      CHECK(common.is_constant());
    }
  }
  CHECK(cases == 250);
}

TEST_CASE("substitution is a ring homomorphism") {
  Gen g(41);
  const VarList& v = default_vars();
  int cases = 0;
  for (int i = 0; i < 200; ++i, ++cases) {
    const MultiPoly a = g.poly(3, 4), b = g.poly(3, 4);
    const std::map<std::string, MultiPoly> sub{{"x", g.poly(2, 3)}, {"y", g.poly(1, 2)}};
    const MultiPoly sa = substitute(a, sub, v), sb = substitute(b, sub, v);
    CHECK(substitute(a * b, sub, v) == sa * sb);
    CHECK(substitute(a + b, sub, v) == sa + sb);
    // Composition agrees with evaluating at the image point.
    const auto q = g.point();
    const std::array<Rational, 3> image{at(sub.at("x"), q), at(sub.at("y"), q), q[2]};
    CHECK(at(sa, q) == at(a, image));
  }
  CHECK(cases == 200);
}
