#include "canardkit/algebra.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "canardkit/error.hpp"
#include "canardkit/univariate.hpp"

namespace canardkit {

namespace {

std::optional<std::size_t> first_involved(const MultiPoly& p) {
  for (std::size_t i = 0; i < p.vars().size(); ++i) {
    if (p.involves(i)) return i;
  }
  return std::nullopt;
}

std::vector<MultiPoly> coeffs_in(const MultiPoly& p, std::size_t var) {
  std::vector<MultiPoly> c(p.degree_in(var) + 1, MultiPoly(p.vars()));
  for (const auto& [e, coeff] : p.terms()) {
    Exponents rest = e;
    rest[var] = 0;
    c[e[var]].add_term(rest, coeff);
  }
  return c;
}

MultiPoly leading_coeff_in(const MultiPoly& p, std::size_t var) { return coeffs_in(p, var).back(); }

MultiPoly x_power(const VarList& vars, std::size_t var, unsigned k) {
  Exponents e(vars.size(), 0);
  e[var] = k;
  return MultiPoly::monomial(vars, e, Rational(1));
}

MultiPoly divide_or_throw(const MultiPoly& p, const MultiPoly& d) {
  auto q = exact_divide(p, d);
  if (!q) throw AlgebraError("internal error: expected exact division by " + d.to_string());
  return *q;
}

// lc(b)^(deg a - deg b + 1) * a reduced modulo b, as polynomials in `var`.
MultiPoly pseudo_remainder(const MultiPoly& a, const MultiPoly& b, std::size_t var) {
  const unsigned db = b.degree_in(var);
  const unsigned da = a.degree_in(var);
  if (da < db) return a;
  const MultiPoly lb = leading_coeff_in(b, var);
  MultiPoly r = a;
  unsigned steps = da - db + 1;
  while (!r.is_zero() && r.degree_in(var) >= db) {
    const unsigned dr = r.degree_in(var);
    const MultiPoly lr = leading_coeff_in(r, var);
    r = lb * r - lr * x_power(r.vars(), var, dr - db) * b;
    --steps;
  }
  return steps == 0 ? r : r * lb.pow(steps);
}

// Scales p to integer coefficients with unit content and positive leading term.
MultiPoly integer_primitive(const MultiPoly& p) {
  if (p.is_zero()) return p;
  mpz_class den = 1, num = 0;
  for (const auto& [e, c] : p.terms()) {
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.denominator().get_mpz_t());
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), c.numerator().get_mpz_t());
  }
  Rational scale = Rational(den) / Rational(num);
  if (p.leading_coefficient().sign() < 0) scale = -scale;
  return p * scale;
}

MultiPoly primitive_part(const MultiPoly& p, std::size_t var) {
  if (p.is_zero()) return p;
  return integer_primitive(divide_or_throw(integer_primitive(p), content_in(p, var)));
}

}  // namespace

MultiPoly content_in(const MultiPoly& p, std::size_t var) {
  MultiPoly g(p.vars());
  for (const auto& c : coeffs_in(p, var)) {
    if (c.is_zero()) continue;
    g = g.is_zero() ? c.monic() : gcd_poly(g, c);
    if (g.is_constant()) break;
  }
  return g.is_zero() ? MultiPoly::constant(p.vars(), Rational(1)) : g;
}

MultiPoly gcd_poly(const MultiPoly& p, const MultiPoly& q) {
  if (!(p.vars() == q.vars())) throw AlgebraError("polynomials are over different variable lists");
  if (p.is_zero() && q.is_zero()) throw AlgebraError("gcd of two zero polynomials");
  if (p.is_zero()) return q.monic();
  if (q.is_zero()) return p.monic();
  const MultiPoly one = MultiPoly::constant(p.vars(), Rational(1));
  if (p.is_constant() || q.is_constant()) return one;

  std::size_t var = *first_involved(p);
  if (auto vq = first_involved(q); vq && *vq < var) var = *vq;
  if (!p.involves(var)) return gcd_poly(p, content_in(q, var));
  if (!q.involves(var)) return gcd_poly(content_in(p, var), q);

  const MultiPoly cp = content_in(p, var);
  const MultiPoly cq = content_in(q, var);
  const MultiPoly content_gcd = gcd_poly(cp, cq);

  MultiPoly a = integer_primitive(divide_or_throw(p, cp));
  MultiPoly b = integer_primitive(divide_or_throw(q, cq));
  if (a.degree_in(var) < b.degree_in(var)) std::swap(a, b);
  // Subresultant remainder sequence; the content is removed once at the end.
  MultiPoly g = one;
  MultiPoly h = one;
  while (true) {
    const unsigned delta = a.degree_in(var) - b.degree_in(var);
    MultiPoly r = pseudo_remainder(a, b, var);
    if (r.is_zero()) break;
    if (!r.involves(var)) {
      b = one;
      break;
    }
    a = std::move(b);
    b = divide_or_throw(r, g * h.pow(delta));
    g = leading_coeff_in(a, var);
    if (delta == 0) {
      // h unchanged
    } else if (delta == 1) {
      h = g;
    } else {
      h = divide_or_throw(g.pow(delta), h.pow(delta - 1));
    }
  }
  return (content_gcd * primitive_part(b, var)).monic();
}

MultiPoly Factorization::expand(const VarList& vars) const {
  MultiPoly r = MultiPoly::constant(vars, unit);
  for (const auto& f : factors) r = r * f.poly.with_vars(vars).pow(f.multiplicity);
  return r;
}

bool Factorization::fully_split() const {
  return std::all_of(factors.begin(), factors.end(), [](const Factor& f) { return f.irreducible; });
}

namespace {

void sort_factors(std::vector<Factor>& factors) {
  std::sort(factors.begin(), factors.end(), [](const Factor& a, const Factor& b) {
    if (a.multiplicity != b.multiplicity) return a.multiplicity < b.multiplicity;
    return grlex_less(b.poly.leading_exponents(), a.poly.leading_exponents()) ||
           (a.poly.leading_exponents() == b.poly.leading_exponents() && a.poly.to_string() < b.poly.to_string());
  });
}

void fix_unit(Factorization& f, const MultiPoly& p) {
  f.unit = Rational(1);
  const MultiPoly prod = f.expand(p.vars());
  f.unit = p.leading_coefficient() / prod.leading_coefficient();
}

// Yun's algorithm in `var` for a polynomial primitive in `var`.
void yun(const MultiPoly& f, std::size_t var, std::vector<Factor>& out) {
  const MultiPoly df = differentiate(f, var);
  const MultiPoly a0 = gcd_poly(f, df);
  MultiPoly b = divide_or_throw(f, a0);
  MultiPoly c = divide_or_throw(df, a0);
  MultiPoly d = c - differentiate(b, var);
  unsigned i = 1;
  while (!b.is_constant()) {
    const MultiPoly a = gcd_poly(b, d);
    if (!a.is_constant()) out.push_back({a.monic(), i, true});
    b = divide_or_throw(b, a);
    c = divide_or_throw(d, a);
    d = c - differentiate(b, var);
    ++i;
  }
}

void decompose(const MultiPoly& p, std::vector<Factor>& out) {
  if (p.is_constant()) return;
  const std::size_t var = *first_involved(p);
  const MultiPoly content = content_in(p, var);
  decompose(content, out);
  yun(divide_or_throw(p, content), var, out);
}

MultiPoly homogeneous_top(const MultiPoly& p) {
  MultiPoly top(p.vars());
  const unsigned d = p.total_degree();
  for (const auto& [e, c] : p.terms()) {
    unsigned deg = 0;
    for (auto k : e) deg += k;
    if (deg == d) top.add_term(e, c);
  }
  return top;
}

// Linear factors of a bivariate polynomial in variables (vi, vj), found from
// the linear factors of its top-degree form and exact line restriction.
std::optional<MultiPoly> find_linear_factor(const MultiPoly& p, std::size_t vi, std::size_t vj) {
  const VarList& vars = p.vars();
  const MultiPoly top = homogeneous_top(p);
  const unsigned d = top.total_degree();

  // Binary form T(X, Y) -> T(t, 1), coefficient of t^k is that of X^k Y^(d-k).
  std::vector<Rational> tc(d + 1);
  for (const auto& [e, c] : top.terms()) tc[e[vi]] = c;
  const UniPoly t_poly(tc);

  // Candidate directions a*X + b*Y dividing the top form.
  std::vector<std::pair<Rational, Rational>> directions;
  if (t_poly.degree() < static_cast<int>(d)) directions.emplace_back(Rational(0), Rational(1));
  for (const auto& rho : rational_roots(t_poly)) directions.emplace_back(Rational(1), -rho);

  const VarList aux({"__s", "__c"});
  const MultiPoly s = MultiPoly::variable(aux, "__s");
  const MultiPoly cvar = MultiPoly::variable(aux, "__c");
  for (const auto& [a, b] : directions) {
    // Restrict p to the line a*X + b*Y + c = 0 parameterised by s.
    std::map<std::string, MultiPoly> bind;
    if (!a.is_zero()) {
      bind.emplace(vars[vi], (s * (-b) - cvar) * a.reciprocal());
      bind.emplace(vars[vj], s);
    } else {
      bind.emplace(vars[vj], (s * (-a) - cvar) * b.reciprocal());
      bind.emplace(vars[vi], s);
    }
    const MultiPoly restricted = substitute(p, bind, aux);
    std::map<unsigned, std::vector<Rational>> by_s;
    for (const auto& [e, c] : restricted.terms()) {
      auto& coeffs = by_s[e[0]];
      if (coeffs.size() <= e[1]) coeffs.resize(e[1] + 1);
      coeffs[e[1]] = c;
    }
    UniPoly g;
    for (auto& [k, coeffs] : by_s) g = gcd(g, UniPoly(coeffs));
    if (g.degree() <= 0) continue;
    for (const auto& c0 : rational_roots(g)) {
      MultiPoly line = MultiPoly::variable(vars, vars[vi]) * a + MultiPoly::variable(vars, vars[vj]) * b +
                       MultiPoly::constant(vars, c0);
      line = line.monic();
      if (exact_divide(p, line)) return line;
    }
  }
  return std::nullopt;
}

// Splits a square-free polynomial into irreducible pieces where possible.
std::vector<Factor> split_squarefree(const MultiPoly& f, unsigned multiplicity) {
  std::vector<std::size_t> involved;
  for (std::size_t i = 0; i < f.vars().size(); ++i) {
    if (f.involves(i)) involved.push_back(i);
  }
  std::vector<Factor> out;
  MultiPoly rest = f;
  if (involved.size() == 1) {
    UniPoly u = UniPoly::from_multi(rest, involved[0]);
    for (const auto& r : rational_roots(u)) {
      const MultiPoly lin = MultiPoly::variable(f.vars(), f.vars()[involved[0]]) - MultiPoly::constant(f.vars(), r);
      out.push_back({lin, multiplicity, true});
      rest = divide_or_throw(rest, lin);
    }
  } else if (involved.size() == 2) {
    while (rest.total_degree() >= 2) {
      auto lin = find_linear_factor(rest, involved[0], involved[1]);
      if (!lin) break;
      out.push_back({*lin, multiplicity, true});
      rest = divide_or_throw(rest, *lin);
    }
  }
  if (!rest.is_constant()) {
    // Without linear factors, degree <= 3 in at most two variables is irreducible.
    const bool proven = rest.total_degree() <= 1 || (involved.size() <= 2 && rest.total_degree() <= 3);
    out.push_back({rest.monic(), multiplicity, proven});
  }
  return out;
}

}  // namespace

Factorization squarefree_decompose(const MultiPoly& p) {
  if (p.is_zero()) throw AlgebraError("square-free factorization of the zero polynomial");
  Factorization f;
  decompose(p, f.factors);
  for (auto& factor : f.factors) factor.irreducible = factor.poly.total_degree() <= 1;
  sort_factors(f.factors);
  fix_unit(f, p);
  return f;
}

Factorization squarefree_factor(const MultiPoly& p) {
  if (p.is_zero()) throw AlgebraError("square-free factorization of the zero polynomial");
  std::vector<Factor> parts;
  decompose(p, parts);
  Factorization f;
  for (const auto& part : parts) {
    auto pieces = split_squarefree(part.poly, part.multiplicity);
    f.factors.insert(f.factors.end(), pieces.begin(), pieces.end());
  }
  sort_factors(f.factors);
  fix_unit(f, p);
  return f;
}

MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, std::string_view var) {
  if (!(p.vars() == q.vars())) throw AlgebraError("polynomials are over different variable lists");
  const std::size_t v = p.vars().require(var);
  if (p.is_zero() || q.is_zero()) return MultiPoly(p.vars());
  const unsigned m = p.degree_in(v);
  const unsigned n = q.degree_in(v);
  if (m == 0) return p.pow(n);
  if (n == 0) return q.pow(m);

  const auto pc = coeffs_in(p, v);
  const auto qc = coeffs_in(q, v);
  const std::size_t size = m + n;
  std::vector<std::vector<MultiPoly>> mat(size, std::vector<MultiPoly>(size, MultiPoly(p.vars())));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k <= m; ++k) mat[r][r + k] = pc[m - k];
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = 0; k <= n; ++k) mat[n + r][r + k] = qc[n - k];
  }

  // Bareiss fraction-free elimination.
  bool negate = false;
  MultiPoly prev = MultiPoly::constant(p.vars(), Rational(1));
  for (std::size_t k = 0; k + 1 < size; ++k) {
    if (mat[k][k].is_zero()) {
      std::size_t swap_row = k + 1;
      while (swap_row < size && mat[swap_row][k].is_zero()) ++swap_row;
      if (swap_row == size) return MultiPoly(p.vars());
      std::swap(mat[k], mat[swap_row]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < size; ++i) {
      for (std::size_t j = k + 1; j < size; ++j) {
        mat[i][j] = divide_or_throw(mat[k][k] * mat[i][j] - mat[i][k] * mat[k][j], prev);
      }
      mat[i][k] = MultiPoly(p.vars());
    }
    prev = mat[k][k];
  }
  MultiPoly det = mat[size - 1][size - 1];
  return negate ? -det : det;
}

}  // namespace canardkit
