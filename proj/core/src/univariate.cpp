#include "canardkit/univariate.hpp"

#include <algorithm>
#include <cmath>

#include "canardkit/error.hpp"

namespace canardkit {

UniPoly::UniPoly(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

void UniPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

UniPoly UniPoly::from_multi(const MultiPoly& p, std::size_t var) {
  std::vector<Rational> c(p.degree_in(var) + 1);
  for (const auto& [e, coeff] : p.terms()) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (i != var && e[i] != 0) {
        throw AlgebraError("polynomial is not univariate in '" + p.vars()[var] + "'");
      }
    }
    c[e[var]] = coeff;
  }
  return UniPoly(std::move(c));
}

MultiPoly UniPoly::to_multi(const VarList& vars, std::size_t var) const {
  MultiPoly p(vars);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    Exponents e(vars.size(), 0);
    e[var] = static_cast<unsigned>(k);
    p.add_term(e, coeffs_[k]);
  }
  return p;
}

Rational UniPoly::eval(const Rational& x) const {
  Rational acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double UniPoly::eval(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + it->to_double();
  return acc;
}

UniPoly UniPoly::derivative() const {
  if (coeffs_.size() <= 1) return UniPoly();
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * Rational(static_cast<long>(k));
  return UniPoly(std::move(d));
}

UniPoly UniPoly::monic() const {
  if (is_zero()) return *this;
  const Rational inv = leading().reciprocal();
  std::vector<Rational> c = coeffs_;
  for (auto& q : c) q *= inv;
  return UniPoly(std::move(c));
}

UniPoly UniPoly::primitive_integer() const {
  if (is_zero()) return *this;
  mpz_class lcm_den = 1;
  for (const auto& q : coeffs_) {
    mpz_class d = q.denominator();
    mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), d.get_mpz_t());
  }
  std::vector<mpz_class> ints;
  mpz_class g = 0;
  for (const auto& q : coeffs_) {
    mpz_class v = q.numerator() * (lcm_den / q.denominator());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    ints.push_back(v);
  }
  if (ints.back() < 0) g = -g;
  std::vector<Rational> c;
  c.reserve(ints.size());
  for (auto& v : ints) c.emplace_back(mpz_class(v / g));
  return UniPoly(std::move(c));
}

UniPoly operator+(const UniPoly& a, const UniPoly& b) {
  std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return UniPoly(std::move(c));
}

UniPoly operator-(const UniPoly& a, const UniPoly& b) {
  std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] -= b.coeffs_[i];
  return UniPoly(std::move(c));
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return UniPoly();
  std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return UniPoly(std::move(c));
}

std::string UniPoly::to_string(const std::string& var) const {
  return to_multi(VarList({var}), 0).to_string();
}

std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
  if (b.is_zero()) throw AlgebraError("univariate division by zero");
  std::vector<Rational> r = a.coefficients();
  const int db = b.degree();
  if (a.degree() < db) return {UniPoly(), a};
  std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1));
  const Rational inv = b.leading().reciprocal();
  for (int k = a.degree(); k >= db; --k) {
    const Rational f = r[static_cast<std::size_t>(k)] * inv;
    q[static_cast<std::size_t>(k - db)] = f;
    if (f.is_zero()) continue;
    for (int j = 0; j <= db; ++j) {
      r[static_cast<std::size_t>(k - db + j)] -= f * b.coefficients()[static_cast<std::size_t>(j)];
    }
  }
  return {UniPoly(std::move(q)), UniPoly(std::move(r))};
}

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
  UniPoly x = a;
  UniPoly y = b;
  while (!y.is_zero()) {
    UniPoly r = divmod(x, y).second.monic();
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

UniPoly squarefree_part(const UniPoly& p) {
  if (p.degree() <= 0) return p.monic();
  const UniPoly g = gcd(p, p.derivative());
  return divmod(p, g).first.monic();
}

std::vector<UniPoly> sturm_sequence(const UniPoly& p) {
  std::vector<UniPoly> seq{p, p.derivative()};
  while (!seq.back().is_zero()) {
    UniPoly r = divmod(seq[seq.size() - 2], seq.back()).second;
    // Only signs matter, so rescale each remainder to tame coefficient growth.
    if (!r.is_zero()) r = r.primitive_integer() * UniPoly({Rational(r.leading().sign() < 0 ? 1 : -1)});
    seq.push_back(std::move(r));
  }
  seq.pop_back();
  return seq;
}

namespace {

int variations(const std::vector<UniPoly>& seq, const Rational& x) {
  int count = 0;
  int prev = 0;
  for (const auto& p : seq) {
    const int s = p.sign_at(x);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

Rational root_bound(const UniPoly& p) {
  // Cauchy bound: 1 + max |a_i / a_n|.
  Rational m;
  for (int i = 0; i < p.degree(); ++i) {
    const Rational r = (p.coefficients()[static_cast<std::size_t>(i)] / p.leading()).abs();
    if (r > m) m = r;
  }
  return m + Rational(1);
}

}  // namespace

int sturm_count(const std::vector<UniPoly>& sequence, const Rational& a, const Rational& b) {
  return variations(sequence, a) - variations(sequence, b);
}

std::vector<RootInterval> isolate_real_roots(const UniPoly& p, const Rational& lo, const Rational& hi,
                                             const Rational& width) {
  if (p.is_zero()) throw AlgebraError("root isolation of the zero polynomial");
  if (hi < lo) throw AlgebraError("root isolation over an empty interval");
  std::vector<RootInterval> roots;
  if (p.degree() == 0) return roots;
  const UniPoly sf = squarefree_part(p).primitive_integer();
  const auto seq = sturm_sequence(sf);
  const mpz_class lead = sf.leading().numerator();

  if (sf.sign_at(lo) == 0) roots.push_back({lo, lo, true});
  if (hi != lo && sf.sign_at(hi) == 0) roots.push_back({hi, hi, true});

  auto open_count = [&](const Rational& a, const Rational& b) {
    return sturm_count(seq, a, b) - (sf.sign_at(b) == 0 ? 1 : 0);
  };

  // A rational root k/L (L the integer leading coefficient) is the only
  // candidate grid point once the interval is shorter than 1/L.
  auto rational_candidate = [&](const Rational& a, const Rational& b) -> std::optional<Rational> {
    const Rational L(lead);
    mpz_class k0;
    mpz_class k1;
    const Rational al = a * L;
    const Rational bl = b * L;
    mpz_cdiv_q(k0.get_mpz_t(), al.value().get_num_mpz_t(), al.value().get_den_mpz_t());
    mpz_fdiv_q(k1.get_mpz_t(), bl.value().get_num_mpz_t(), bl.value().get_den_mpz_t());
    for (mpz_class k = k0; k <= k1; ++k) {
      const Rational c = Rational(mpq_class(k, lead));
      if (c > a && c < b && sf.sign_at(c) == 0) return c;
    }
    return std::nullopt;
  };

  const Rational inv_lead = Rational(mpq_class(1, abs(lead)));
  std::vector<std::pair<Rational, Rational>> stack{{lo, hi}};
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    const int n = open_count(a, b);
    if (n == 0) continue;
    const Rational w = b - a;
    if (n == 1 && w < width && w < inv_lead) {
      if (auto c = rational_candidate(a, b)) {
        roots.push_back({*c, *c, true});
      } else {
        roots.push_back({a, b, false});
      }
      continue;
    }
    const Rational mid = (a + b) / Rational(2);
    if (sf.sign_at(mid) == 0) roots.push_back({mid, mid, true});
    stack.emplace_back(mid, b);
    stack.emplace_back(a, mid);
  }
  std::sort(roots.begin(), roots.end(), [](const RootInterval& x, const RootInterval& y) { return x.lo < y.lo; });
  return roots;
}

std::vector<RootInterval> isolate_real_roots(const UniPoly& p, const Rational& width) {
  if (p.degree() <= 0) return {};
  const Rational bound = root_bound(p);
  return isolate_real_roots(p, -bound, bound, width);
}

std::vector<Rational> rational_roots(const UniPoly& p) {
  std::vector<Rational> out;
  if (p.degree() <= 0) return out;
  for (const auto& r : isolate_real_roots(p, Rational(1, 1024))) {
    if (r.exact) out.push_back(r.lo);
  }
  return out;
}

}  // namespace canardkit
