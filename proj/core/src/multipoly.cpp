#include "canardkit/multipoly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "canardkit/error.hpp"

namespace canardkit {

namespace {

std::shared_ptr<const std::vector<std::string>> empty_names() {
  static const auto names = std::make_shared<const std::vector<std::string>>();
  return names;
}

unsigned degree_of(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0U); }

std::string monomial_text(const VarList& vars, const Exponents& e) {
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += vars[i];
    if (e[i] > 1) out += '^' + std::to_string(e[i]);
  }
  return out;
}

}  // namespace

VarList::VarList() : names_(empty_names()) {}

VarList::VarList(std::initializer_list<std::string> names)
    : VarList(std::vector<std::string>(names)) {}

VarList::VarList(std::vector<std::string> names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) throw AlgebraError("empty variable name");
    for (std::size_t j = 0; j < i; ++j) {
      if (names[i] == names[j]) throw AlgebraError("duplicate variable '" + names[i] + "'");
    }
  }
  names_ = std::make_shared<const std::vector<std::string>>(std::move(names));
}

std::optional<std::size_t> VarList::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_->size(); ++i) {
    if ((*names_)[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t VarList::require(std::string_view name) const {
  if (auto i = index_of(name)) return *i;
  throw AlgebraError("unknown variable '" + std::string(name) + "'");
}

const VarList& default_vars() {
  static const VarList vars{"x", "y", "eps"};
  return vars;
}

bool grlex_less(const Exponents& a, const Exponents& b) {
  const unsigned da = degree_of(a);
  const unsigned db = degree_of(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

MultiPoly::MultiPoly(VarList vars) : vars_(std::move(vars)) {}

MultiPoly MultiPoly::constant(VarList vars, const Rational& value) {
  MultiPoly p(std::move(vars));
  p.add_term(Exponents(p.vars_.size(), 0), value);
  return p;
}

MultiPoly MultiPoly::variable(VarList vars, std::string_view name) {
  MultiPoly p(std::move(vars));
  Exponents e(p.vars_.size(), 0);
  e[p.vars_.require(name)] = 1;
  p.add_term(e, Rational(1));
  return p;
}

MultiPoly MultiPoly::monomial(VarList vars, Exponents exponents, const Rational& coefficient) {
  MultiPoly p(std::move(vars));
  if (exponents.size() != p.vars_.size()) {
    throw AlgebraError("exponent vector length does not match variable count");
  }
  p.add_term(exponents, coefficient);
  return p;
}

bool MultiPoly::is_constant() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && degree_of(terms_.begin()->first) == 0);
}

std::optional<Rational> MultiPoly::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (!is_constant()) return std::nullopt;
  return terms_.begin()->second;
}

Rational MultiPoly::coefficient(const Exponents& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? Rational(0) : it->second;
}

unsigned MultiPoly::total_degree() const noexcept {
  // Descending grlex: the first term has the largest total degree.
  return terms_.empty() ? 0 : degree_of(terms_.begin()->first);
}

unsigned MultiPoly::degree_in(std::size_t var) const noexcept {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

bool MultiPoly::involves(std::size_t var) const noexcept { return degree_in(var) > 0; }

const Exponents& MultiPoly::leading_exponents() const {
  if (terms_.empty()) throw AlgebraError("leading term of the zero polynomial");
  return terms_.begin()->first;
}

const Rational& MultiPoly::leading_coefficient() const {
  if (terms_.empty()) throw AlgebraError("leading term of the zero polynomial");
  return terms_.begin()->second;
}

MultiPoly MultiPoly::monic() const {
  if (terms_.empty()) return *this;
  return *this * leading_coefficient().reciprocal();
}

void MultiPoly::add_term(const Exponents& exponents, const Rational& coefficient) {
  if (coefficient.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(exponents, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void MultiPoly::require_same_vars(const MultiPoly& other) const {
  if (!(vars_ == other.vars_)) {
    throw AlgebraError("polynomials are over different variable lists");
  }
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly r(*this);
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& other) {
  require_same_vars(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& other) {
  require_same_vars(other);
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  a.require_same_vars(b);
  MultiPoly r(a.vars_);
  const std::size_t n = a.vars_.size();
  Exponents e(n);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < n; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& other) { return *this = *this * other; }

MultiPoly& MultiPoly::operator*=(const Rational& scalar) {
  if (scalar.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= scalar;
  return *this;
}

MultiPoly MultiPoly::pow(unsigned exponent) const {
  MultiPoly result = constant(vars_, Rational(1));
  MultiPoly base = *this;
  while (exponent > 0) {
    if (exponent & 1U) result = result * base;
    exponent >>= 1U;
    if (exponent > 0) base = base * base;
  }
  return result;
}

Rational MultiPoly::eval(std::span<const Rational> point) const {
  if (point.size() != vars_.size()) throw AlgebraError("evaluation point has wrong dimension");
  std::vector<std::vector<Rational>> powers(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const unsigned d = degree_in(i);
    powers[i].reserve(d + 1);
    powers[i].emplace_back(1);
    for (unsigned k = 1; k <= d; ++k) powers[i].push_back(powers[i].back() * point[i]);
  }
  Rational sum;
  for (const auto& [e, c] : terms_) {
    Rational term = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) term *= powers[i][e[i]];
    }
    sum += term;
  }
  return sum;
}

double MultiPoly::eval(std::span<const double> point) const {
  if (point.size() != vars_.size()) throw AlgebraError("evaluation point has wrong dimension");
  // Horner in the first variable, recursing on the remaining ones: terms are
  // grouped by their exponent tail so each group is a univariate polynomial.
  const std::size_t n = vars_.size();
  if (n == 0) return terms_.empty() ? 0.0 : terms_.begin()->second.to_double();
  std::map<Exponents, std::vector<std::pair<unsigned, double>>> groups;
  for (const auto& [e, c] : terms_) {
    Exponents tail(e.begin() + 1, e.end());
    groups[tail].emplace_back(e[0], c.to_double());
  }
  double sum = 0.0;
  for (auto& [tail, coeffs] : groups) {
    std::sort(coeffs.begin(), coeffs.end(), [](auto& a, auto& b) { return a.first > b.first; });
    double h = 0.0;
    unsigned current = coeffs.front().first;
    for (const auto& [k, c] : coeffs) {
      while (current > k) {
        h *= point[0];
        --current;
      }
      h += c;
    }
    while (current > 0) {
      h *= point[0];
      --current;
    }
    double monomial = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
      for (unsigned k = 0; k < tail[i - 1]; ++k) monomial *= point[i];
    }
    sum += h * monomial;
  }
  return sum;
}

MultiPoly MultiPoly::with_vars(const VarList& target) const {
  if (target == vars_) return *this;
  std::vector<std::optional<std::size_t>> map(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) map[i] = target.index_of(vars_[i]);
  MultiPoly r(target);
  for (const auto& [e, c] : terms_) {
    Exponents te(target.size(), 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!map[i]) {
        throw AlgebraError("variable '" + vars_[i] + "' is not in the target variable list");
      }
      te[*map[i]] = e[i];
    }
    r.add_term(te, c);
  }
  return r;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    const std::string mono = monomial_text(vars_, e);
    const Rational mag = c.abs();
    if (first) {
      if (c.sign() < 0) out += '-';
    } else {
      out += c.sign() < 0 ? " - " : " + ";
    }
    if (mono.empty()) {
      out += mag.to_string();
    } else if (mag.is_one()) {
      out += mono;
    } else {
      out += mag.to_string() + "*" + mono;
    }
    first = false;
  }
  return out;
}

PolyVectorField::PolyVectorField(std::vector<MultiPoly> comps) : components(std::move(comps)) {
  for (std::size_t i = 1; i < components.size(); ++i) {
    if (!(components[i].vars() == components[0].vars())) {
      throw AlgebraError("vector field components use different variable lists");
    }
  }
}

const VarList& PolyVectorField::vars() const {
  if (components.empty()) throw AlgebraError("empty vector field");
  return components.front().vars();
}

bool PolyVectorField::is_zero() const {
  return std::all_of(components.begin(), components.end(), [](const MultiPoly& p) { return p.is_zero(); });
}

MultiPoly differentiate(const MultiPoly& p, std::string_view var) {
  return differentiate(p, p.vars().require(var));
}

MultiPoly differentiate(const MultiPoly& p, std::size_t var) {
  if (var >= p.vars().size()) throw AlgebraError("differentiation variable out of range");
  MultiPoly r(p.vars());
  for (const auto& [e, c] : p.terms()) {
    if (e[var] == 0) continue;
    Exponents d = e;
    --d[var];
    r.add_term(d, c * Rational(static_cast<long>(e[var])));
  }
  return r;
}

MultiPoly substitute(const MultiPoly& p, const std::map<std::string, MultiPoly>& bindings,
                     const VarList& target) {
  for (const auto& [name, value] : bindings) {
    if (!(value.vars() == target)) {
      throw AlgebraError("binding for '" + name + "' is not over the target variable list");
    }
  }
  const VarList& src = p.vars();
  std::vector<MultiPoly> images;
  images.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto it = bindings.find(src[i]);
    if (it != bindings.end()) {
      images.push_back(it->second);
    } else if (!p.involves(i) || target.index_of(src[i])) {
      images.push_back(p.involves(i) ? MultiPoly::variable(target, src[i]) : MultiPoly(target));
    } else {
      throw AlgebraError("variable '" + src[i] + "' has no binding and no counterpart in the target");
    }
  }
  // Power caches per variable, filled on demand.
  std::vector<std::vector<MultiPoly>> powers(src.size());
  auto power = [&](std::size_t i, unsigned k) -> const MultiPoly& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(MultiPoly::constant(target, Rational(1)));
    while (cache.size() <= k) cache.push_back(cache.back() * images[i]);
    return cache[k];
  };
  MultiPoly result(target);
  for (const auto& [e, c] : p.terms()) {
    MultiPoly term = MultiPoly::constant(target, c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] != 0) term = term * power(i, e[i]);
    }
    result += term;
  }
  return result;
}

unsigned r_valuation(const MultiPoly& p, std::string_view var) {
  const std::size_t i = p.vars().require(var);
  if (p.is_zero()) return kInfiniteValuation;
  unsigned v = kInfiniteValuation;
  for (const auto& [e, c] : p.terms()) v = std::min(v, e[i]);
  return v;
}

MultiPoly divide_by_power(const MultiPoly& p, std::string_view var, unsigned k) {
  const std::size_t i = p.vars().require(var);
  MultiPoly r(p.vars());
  for (const auto& [e, c] : p.terms()) {
    if (e[i] < k) {
      throw AlgebraError("polynomial is not divisible by " + std::string(var) + "^" + std::to_string(k));
    }
    Exponents d = e;
    d[i] -= k;
    r.add_term(d, c);
  }
  return r;
}

std::optional<MultiPoly> exact_divide(const MultiPoly& p, const MultiPoly& d) {
  if (!(p.vars() == d.vars())) throw AlgebraError("polynomials are over different variable lists");
  if (d.is_zero()) throw AlgebraError("division by the zero polynomial");
  const std::size_t n = p.vars().size();
  const Exponents& lead = d.leading_exponents();
  const Rational lead_inv = d.leading_coefficient().reciprocal();
  MultiPoly remainder = p;
  MultiPoly quotient(p.vars());
  // In any monomial order LT(q*d) = LT(q)*LT(d), so exact division never
  // meets a leading term that LT(d) fails to divide.
  while (!remainder.is_zero()) {
    const Exponents& le = remainder.leading_exponents();
    Exponents q(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (le[i] < lead[i]) return std::nullopt;
      q[i] = le[i] - lead[i];
    }
    const MultiPoly step = MultiPoly::monomial(p.vars(), q, remainder.leading_coefficient() * lead_inv);
    quotient += step;
    remainder -= step * d;
  }
  return quotient;
}

Rational eval_poly(const MultiPoly& p, const std::map<std::string, Rational>& point) {
  std::vector<Rational> values(p.vars().size());
  for (std::size_t i = 0; i < p.vars().size(); ++i) {
    auto it = point.find(p.vars()[i]);
    if (it != point.end()) {
      values[i] = it->second;
    } else if (p.involves(i)) {
      throw AlgebraError("unbound variable '" + p.vars()[i] + "'");
    }
  }
  return p.eval(std::span<const Rational>(values));
}

double eval_poly(const MultiPoly& p, const std::map<std::string, double>& point) {
  std::vector<double> values(p.vars().size(), 0.0);
  for (std::size_t i = 0; i < p.vars().size(); ++i) {
    auto it = point.find(p.vars()[i]);
    if (it != point.end()) {
      values[i] = it->second;
    } else if (p.involves(i)) {
      throw AlgebraError("unbound variable '" + p.vars()[i] + "'");
    }
  }
  return p.eval(std::span<const double>(values));
}

}  // namespace canardkit
