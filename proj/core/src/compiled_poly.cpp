#include "canardkit/compiled_poly.hpp"

#include <algorithm>

#include "canardkit/error.hpp"

namespace canardkit {

CompiledPoly::CompiledPoly(const MultiPoly& p) : num_vars_(p.vars().size()) {
  coeffs_.reserve(p.term_count());
  exponents_.reserve(p.term_count() * num_vars_);
  for (const auto& [e, c] : p.terms()) {
    coeffs_.push_back(c.to_double());
    for (auto k : e) {
      exponents_.push_back(k);
      max_degree_ = std::max(max_degree_, k);
    }
  }
}

double CompiledPoly::operator()(std::span<const double> point) const {
  if (coeffs_.empty()) return 0.0;
  const std::size_t stride = max_degree_ + 1;
  thread_local std::vector<double> powers;
  powers.resize(num_vars_ * stride);
  for (std::size_t i = 0; i < num_vars_; ++i) {
    double* row = powers.data() + i * stride;
    row[0] = 1.0;
    for (unsigned k = 1; k <= max_degree_; ++k) row[k] = row[k - 1] * point[i];
  }
  double sum = 0.0;
  const unsigned* e = exponents_.data();
  for (double c : coeffs_) {
    double term = c;
    for (std::size_t i = 0; i < num_vars_; ++i, ++e) {
      if (*e != 0) term *= powers[i * stride + *e];
    }
    sum += term;
  }
  return sum;
}

CompiledPlanarField::CompiledPlanarField(const PolyVectorField& field, std::array<std::string, 2> state_vars) {
  if (field.size() != 2) throw AlgebraError("planar field must have two components");
  const VarList& vars = field.vars();
  ix_ = vars.require(state_vars[0]);
  iy_ = vars.require(state_vars[1]);
  nvars_ = vars.size();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i != ix_ && i != iy_ && (field[0].involves(i) || field[1].involves(i))) {
      throw AlgebraError("planar field depends on unbound variable '" + vars[i] + "'");
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    f_[c] = CompiledPoly(field[c]);
    df_[2 * c] = CompiledPoly(differentiate(field[c], ix_));
    df_[2 * c + 1] = CompiledPoly(differentiate(field[c], iy_));
  }
}

namespace {
thread_local std::vector<double> scratch;
}

std::array<double, 2> CompiledPlanarField::value(double x, double y) const {
  scratch.assign(nvars_, 0.0);
  scratch[ix_] = x;
  scratch[iy_] = y;
  return {f_[0](scratch), f_[1](scratch)};
}

std::array<double, 4> CompiledPlanarField::jacobian(double x, double y) const {
  scratch.assign(nvars_, 0.0);
  scratch[ix_] = x;
  scratch[iy_] = y;
  return {df_[0](scratch), df_[1](scratch), df_[2](scratch), df_[3](scratch)};
}

}  // namespace canardkit
