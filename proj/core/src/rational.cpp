#include "canardkit/rational.hpp"

#include <cmath>
#include <string>

#include "canardkit/error.hpp"

namespace canardkit {

Rational::Rational(long numerator, long denominator) {
  if (denominator == 0) {
    throw AlgebraError("rational with zero denominator");
  }
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

Rational::Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
  std::string s(text);
  const auto valid = [](const std::string& part) {
    std::size_t i = (!part.empty() && part[0] == '-') ? 1 : 0;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i) {
      if (part[i] < '0' || part[i] > '9') return false;
    }
    return true;
  };
  const auto slash = s.find('/');
  const std::string num = s.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid(num) || !valid(den) || den[0] == '-') {
    throw AlgebraError("malformed rational literal '" + s + "'");
  }
  mpz_class n(num, 10);
  mpz_class d(den, 10);
  if (d == 0) {
    throw AlgebraError("rational with zero denominator");
  }
  return Rational(mpq_class(n, d));
}

Rational Rational::from_double(double value) {
  if (!std::isfinite(value)) {
    throw AlgebraError("cannot convert non-finite double to a rational");
  }
  return Rational(mpq_class(value));
}

std::string Rational::to_string() const {
  if (is_integer()) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

double Rational::to_double() const {
  const mpz_srcptr num = value_.get_num_mpz_t(), den = value_.get_den_mpz_t();
  if (mpz_sizeinbase(num, 2) <= 53 && mpz_sizeinbase(den, 2) <= 53) return mpz_get_d(num) / mpz_get_d(den);
  return value_.get_d();
}

std::size_t Rational::bit_size() const {
  return mpz_sizeinbase(value_.get_num_mpz_t(), 2) + mpz_sizeinbase(value_.get_den_mpz_t(), 2);
}

Rational Rational::abs() const { return Rational(mpq_class(::abs(value_))); }

Rational Rational::pow(unsigned exponent) const {
  mpz_class num;
  mpz_class den;
  mpz_pow_ui(num.get_mpz_t(), value_.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), value_.get_den_mpz_t(), exponent);
  return Rational(mpq_class(num, den));
}

Rational Rational::reciprocal() const {
  if (is_zero()) {
    throw AlgebraError("division by zero");
  }
  return Rational(mpq_class(1) / value_);
}

Rational Rational::operator-() const {
  Rational r;
  r.value_ = -value_;
  return r;
}

Rational& Rational::operator+=(const Rational& other) {
  value_ += other.value_;
  return *this;
}

Rational& Rational::operator-=(const Rational& other) {
  value_ -= other.value_;
  return *this;
}

Rational& Rational::operator*=(const Rational& other) {
  value_ *= other.value_;
  return *this;
}

Rational& Rational::operator/=(const Rational& other) {
  if (other.is_zero()) {
    throw AlgebraError("division by zero");
  }
  value_ /= other.value_;
  return *this;
}

}  // namespace canardkit
