#include "nearfield/polynomial.hpp"

#include <algorithm>
#include <utility>

namespace nearfield {

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

RationalPolynomial::RationalPolynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  trim();
}

RationalPolynomial RationalPolynomial::constant(const Rational& c) {
  return RationalPolynomial(std::vector<Rational>{c});
}

void RationalPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational RationalPolynomial::coefficient(std::size_t i) const {
  return i < coeffs_.size() ? coeffs_[i] : Rational(0);
}

RationalPolynomial RationalPolynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<long>(i);
  return RationalPolynomial(std::move(d));
}

RationalPolynomial RationalPolynomial::reflected() const {
  std::vector<Rational> r = coeffs_;
  for (std::size_t i = 1; i < r.size(); i += 2) r[i] = -r[i];
  return RationalPolynomial(std::move(r));
}

RationalPolynomial RationalPolynomial::shifted(std::size_t k) const {
  if (is_zero()) return {};
  std::vector<Rational> r(k, Rational(0));
  r.insert(r.end(), coeffs_.begin(), coeffs_.end());
  return RationalPolynomial(std::move(r));
}

RationalPolynomial RationalPolynomial::operator+(const RationalPolynomial& o) const {
  std::vector<Rational> r(std::max(coeffs_.size(), o.coeffs_.size()), Rational(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) r[i] += coeffs_[i];
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) r[i] += o.coeffs_[i];
  return RationalPolynomial(std::move(r));
}

RationalPolynomial RationalPolynomial::operator-(const RationalPolynomial& o) const {
  return *this + o * Rational(-1);
}

RationalPolynomial RationalPolynomial::operator*(const RationalPolynomial& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<Rational> r(coeffs_.size() + o.coeffs_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
  return RationalPolynomial(std::move(r));
}

RationalPolynomial RationalPolynomial::operator*(const Rational& s) const {
  std::vector<Rational> r = coeffs_;
  for (auto& c : r) c *= s;
  return RationalPolynomial(std::move(r));
}

std::complex<double> RationalPolynomial::operator()(std::complex<double> u) const {
  return horner(to_doubles(), u);
}

std::vector<double> RationalPolynomial::to_doubles() const {
  std::vector<double> r;
  r.reserve(coeffs_.size());
  for (const auto& c : coeffs_) r.push_back(to_double(c));
  return r;
}

std::complex<double> horner(const std::vector<double>& coeffs, std::complex<double> u) {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + *it;
  return acc;
}

}  // namespace nearfield
