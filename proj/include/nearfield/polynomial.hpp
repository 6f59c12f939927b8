#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace nearfield {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& q);
std::string to_string(const Rational& q);

/// Polynomial with exact rational coefficients, coefficient i multiplying u^i.
///
/// Used for the Laurent polynomials in u = 1/(2z) that appear once the
/// exponential factors of products of irregular radial solutions cancel.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> coeffs);

  static RationalPolynomial constant(const Rational& c);

  /// Highest power with a nonzero coefficient; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  /// Coefficient of u^i; zero beyond the stored range.
  Rational coefficient(std::size_t i) const;
  const std::vector<Rational>& coefficients() const { return coeffs_; }

  RationalPolynomial derivative() const;
  /// p(-u).
  RationalPolynomial reflected() const;
  /// u^k p(u).
  RationalPolynomial shifted(std::size_t k) const;

  RationalPolynomial operator+(const RationalPolynomial& o) const;
  RationalPolynomial operator-(const RationalPolynomial& o) const;
  RationalPolynomial operator*(const RationalPolynomial& o) const;
  RationalPolynomial operator*(const Rational& s) const;
  bool operator==(const RationalPolynomial& o) const { return coeffs_ == o.coeffs_; }

  std::complex<double> operator()(std::complex<double> u) const;
  std::vector<double> to_doubles() const;

 private:
  void trim();

  std::vector<Rational> coeffs_;
};

/// Horner evaluation of a double-coefficient polynomial at complex u.
std::complex<double> horner(const std::vector<double>& coeffs, std::complex<double> u);

}  // namespace nearfield
