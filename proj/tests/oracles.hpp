#pragma once

// Reference implementations used only by the tests. They deliberately share
// no code with the library.

#include <cmath>
#include <complex>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace oracle {

// x j_l(x) by Miller's downward recurrence, normalized with j_0 or j_1.
inline double riccati_j(int l, double x) {
  const int start = l + static_cast<int>(x) + 60;
  std::vector<double> j(start + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1e-300;
  for (int n = start; n >= 1; --n) j[n - 1] = (2 * n + 1) / x * j[n] - j[n + 1];
  const double j0 = std::sin(x) / x;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  const double scale = std::abs(j0) > std::abs(j1) ? j0 / j[0] : j1 / j[1];
  return x * j[l] * scale;
}

using Real50 = boost::multiprecision::cpp_bin_float_50;
using Complex50 = boost::multiprecision::cpp_complex_50;

// sqrt(2z/pi) K_{l+1/2}(z) from the ascending series of I_{+-(l+1/2)}. The
// half-integer powers combine with sqrt(z) into integer powers, so the series
// is valid at any z != 0 without a branch choice.
inline std::complex<double> macdonald_chi(int l, std::complex<double> z_in) {
  const Complex50 z(Real50(z_in.real()), Real50(z_in.imag()));
  const Real50 nu = Real50(l) + Real50(0.5);
  Complex50 negative(0), positive(0);
  for (int k = 0; k < 120; ++k) {
    const Real50 kf = boost::math::tgamma(Real50(k + 1));
    negative += pow(Real50(2), nu - 2 * k) / (kf * boost::math::tgamma(Real50(k) - nu + 1)) * pow(z, 2 * k - l);
    positive += pow(Real50(2), -nu - 2 * k) / (kf * boost::math::tgamma(Real50(k) + nu + 1)) * pow(z, 2 * k + l + 1);
  }
  const Real50 pi = boost::math::constants::pi<Real50>();
  const Complex50 value = sqrt(pi / 2) * (negative - positive) * Real50(l % 2 == 0 ? 1 : -1);
  return {static_cast<double>(value.real()), static_cast<double>(value.imag())};
}

// e^z chi_l(z) as the finite sum over S of (l+S)!/(S!(l-S)!) (2z)^-S, carried
// in 50 digits so the large intermediate terms at high l cancel harmlessly.
inline std::complex<double> chi_scaled_sum(int l, std::complex<double> z_in) {
  const Complex50 inverse = Complex50(1) / (Complex50(Real50(z_in.real()), Real50(z_in.imag())) * 2);
  Complex50 sum(1), power(1);
  Real50 c(1);
  for (int S = 1; S <= l; ++S) {
    c *= Real50(l + S) * Real50(l - S + 1) / Real50(S);
    power *= inverse;
    sum += c * power;
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

}  // namespace oracle
