#pragma once

#include <optional>
#include <vector>

#include "nearfield/extended.hpp"
#include "nearfield/polynomial.hpp"
#include "nearfield/special_functions.hpp"

namespace nearfield {

/// Delta_jl = j(j+1) - l(l+1).
long delta_jl(int j, int l);
/// Upsilon_jl = j(j+1) + l(l+1).
long upsilon_jl(int j, int l);

/// (1/2)[chi_j(z) d<->_z chi_l(-z)] with the exponentials cancelled, as an
/// exact polynomial in u = 1/(2z):
///   P_j(u) P_l(-u) + u^2 [P_j(u) P_l'(-u) + P_j'(u) P_l(-u)],
/// where chi_l(z) = e^{-z} P_l(1/(2z)).
RationalPolynomial half_wronskian_polynomial(int j, int l);

/// Floating-point evaluation of the exact polynomial. Throws std::domain_error at z = 0.
Complex half_wronskian_exact(int j, int l, Complex z);

/// Coefficients of half_wronskian_polynomial in double and extended precision,
/// computed once per (j, l) and shared between threads.
struct WronskianCoefficients {
  std::vector<double> real;
  std::vector<Extended> extended;
};
const WronskianCoefficients& half_wronskian_coefficients(int j, int l);

/// 1 + Delta_jl sum_{n=0}^{l+j} A_n(l,j) / [(n+1) (2z)^{n+1}].
struct WronskianSeries {
  int j = 0;
  int l = 0;
  Rational constant_term = 1;
  long delta = 0;
  std::vector<Rational> correction;  ///< A_n(l,j), n = 0..l+j; empty when Delta_jl = 0

  /// A_n, zero past the stored range.
  Rational coefficient(std::size_t n) const;
  RationalPolynomial polynomial() const;
  Complex operator()(Complex z) const;
};

/// Exact A_n(l,j) from matching powers of (2z)^{-(n+1)} in the half-Wronskian.
WronskianSeries wronskian_series(int j, int l);

/// Closed forms of A_0..A_3 in terms of Delta_jl and Upsilon_jl as printed
/// for the leading inverse powers; nullopt for n > 3.
std::optional<Rational> closed_form_series_coefficient(int n, int j, int l);

/// 1 + (Delta_jl/2) int_z^inf dzeta/zeta^2 chi_l(-zeta) chi_j(zeta), integrated
/// numerically on the real axis (composite Gauss-Legendre in t = 1/zeta).
/// Throws std::domain_error for z <= 0 and std::runtime_error when two panel
/// counts disagree.
Complex integral_representation_check(int j, int l, double z);

}  // namespace nearfield
