#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "nearfield/polynomial.hpp"
#include "nearfield/vec3.hpp"

namespace nearfield {

using Complex = std::complex<double>;

/// Irregular free radial solution chi_l(z) = e^{-z} sum_S c_S (2z)^{-S}, held
/// as the exact coefficients c_S = (l+S)! / (S! (l-S)!) of the finite sum.
///
/// The exponential is kept out of the coefficient polynomial so that products
/// such as chi_j(z) chi_l(-z) can be formed with the exponentials cancelled
/// analytically.
class ChiPolynomial {
 public:
  explicit ChiPolynomial(int l);

  int l() const { return l_; }
  /// sum_S c_S u^S as a polynomial in u = 1/(2z).
  const RationalPolynomial& series() const { return series_; }
  const std::vector<Rational>& coefficients() const { return series_.coefficients(); }

  Complex operator()(Complex z) const;

 private:
  int l_;
  RationalPolynomial series_;
};

/// chi_l(z) in double precision. Throws std::domain_error at z = 0.
Complex chi(int l, Complex z);

/// e^{z} chi_l(z), free of overflow for large |Re z|.
Complex chi_scaled(int l, Complex z);

/// Regular Riccati solution psi_l(x) = x j_l(x), defined through
/// (2i)^{-1} [i^{-l} chi_l(-ix) - i^l chi_l(ix)]. Throws std::domain_error for x <= 0.
double regular_psi(int l, double x);

/// x y_l(x), the irregular real Riccati solution (equal to -Re[i^{-l} chi_l(-ix)]).
double irregular_psi(int l, double x);

/// Legendre polynomial P_l(x).
double legendre(int l, double x);

/// Index of (l, m) in a dense table ordered l = 0.., m = -l..l.
constexpr std::size_t lm_index(int l, int m) {
  return static_cast<std::size_t>(l * l + l + m);
}

/// Orthonormal spherical harmonic with Condon-Shortley phase. The direction
/// need not be normalized. Throws std::out_of_range if |m| > l.
Complex sph_harm(int l, int m, const Vec3& n);

/// All Y_l^m(n) for l <= l_max, indexed by lm_index.
std::vector<Complex> sph_harm_table(int l_max, const Vec3& n);

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Quadrature nodes and weights on the unit sphere.
struct AngularGrid {
  int order = 0;  ///< total spherical-harmonic degree integrated exactly
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Product Gauss-Legendre(cos theta) x uniform(phi) grid that integrates every
/// spherical-harmonic product Y_l^m conj(Y_j^mu) with l + j <= order exactly.
AngularGrid gauss_legendre_sphere(int order);

}  // namespace nearfield
