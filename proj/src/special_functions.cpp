#include "nearfield/special_functions.hpp"

#include "nearfield/detail/spherical_impl.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nearfield {

namespace {

void require_order(int l) {
  if (l < 0) throw std::invalid_argument("orbital index must be non-negative, got " + std::to_string(l));
}

// c_S in double precision by the ratio c_S / c_{S-1} = (l+S)(l-S+1)/S.
std::vector<double> chi_coefficients(int l) {
  std::vector<double> c(static_cast<std::size_t>(l) + 1);
  c[0] = 1.0;
  for (int s = 1; s <= l; ++s) c[s] = c[s - 1] * (l + s) * (l - s + 1) / s;
  return c;
}

Complex i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Riccati functions s_l = x j_l and c_l = -x y_l by upward recurrence,
// returning {s_l, c_l, c_l'}.
struct RiccatiUpward {
  double s, c, c_prime;
};

RiccatiUpward riccati_upward(int l, double x) {
  double s_prev = std::sin(x), c_prev = std::cos(x);
  if (l == 0) return {s_prev, c_prev, -s_prev};
  double s = s_prev / x - c_prev;
  double c = c_prev / x + s_prev;
  for (int n = 1; n < l; ++n) {
    const double f = (2 * n + 1) / x;
    const double s_next = f * s - s_prev;
    const double c_next = f * c - c_prev;
    s_prev = s;
    c_prev = c;
    s = s_next;
    c = c_next;
  }
  return {s, c, c_prev - l * c / x};
}

// j_{l+1}/j_l from the continued fraction 1/(b_1 - 1/(b_2 - ...)),
// b_k = (2l+2k+1)/x, by the modified Lentz method.
double bessel_ratio(int l, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-17;
  double f = (2 * l + 3) / x;
  double C = f, D = 0.0;
  for (int k = 2; k < 100000; ++k) {
    const double b = (2 * l + 2 * k + 1) / x;
    D = b - D;
    if (std::abs(D) < tiny) D = tiny;
    C = b - 1.0 / C;
    if (std::abs(C) < tiny) C = tiny;
    D = 1.0 / D;
    const double delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < eps) return 1.0 / f;
  }
  throw std::runtime_error("spherical Bessel continued fraction did not converge");
}

}  // namespace

ChiPolynomial::ChiPolynomial(int l) : l_(l) {
  require_order(l);
  std::vector<Rational> c(static_cast<std::size_t>(l) + 1);
  c[0] = 1;
  for (int s = 1; s <= l; ++s) c[s] = c[s - 1] * Rational((l + s) * (l - s + 1), s);
  series_ = RationalPolynomial(std::move(c));
}

Complex ChiPolynomial::operator()(Complex z) const {
  if (z == Complex(0.0, 0.0)) throw std::domain_error("chi_l(z) has a pole at z = 0");
  return std::exp(-z) * series_(1.0 / (2.0 * z));
}

Complex chi(int l, Complex z) {
  require_order(l);
  if (z == Complex(0.0, 0.0)) throw std::domain_error("chi_l(z) has a pole at z = 0");
  return std::exp(-z) * chi_scaled(l, z);
}

Complex chi_scaled(int l, Complex z) {
  require_order(l);
  if (z == Complex(0.0, 0.0)) throw std::domain_error("chi_l(z) has a pole at z = 0");
  // The terms of the finite sum shrink monotonically while l(l+1) <= 2|z|.
  // Past that they first grow (and overflow for l ~ 150), so use the upward
  // recurrence chi_{l+1} = chi_{l-1} + (2l+1)/z chi_l, in which chi is dominant.
  if (l < 2 || static_cast<double>(l) * (l + 1) <= 2.0 * std::abs(z)) return horner(chi_coefficients(l), 1.0 / (2.0 * z));
  Complex previous = 1.0;
  Complex current = 1.0 + 1.0 / z;
  for (int n = 1; n < l; ++n) {
    const Complex next = previous + static_cast<double>(2 * n + 1) / z * current;
    previous = current;
    current = next;
  }
  return current;
}

double regular_psi(int l, double x) {
  require_order(l);
  if (!(x > 0.0)) throw std::domain_error("regular_psi requires x > 0");
  if (l == 0) return std::sin(x);
  // The finite sum has monotonically shrinking terms once l(l+1) <= 2x, so
  // the closed form is well conditioned there.
  if (static_cast<double>(l) * (l + 1) <= 2.0 * x)
    return (i_pow(-l) * chi(l, Complex(0.0, -x))).imag();
  if (x > l) return riccati_upward(l, x).s;
  // Below the turning point: CF1 for the logarithmic derivative, normalized
  // by the Wronskian s_l c_l' - s_l' c_l = -1 with c_l from upward recurrence.
  const auto up = riccati_upward(l, x);
  const double log_deriv = (l + 1) / x - bessel_ratio(l, x);
  return 1.0 / (log_deriv * up.c - up.c_prime);
}

double irregular_psi(int l, double x) {
  require_order(l);
  if (!(x > 0.0)) throw std::domain_error("irregular_psi requires x > 0");
  return -riccati_upward(l, x).c;
}

double legendre(int l, double x) {
  require_order(l);
  if (l == 0) return 1.0;
  double p_prev = 1.0, p = x;
  for (int n = 1; n < l; ++n) {
    const double next = ((2 * n + 1) * x * p - n * p_prev) / (n + 1);
    p_prev = p;
    p = next;
  }
  return p;
}

std::vector<Complex> sph_harm_table(int l_max, const Vec3& n) {
  require_order(l_max);
  const Vec3 u = n.normalized();
  return detail::sph_harm_table<double>(l_max, std::clamp(u.z, -1.0, 1.0), std::hypot(u.x, u.y),
                                        std::atan2(u.y, u.x));
}

Complex sph_harm(int l, int m, const Vec3& n) {
  require_order(l);
  if (std::abs(m) > l)
    throw std::out_of_range("sph_harm: |m| = " + std::to_string(std::abs(m)) + " exceeds l = " + std::to_string(l));
  return sph_harm_table(l, n)[lm_index(l, m)];
}

QuadratureRule gauss_legendre(int n) {
  QuadratureRule rule;
  detail::gauss_legendre<double>(n, rule.nodes, rule.weights);
  return rule;
}

AngularGrid gauss_legendre_sphere(int order) {
  if (order < 1) throw std::invalid_argument("sphere grid order must be >= 1");
  const int n_theta = order / 2 + 1;
  const int n_phi = order + 1;
  const auto rule = gauss_legendre(n_theta);
  AngularGrid grid;
  grid.order = order;
  grid.nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  grid.weights.reserve(grid.nodes.capacity());
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = std::acos(rule.nodes[i]);
    for (int j = 0; j < n_phi; ++j) {
      grid.nodes.push_back(direction(theta, j * dphi));
      grid.weights.push_back(rule.weights[i] * dphi);
    }
  }
  return grid;
}

}  // namespace nearfield
