#include "nearfield/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "nearfield/amplitudes.hpp"

namespace nearfield {

namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

double sign_of(WaveSign s) { return s == WaveSign::outgoing ? 1.0 : -1.0; }

Complex i_pow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void require_inside(const GreensQuery& q) {
  if (!(q.source.norm() < q.observation.norm()))
    throw std::domain_error("multipole expansion needs |x| < |R|");
  if (!(q.k > 0.0)) throw std::domain_error("wavenumber must be > 0");
}

// (4 pi / kr) i^{-+l} psi_l(kr) sum_m Y_l^m(n) conj(Y_l^m(s)) per l: the plane
// wave e^{-+ik n.x} resolved into multipoles. r = 0 keeps only l = 0.
std::vector<Complex> plane_wave_modes(const GreensQuery& q, int l_max) {
  std::vector<Complex> modes(static_cast<std::size_t>(l_max) + 1);
  const double r = q.source.norm();
  if (r == 0.0) {
    modes[0] = 1.0;
    return modes;
  }
  const double kr = q.k * r;
  const double s = sign_of(q.sign);
  const auto yn = sph_harm_table(l_max, q.observation);
  const auto ys = sph_harm_table(l_max, q.source);
  for (int l = 0; l <= l_max; ++l) {
    Complex angular = 0.0;
    for (int m = -l; m <= l; ++m) angular += yn[lm_index(l, m)] * std::conj(ys[lm_index(l, m)]);
    modes[l] = four_pi / kr * i_pow(-static_cast<int>(s) * l) * regular_psi(l, kr) * angular;
  }
  return modes;
}

}  // namespace

Complex greens_point(const GreensQuery& q) {
  const double d = (q.observation - q.source).norm();
  if (!(d > 0.0)) throw std::domain_error("Green function is singular at coincident points");
  return std::polar(1.0, sign_of(q.sign) * q.k * d) / (four_pi * d);
}

int auto_l_max(const GreensQuery& q) {
  // psi_l(kr) only decays once l passes e kr, but the tail also carries
  // (r/R)^l, which dominates at small kr when r/R is near one.
  const int bessel = static_cast<int>(std::ceil(std::numbers::e * q.k * q.source.norm())) + 15;
  const double ratio = q.source.norm() / q.observation.norm();
  if (!(ratio > 0.0) || ratio >= 1.0) return bessel;
  const double geometric = std::min(std::ceil(std::log(1e16) / -std::log(ratio)), 2000.0);
  return std::max(bessel, static_cast<int>(geometric));
}

Complex greens_multipole_term(const GreensQuery& q, int l) {
  require_inside(q);
  const auto modes = plane_wave_modes(q, l);
  const double R = q.observation.norm();
  const Complex z(0.0, -sign_of(q.sign) * q.k * R);
  return chi(l, z) / (four_pi * R) * modes[l];
}

Complex greens_multipole(const GreensQuery& q, int l_max) {
  require_inside(q);
  if (l_max < 0) l_max = auto_l_max(q);
  const auto modes = plane_wave_modes(q, l_max);
  const double R = q.observation.norm();
  const Complex z(0.0, -sign_of(q.sign) * q.k * R);
  Complex sum = 0.0;
  for (int l = 0; l <= l_max; ++l) sum += chi(l, z) * modes[l];
  return sum / (four_pi * R);
}

Complex greens_asymptotic(const GreensQuery& q, int S_max, int l_max) {
  require_inside(q);
  if (S_max < 0) throw std::invalid_argument("S_max must be >= 0");
  if (l_max < 0) l_max = auto_l_max(q);
  const auto modes = plane_wave_modes(q, l_max);
  const double R = q.observation.norm();
  const double s = sign_of(q.sign);
  const Complex two_z(0.0, -2.0 * s * q.k * R);
  Complex sum = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    // Operator product acting on Y_l^m: L -> l(l+1).
    Complex series = 1.0;
    Complex power = 1.0;
    for (int S = 1; S <= S_max; ++S) {
      power *= two_z;
      const Rational c = h_multiplier(l, S);
      if (c == 0) break;
      series += to_double(c) / power;
    }
    sum += series * modes[l];
  }
  return std::polar(1.0, s * q.k * R) / (four_pi * R) * sum;
}

}  // namespace nearfield
