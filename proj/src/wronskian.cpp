#include "nearfield/wronskian.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace nearfield {

long delta_jl(int j, int l) {
  return static_cast<long>(j) * (j + 1) - static_cast<long>(l) * (l + 1);
}

long upsilon_jl(int j, int l) {
  return static_cast<long>(j) * (j + 1) + static_cast<long>(l) * (l + 1);
}

RationalPolynomial half_wronskian_polynomial(int j, int l) {
  const ChiPolynomial chi_j(j), chi_l(l);
  const RationalPolynomial& pj = chi_j.series();
  const RationalPolynomial& pl = chi_l.series();
  const RationalPolynomial pl_reflected = pl.reflected();
  // d/dz of P(1/(2z)) is -2u^2 P'(u), and d/dz of P(-1/(2z)) is 2u^2 P'(-u).
  const RationalPolynomial cross = pj * pl.derivative().reflected() + pj.derivative() * pl_reflected;
  return pj * pl_reflected + cross.shifted(2);
}

const WronskianCoefficients& half_wronskian_coefficients(int j, int l) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<WronskianCoefficients>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{j, l}];
  if (!slot) {
    slot = std::make_unique<WronskianCoefficients>();
    const auto poly = half_wronskian_polynomial(j, l);
    for (const auto& c : poly.coefficients()) {
      slot->real.push_back(to_double(c));
      slot->extended.push_back(Extended(numerator(c).str()) / Extended(denominator(c).str()));
    }
  }
  return *slot;
}

Complex half_wronskian_exact(int j, int l, Complex z) {
  if (z == Complex(0.0, 0.0)) throw std::domain_error("half-Wronskian has a pole at z = 0");
  return horner(half_wronskian_coefficients(j, l).real, 1.0 / (2.0 * z));
}

Rational WronskianSeries::coefficient(std::size_t n) const {
  return n < correction.size() ? correction[n] : Rational(0);
}

RationalPolynomial WronskianSeries::polynomial() const {
  std::vector<Rational> c(correction.size() + 1);
  c[0] = constant_term;
  for (std::size_t n = 0; n < correction.size(); ++n)
    c[n + 1] = Rational(delta) * correction[n] / static_cast<long>(n + 1);
  return RationalPolynomial(std::move(c));
}

Complex WronskianSeries::operator()(Complex z) const {
  if (z == Complex(0.0, 0.0)) throw std::domain_error("half-Wronskian has a pole at z = 0");
  return polynomial()(1.0 / (2.0 * z));
}

WronskianSeries wronskian_series(int j, int l) {
  const auto w = half_wronskian_polynomial(j, l);
  WronskianSeries series;
  series.j = j;
  series.l = l;
  series.delta = delta_jl(j, l);
  series.constant_term = w.coefficient(0);
  if (series.delta == 0) {
    if (!(w == RationalPolynomial::constant(1)))
      throw std::logic_error("diagonal half-Wronskian is not identically 1");
    return series;
  }
  for (int n = 0; n <= l + j; ++n)
    series.correction.push_back(w.coefficient(n + 1) * (n + 1) / Rational(series.delta));
  return series;
}

std::optional<Rational> closed_form_series_coefficient(int n, int j, int l) {
  const Rational d = delta_jl(j, l);
  const Rational u = upsilon_jl(j, l);
  switch (n) {
    case 0: return Rational(1);
    case 1: return d;
    case 2: return d * d / 2 - u;
    case 3: return Rational(4, 3) * d * (d * d / 8 - u + Rational(3, 2));
    default: return std::nullopt;
  }
}

Complex integral_representation_check(int j, int l, double z) {
  if (!(z > 0.0)) throw std::domain_error("integral representation needs real z > 0");
  const long delta = delta_jl(j, l);
  if (delta == 0) return 1.0;

  // With t = 1/zeta the integral becomes int_0^{1/z} chi_l(-1/t) chi_j(1/t) dt. The
  // exponentials of the two factors cancel, so they are evaluated scaled, and
  // the integrand stays finite as t -> 0 (zeta -> infinity).
  auto integrand = [&](double t) {
    const double zeta = 1.0 / t;
    return chi_scaled(l, Complex(-zeta, 0.0)) * chi_scaled(j, Complex(zeta, 0.0));
  };
  auto composite = [&](int panels) {
    const auto rule = gauss_legendre(24);
    const double h = 1.0 / (z * panels);
    Complex sum = 0.0;
    for (int p = 0; p < panels; ++p)
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += 0.5 * h * rule.weights[i] * integrand(h * (p + 0.5 * (rule.nodes[i] + 1.0)));
    return sum;
  };
  const Complex coarse = composite(4);
  const Complex fine = composite(8);
  if (!std::isfinite(std::abs(fine)) || !(std::abs(fine - coarse) <= 1e-9 * std::max(1.0, std::abs(fine))))
    throw std::runtime_error("integral representation did not converge");
  return 1.0 + 0.5 * static_cast<double>(delta) * fine;
}

}  // namespace nearfield
