#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "nearfield/special_functions.hpp"
#include "nearfield/wronskian.hpp"
#include "oracles.hpp"

using namespace nearfield;

namespace {

constexpr double pi = std::numbers::pi;

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

Integer factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

TEST_CASE("chi coefficients are (l+S)!/(S!(l-S)!)") {
  for (int l = 0; l <= 10; ++l) {
    const ChiPolynomial p(l);
    REQUIRE(p.coefficients().size() == static_cast<std::size_t>(l + 1));
    CHECK(p.coefficients()[0] == 1);
    for (int S = 0; S <= l; ++S)
      CHECK(p.coefficients()[S] == Rational(factorial(l + S), factorial(S) * factorial(l - S)));
  }
}

TEST_CASE("chi values") {
  const Complex z(0.7, -1.9);
  CHECK(rel(chi(0, z), std::exp(-z)) < 1e-15);
  CHECK(chi(1, 1.0).real() == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-15));
  CHECK(rel(chi(3, z), ChiPolynomial(3)(z)) < 1e-15);
  CHECK_THROWS_AS(chi(2, 0.0), std::domain_error);
}

TEST_CASE("chi against the Macdonald series") {
  const Complex z(0.5, 0.3);
  for (int l = 0; l <= 6; ++l) {
    CHECK(rel(chi(l, z), oracle::macdonald_chi(l, z)) < 1e-13);
    CHECK(rel(chi(l, -z), oracle::macdonald_chi(l, -z)) < 1e-13);
  }
  CHECK(rel(chi(2, z) * chi(2, -z), oracle::macdonald_chi(2, z) * oracle::macdonald_chi(2, -z)) < 1e-13);
}

TEST_CASE("chi stays finite and accurate at high order") {
  // Past l(l+1) = 2|z| the coefficient sum overflows; the recurrence must take over.
  const Complex z(0.0, -100.0);
  for (int l : {20, 60, 100, 150}) {
    const Complex value = chi(l, z);
    CHECK(std::isfinite(value.real()));
    CHECK(std::isfinite(value.imag()));
    CHECK(rel(chi_scaled(l, z), oracle::chi_scaled_sum(l, z)) < 1e-12);
    CHECK(rel(value, std::exp(-z) * oracle::chi_scaled_sum(l, z)) < 1e-12);
  }
  const Complex w(1.5, 0.5);
  CHECK(rel(chi(40, w), oracle::macdonald_chi(40, w)) < 1e-12);
  CHECK(rel(chi(12, w), ChiPolynomial(12)(w)) < 1e-13);
}

TEST_CASE("chi solves the free radial equation") {
  auto second = [](int l, Complex z, double h) {
    return (-chi(l, z + 2 * h) + 16.0 * chi(l, z + h) - 30.0 * chi(l, z) + 16.0 * chi(l, z - h) - chi(l, z - 2 * h)) /
           (12 * h * h);
  };
  const double h = 4e-3;
  for (int l = 0; l <= 6; ++l)
    for (Complex z : {Complex(1.3, 0.4), Complex(0.0, -3.0), Complex(2.5, 0.0)}) {
      // Richardson step on the five-point stencil.
      const Complex d2 = (16.0 * second(l, z, h / 2) - second(l, z, h)) / 15.0;
      const Complex expected = (1.0 + l * (l + 1.0) / (z * z)) * chi(l, z);
      CHECK(std::abs(d2 - expected) / std::abs(expected) < 1e-9);
    }
}

TEST_CASE("diagonal half-Wronskian is exactly one") {
  for (int l = 0; l <= 10; ++l) {
    CHECK(half_wronskian_polynomial(l, l) == RationalPolynomial::constant(1));
    CHECK(half_wronskian_exact(l, l, Complex(0.3, 2.0)) == Complex(1.0, 0.0));
  }
}

TEST_CASE("regular and irregular Riccati functions") {
  for (double x : {0.01, 0.5, 3.0, 40.0}) {
    CHECK(regular_psi(0, x) == doctest::Approx(std::sin(x)).epsilon(1e-14));
    CHECK(regular_psi(1, x) == doctest::Approx(std::sin(x) / x - std::cos(x)).epsilon(1e-12));
    CHECK(irregular_psi(0, x) == doctest::Approx(-std::cos(x)).epsilon(1e-14));
  }
  for (int l = 0; l <= 10; ++l)
    for (double x : {0.1, 1.0, 10.0}) {
      const double expected = oracle::riccati_j(l, x);
      CHECK(std::abs(regular_psi(l, x) - expected) / std::abs(expected) < 1e-10);
    }
  CHECK_THROWS_AS(regular_psi(1, 0.0), std::domain_error);
  CHECK_THROWS_AS(regular_psi(1, -2.0), std::domain_error);
}

TEST_CASE("regular_psi matches the chi definition where both are accurate") {
  for (int l = 0; l <= 5; ++l)
    for (double x : {2.0, 7.5, 30.0}) {
      const Complex i(0.0, 1.0);
      const Complex def = (std::pow(i, -l) * chi(l, -i * x) - std::pow(i, l) * chi(l, i * x)) / (2.0 * i);
      CHECK(std::abs(def.imag()) < 1e-12);
      CHECK(regular_psi(l, x) == doctest::Approx(def.real()).epsilon(1e-11));
    }
}

TEST_CASE("regular_psi is regular at the origin") {
  for (int l = 0; l <= 8; ++l) {
    double double_factorial = 1.0;
    for (int i = 2 * l + 1; i > 1; i -= 2) double_factorial *= i;
    const double a = regular_psi(l, 1e-3) / std::pow(1e-3, l + 1);
    const double b = regular_psi(l, 1e-4) / std::pow(1e-4, l + 1);
    CHECK(std::abs(a * double_factorial - 1.0) < 1e-6);
    CHECK(std::abs(b * double_factorial - 1.0) < 1e-8);
  }
}

TEST_CASE("Legendre polynomials") {
  CHECK(legendre(0, 0.3) == 1.0);
  CHECK(legendre(2, 0.5) == doctest::Approx(-0.125));
  CHECK(legendre(5, 1.0) == doctest::Approx(1.0));
  CHECK(legendre(3, -1.0) == doctest::Approx(-1.0));
}

TEST_CASE("spherical harmonics") {
  CHECK(std::abs(sph_harm(0, 0, direction(1.2, 2.3)) - 1.0 / std::sqrt(4 * pi)) < 1e-15);
  CHECK(std::abs(sph_harm(1, 0, z_axis) - std::sqrt(3.0 / (4 * pi))) < 1e-15);
  const double theta = 0.8, phi = 2.1;
  const Complex y11 = -std::sqrt(3.0 / (8 * pi)) * std::sin(theta) * std::polar(1.0, phi);
  CHECK(std::abs(sph_harm(1, 1, direction(theta, phi)) - y11) < 1e-15);
  CHECK(std::abs(sph_harm(2, -1, direction(theta, phi)) - std::conj(sph_harm(2, 1, direction(theta, phi))) * -1.0) <
        1e-15);
  CHECK_THROWS_AS(sph_harm(2, 3, z_axis), std::out_of_range);
  // Unnormalized directions are accepted.
  CHECK(std::abs(sph_harm(3, 2, direction(theta, phi) * 5.0) - sph_harm(3, 2, direction(theta, phi))) < 1e-15);
}

TEST_CASE("sphere quadrature") {
  const auto g1 = gauss_legendre_sphere(1);
  double sum = 0.0;
  for (double w : g1.weights) sum += w;
  CHECK(sum == doctest::Approx(4 * pi).epsilon(1e-14));

  const auto g8 = gauss_legendre_sphere(8);
  auto integral = [&](int l, int m, int j, int mu) {
    Complex s = 0.0;
    for (std::size_t q = 0; q < g8.size(); ++q)
      s += g8.weights[q] * sph_harm(l, m, g8.nodes[q]) * std::conj(sph_harm(j, mu, g8.nodes[q]));
    return s;
  };
  CHECK(std::abs(integral(3, 0, 3, 0) - 1.0) < 1e-12);
  CHECK(std::abs(integral(3, 0, 5, 0)) < 1e-12);
  CHECK(std::abs(integral(2, 1, 2, 1) - 1.0) < 1e-12);
  for (int l = 0; l <= 8; ++l)
    for (int j = 0; j + l <= 8; ++j)
      for (int m = -l; m <= l; ++m)
        for (int mu = -j; mu <= j; ++mu) {
          const Complex expected = (l == j && m == mu) ? 1.0 : 0.0;
          CHECK(std::abs(integral(l, m, j, mu) - expected) < 1e-12);
        }
  for (const auto& n : g8.nodes) CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Gauss-Legendre line rule") {
  const auto rule = gauss_legendre(5);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 8);
  CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
}
