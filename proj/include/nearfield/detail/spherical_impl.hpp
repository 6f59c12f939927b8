#pragma once

// Precision-generic spherical harmonics and Gauss-Legendre nodes, shared by
// the double-precision API and the extended-precision flux quadrature.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace nearfield::detail {

template <typename T>
std::vector<std::complex<T>> sph_harm_table(int l_max, T cos_theta, T sin_theta, T phi) {
  using std::acos;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T pi = acos(T(-1));
  std::vector<std::complex<T>> table(static_cast<std::size_t>((l_max + 1) * (l_max + 1)));
  auto idx = [](int l, int m) { return static_cast<std::size_t>(l * l + l + m); };
  T pmm = 1 / sqrt(4 * pi);
  for (int m = 0; m <= l_max; ++m) {
    if (m > 0) pmm *= -sqrt(T(2 * m + 1) / T(2 * m)) * sin_theta;
    const std::complex<T> phase(cos(T(m) * phi), sin(T(m) * phi));
    T p_lm2 = 0, p_lm1 = pmm;
    for (int l = m; l <= l_max; ++l) {
      T p;
      if (l == m) {
        p = pmm;
      } else if (l == m + 1) {
        p = cos_theta * sqrt(T(2 * m + 3)) * pmm;
        p_lm2 = pmm;
      } else {
        const T a = sqrt(T(4 * l * l - 1) / T(l * l - m * m));
        const T a_prev = sqrt(T(4 * (l - 1) * (l - 1) - 1) / T((l - 1) * (l - 1) - m * m));
        p = a * (cos_theta * p_lm1 - p_lm2 / a_prev);
        p_lm2 = p_lm1;
      }
      p_lm1 = p;
      const std::complex<T> y = phase * p;
      table[idx(l, m)] = y;
      if (m > 0) table[idx(l, -m)] = std::conj(y) * T(m % 2 == 0 ? 1 : -1);
    }
  }
  return table;
}

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
template <typename T>
void gauss_legendre(int n, std::vector<T>& nodes, std::vector<T>& weights) {
  using std::abs;
  using std::acos;
  using std::cos;
  if (n < 1) throw std::invalid_argument("gauss_legendre needs at least one node");
  const T pi = acos(T(-1));
  const T eps = std::numeric_limits<T>::epsilon();
  nodes.assign(n, T(0));
  weights.assign(n, T(0));
  auto evaluate = [n](const T& x, T& p, T& dp) {
    T p0 = 1, p1 = x;
    for (int k = 1; k < n; ++k) {
      T p2 = (T(2 * k + 1) * x * p1 - T(k) * p0) / T(k + 1);
      p0 = p1;
      p1 = p2;
    }
    p = p1;
    dp = T(n) * (x * p1 - p0) / (x * x - 1);
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    T x = cos(pi * (T(i) + T(0.75)) / (T(n) + T(0.5)));
    T p, dp;
    for (int iter = 0; iter < 200; ++iter) {
      evaluate(x, p, dp);
      const T dx = p / dp;
      x -= dx;
      if (abs(dx) <= 4 * eps) break;
    }
    evaluate(x, p, dp);
    const T w = 2 / ((1 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0;
}

}  // namespace nearfield::detail
