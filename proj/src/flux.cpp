#include "nearfield/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "nearfield/detail/spherical_impl.hpp"

namespace nearfield {

namespace {

constexpr double realness_tolerance = 1e-10;

void require_compatible(const PartialWaveAmplitude& f, const ChannelSet& channels) {
  if (f.channel_count() != channels.size())
    throw std::invalid_argument("amplitude has " + std::to_string(f.channel_count()) +
                                " channels but the channel set has " + std::to_string(channels.size()));
  if (f.entrance() != channels.entrance())
    throw std::invalid_argument("amplitude entrance channel differs from the channel set's");
}

void require_distance(double R) {
  if (!(R > 0.0)) throw std::domain_error("detector distance R must be > 0");
}

// Y_l^m on the extended-precision twin of gauss_legendre_sphere(order).
struct ExtendedSphere {
  std::vector<Extended> weights;
  std::vector<std::vector<ExtendedComplex>> ylm;  // [node][lm_index]
};

const ExtendedSphere& extended_sphere(int order, int l_max) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<ExtendedSphere>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{order, l_max}];
  if (slot) return *slot;
  slot = std::make_unique<ExtendedSphere>();
  const int n_theta = order / 2 + 1;
  const int n_phi = order + 1;
  std::vector<Extended> x, w;
  detail::gauss_legendre<Extended>(n_theta, x, w);
  const Extended dphi = 2 * boost::multiprecision::acos(Extended(-1)) / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const Extended sin_theta = boost::multiprecision::sqrt(1 - x[i] * x[i]);
    for (int j = 0; j < n_phi; ++j) {
      slot->ylm.push_back(detail::sph_harm_table<Extended>(l_max, x[i], sin_theta, dphi * j));
      slot->weights.push_back(w[i] * dphi);
    }
  }
  return *slot;
}

// c_l(n_q) = sum_m Y_l^m(n_q) B^{lm} for every channel and node: [beta][node][l].
using ExtendedSamples = std::vector<std::vector<std::vector<ExtendedComplex>>>;

ExtendedSamples sample_extended(const PartialWaveAmplitude& f, const ExtendedSphere& sphere, int l_max) {
  ExtendedSamples out(f.channel_count());
  for (std::size_t b = 0; b < f.channel_count(); ++b) {
    out[b].assign(sphere.ylm.size(), std::vector<ExtendedComplex>(static_cast<std::size_t>(l_max) + 1));
    for (const auto& [key, value] : f.modes(b)) {
      const ExtendedComplex coeff(Extended(value.real()), Extended(value.imag()));
      const auto index = lm_index(key.first, key.second);
      for (std::size_t q = 0; q < sphere.ylm.size(); ++q) out[b][q][key.first] += sphere.ylm[q][index] * coeff;
    }
  }
  return out;
}

std::vector<std::vector<ExtendedComplex>> gram_matrices(const ExtendedSamples& left, const ExtendedSamples& right,
                                                        const ExtendedSphere& sphere, int l_max) {
  const std::size_t n = static_cast<std::size_t>(l_max) + 1;
  std::vector<std::vector<ExtendedComplex>> gram(left.size(), std::vector<ExtendedComplex>(n * n));
  for (std::size_t b = 0; b < left.size(); ++b)
    for (std::size_t q = 0; q < sphere.weights.size(); ++q)
      for (std::size_t l = 0; l < n; ++l) {
        const ExtendedComplex cl = std::conj(left[b][q][l]) * sphere.weights[q];
        for (std::size_t j = 0; j < n; ++j) gram[b][l * n + j] += cl * right[b][q][j];
      }
  return gram;
}

ExtendedComplex horner_extended(const std::vector<Extended>& coeffs, const ExtendedComplex& u) {
  ExtendedComplex acc(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * u + ExtendedComplex(*it);
  return acc;
}

Complex form_value(const std::vector<std::vector<ExtendedComplex>>& gram, int l_max, const ChannelSet& channels,
                   std::optional<double> R) {
  const std::size_t n = static_cast<std::size_t>(l_max) + 1;
  ExtendedComplex total(0);
  for (std::size_t b = 0; b < gram.size(); ++b) {
    ExtendedComplex sum(0);
    if (R) {
      const ExtendedComplex u(Extended(0), 1 / (2 * Extended(channels.k(b)) * Extended(*R)));
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t j = 0; j < n; ++j)
          sum += gram[b][l * n + j] *
                 horner_extended(half_wronskian_coefficients(static_cast<int>(j), static_cast<int>(l)).extended, u);
    } else {
      for (const auto& g : gram[b]) sum += g;
    }
    total += sum * Extended(channels.flux_speed(b));
  }
  return {static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

// Shared double sum behind the exact and truncated pointwise fluxes.
double pointwise_flux(const PartialWaveAmplitude& f, const ChannelSet& channels, double R, const Vec3& n,
                      int max_power) {
  require_compatible(f, channels);
  require_distance(R);
  const int l_max = f.l_max();
  if (l_max < 0) return 0.0;
  Complex total = 0.0;
  double magnitude = 0.0;
  for (std::size_t b = 0; b < channels.size(); ++b) {
    const auto c = partial_sums(f, b, n, l_max);
    const Complex u(0.0, 1.0 / (2.0 * channels.k(b) * R));
    Complex sum = 0.0;
    double mag = 0.0;
    for (int l = 0; l <= l_max; ++l) {
      if (c[l] == Complex{}) continue;
      for (int j = 0; j <= l_max; ++j) {
        if (c[j] == Complex{}) continue;
        const auto& coeffs = half_wronskian_coefficients(j, l).real;
        Complex w;
        if (max_power < 0 || static_cast<std::size_t>(max_power) + 1 >= coeffs.size()) {
          w = horner(coeffs, u);
        } else {
          w = horner(std::vector<double>(coeffs.begin(), coeffs.begin() + max_power + 1), u);
        }
        const Complex term = std::conj(c[l]) * c[j] * w;
        sum += term;
        mag += std::abs(term);
      }
    }
    total += channels.weight(b) * sum;
    magnitude += channels.weight(b) * mag;
  }
  if (std::abs(total.imag()) > realness_tolerance * magnitude)
    throw std::runtime_error("differential flux has an imaginary residue; the Wronskian pairing is not Hermitian");
  return total.real();
}

}  // namespace

double differential_flux_exact(const PartialWaveAmplitude& f, const ChannelSet& channels, double R,
                               const Vec3& n) {
  return pointwise_flux(f, channels, R, n, -1);
}

double differential_flux_truncated(const PartialWaveAmplitude& f, const ChannelSet& channels, double R,
                                   const Vec3& n, int order) {
  if (order < 0) throw std::invalid_argument("truncation order must be >= 0");
  return pointwise_flux(f, channels, R, n, order);
}

std::array<double, 5> asymptotic_flux_terms(const PartialWaveAmplitude& f, const ChannelSet& channels, double R,
                                            const Vec3& n) {
  require_compatible(f, channels);
  require_distance(R);
  std::array<PartialWaveAmplitude, 4> powers{apply_angular_operator(f, 1), apply_angular_operator(f, 2),
                                             apply_angular_operator(f, 3), apply_angular_operator(f, 4)};
  std::array<double, 5> terms{};
  for (std::size_t b = 0; b < channels.size(); ++b) {
    const Complex f0 = evaluate(f, b, n);
    const Complex f1 = evaluate(powers[0], b, n);
    const Complex f2 = evaluate(powers[1], b, n);
    const Complex f3 = evaluate(powers[2], b, n);
    const Complex f4 = evaluate(powers[3], b, n);
    const double kR = channels.k(b) * R;
    const double e = 1.0 / (2.0 * kR);
    const double w = channels.weight(b);
    terms[0] += w * std::norm(f0);
    terms[1] += w * (-(1.0 / kR) * (std::conj(f0) * f1).imag());
    terms[2] += w * e * e * (std::norm(f1) - (std::conj(f0) * f2).real());
    terms[3] += w * std::pow(e, 3) / 3.0 *
                (std::conj(f0) * f3 - 3.0 * std::conj(f1) * f2 - 2.0 * std::conj(f0) * f2).imag();
    terms[4] += w * std::pow(e, 4) / 12.0 *
                (3.0 * std::norm(f2) + (std::conj(f0) * f4 - 4.0 * std::conj(f1) * f3).real() +
                 12.0 * ((std::conj(f0) * f2).real() - std::norm(f1)) -
                 8.0 * (std::conj(f0) * f3 - std::conj(f1) * f2).real());
  }
  return terms;
}

double differential_flux_asymptotic(const PartialWaveAmplitude& f, const ChannelSet& channels, double R,
                                    const Vec3& n, int order) {
  if (order < 0 || order > 4)
    throw std::invalid_argument("asymptotic flux is available through order 4, got " + std::to_string(order));
  const auto terms = asymptotic_flux_terms(f, channels, R, n);
  double sum = 0.0;
  for (int p = 0; p <= order; ++p) sum += terms[p];
  return sum;
}

double CrossSections::total() const {
  double sum = 0.0;
  for (double s : parseval) sum += s;
  return sum;
}

CrossSections cross_sections(const PartialWaveAmplitude& f, const ChannelSet& channels, const AngularGrid& grid) {
  require_compatible(f, channels);
  CrossSections out;
  for (std::size_t b = 0; b < channels.size(); ++b) {
    const double w = channels.weight(b);
    double parseval = 0.0;
    for (const auto& [key, value] : f.modes(b)) parseval += std::norm(value);
    out.parseval.push_back(w * parseval);
    std::vector<double> diff(grid.size());
    double quad = 0.0;
    for (std::size_t q = 0; q < grid.size(); ++q) {
      diff[q] = w * std::norm(evaluate(f, b, grid.nodes[q]));
      quad += grid.weights[q] * diff[q];
    }
    out.quadrature.push_back(quad);
    out.differential.push_back(std::move(diff));
  }
  return out;
}

FluxForm::FluxForm(const PartialWaveAmplitude& left, const PartialWaveAmplitude& right, int grid_order)
    : l_max_(std::max(left.l_max(), right.l_max())) {
  if (left.channel_count() != right.channel_count()) throw std::invalid_argument("channel count mismatch");
  if (grid_order < 1) throw std::invalid_argument("grid order must be >= 1");
  if (l_max_ < 0) return;
  const auto& sphere = extended_sphere(grid_order, l_max_);
  const auto a = sample_extended(left, sphere, l_max_);
  const auto b = sample_extended(right, sphere, l_max_);
  gram_ = gram_matrices(a, b, sphere, l_max_);
}

Complex FluxForm::operator()(const ChannelSet& channels, std::optional<double> R) const {
  if (R) require_distance(*R);
  if (l_max_ < 0) return 0.0;
  if (gram_.size() != channels.size()) throw std::invalid_argument("channel count mismatch");
  return form_value(gram_, l_max_, channels, R);
}

double total_flux(const PartialWaveAmplitude& f, const ChannelSet& channels, double R, const AngularGrid& grid) {
  require_compatible(f, channels);
  require_distance(R);
  const FluxForm form(f, f, grid.order);
  return form(channels, R).real() / channels.flux_speed(channels.entrance());
}

FluxProfile flux_profile(const PartialWaveAmplitude& f, const ChannelSet& channels, std::span<const double> R_values,
                         const AngularGrid& grid, unsigned threads) {
  require_compatible(f, channels);
  for (double R : R_values) require_distance(R);
  FluxProfile profile;
  profile.R_values.assign(R_values.begin(), R_values.end());
  profile.grid = grid;
  const std::size_t count = R_values.size();
  profile.total.resize(count);
  profile.differential.resize(count);
  profile.min_differential.resize(count);
  profile.max_differential.resize(count);
  profile.below_validity.resize(count);
  profile.sigma_sum = cross_sections(f, channels, grid).total();

  const FluxForm form(f, f, grid.order);
  const double entrance_speed = channels.flux_speed(channels.entrance());
  double min_k = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < channels.size(); ++b) min_k = std::min(min_k, channels.k(b));

  std::vector<double> totals(count);
  std::vector<std::vector<double>> values(count);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < count; i += stride) {
      const double R = R_values[i];
      totals[i] = form(channels, R).real() / entrance_speed;
      values[i].resize(grid.size());
      for (std::size_t q = 0; q < grid.size(); ++q) values[i][q] = differential_flux_exact(f, channels, R, grid.nodes[q]);
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  for (std::size_t i = 0; i < count; ++i) {
    profile.total[i] = totals[i];
    const auto [lo, hi] = std::minmax_element(values[i].begin(), values[i].end());
    profile.min_differential[i] = values[i].empty() ? 0.0 : *lo;
    profile.max_differential[i] = values[i].empty() ? 0.0 : *hi;
    profile.below_validity[i] = min_k * R_values[i] < validity_kR;
    profile.differential[i] = std::move(values[i]);
  }
  return profile;
}

double unitarity_defect(const AmplitudeSet& amplitudes, std::span<const Vec3> directions, const AngularGrid& grid,
                        std::optional<double> R) {
  const auto& channels = amplitudes.channels;
  const std::size_t n = channels.size();
  if (amplitudes.by_entrance.size() < n)
    throw std::invalid_argument("unitarity check needs amplitudes for every entrance channel; got " +
                                std::to_string(amplitudes.by_entrance.size()) + " of " + std::to_string(n));
  if (directions.empty()) throw std::invalid_argument("unitarity check needs at least one direction");
  if (R) require_distance(*R);

  int l_max = -1;
  for (const auto& f : amplitudes.by_entrance) l_max = std::max(l_max, f.l_max());
  if (l_max < 0) return 0.0;

  const auto& sphere = extended_sphere(grid.order, l_max);
  // oriented[a][d]: entrance a, incidence along directions[d].
  std::vector<std::vector<PartialWaveAmplitude>> oriented(n);
  std::vector<std::vector<ExtendedSamples>> samples(n);
  for (std::size_t a = 0; a < n; ++a)
    for (const auto& d : directions) {
      oriented[a].push_back(amplitudes.oriented(a, d));
      samples[a].push_back(sample_extended(oriented[a].back(), sphere, l_max));
    }

  constexpr double four_pi = 4.0 * std::numbers::pi;
  double worst_residual = 0.0;
  double largest_flux = 0.0;
  for (std::size_t gamma = 0; gamma < n; ++gamma)
    for (std::size_t alpha = 0; alpha < n; ++alpha)
      for (std::size_t ds = 0; ds < directions.size(); ++ds)
        for (std::size_t dk = 0; dk < directions.size(); ++dk) {
          const auto gram = gram_matrices(samples[gamma][ds], samples[alpha][dk], sphere, l_max);
          const Complex flux = form_value(gram, l_max, channels, R);
          const Complex forward = evaluate(oriented[alpha][dk], gamma, directions[ds]);
          const Complex reverse = evaluate(oriented[gamma][ds], alpha, directions[dk]);
          const Complex interference = -four_pi / Complex(0.0, 2.0) * (forward - std::conj(reverse));
          worst_residual = std::max(worst_residual, std::abs(flux + interference));
          largest_flux = std::max(largest_flux, std::abs(flux));
        }
  if (largest_flux == 0.0) return worst_residual == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return worst_residual / largest_flux;
}

double optical_theorem_defect(const PartialWaveAmplitude& f, const ChannelSet& channels, std::optional<double> R,
                              int grid_order) {
  require_compatible(f, channels);
  const std::size_t alpha = channels.entrance();
  double sigma = 0.0;
  if (R) {
    require_distance(*R);
    const int order = grid_order > 0 ? grid_order : default_grid_order(std::max(f.l_max(), 0));
    sigma = FluxForm(f, f, order)(channels, *R).real() / channels.flux_speed(alpha);
  } else {
    for (std::size_t b = 0; b < channels.size(); ++b) {
      double s = 0.0;
      for (const auto& [key, value] : f.modes(b)) s += std::norm(value);
      sigma += channels.weight(b) * s;
    }
  }
  const double forward = 4.0 * std::numbers::pi * evaluate(f, alpha, f.incident()).imag() /
                         channels.flux_speed(alpha);
  const double diff = std::abs(sigma - forward);
  if (sigma == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / std::abs(sigma);
}

std::vector<SeriesCheck> check_closed_form_series(int max_index) {
  std::vector<SeriesCheck> rows;
  for (int j = 0; j <= max_index; ++j)
    for (int l = 0; l <= max_index; ++l) {
      if (j == l) continue;
      const auto series = wronskian_series(j, l);
      for (int n = 0; n <= 3; ++n) {
        SeriesCheck row;
        row.j = j;
        row.l = l;
        row.n = n;
        row.extracted = series.coefficient(static_cast<std::size_t>(n));
        row.closed_form = *closed_form_series_coefficient(n, j, l);
        // Orders past l+j do not exist in the exact series, where the closed form must vanish.
        row.agrees = row.extracted == row.closed_form;
        rows.push_back(std::move(row));
      }
    }
  return rows;
}

double operator_form_discrepancy(const PartialWaveAmplitude& f, const ChannelSet& channels, double R,
                                 const Vec3& n) {
  const auto terms = asymptotic_flux_terms(f, channels, R, n);
  double asymptotic = 0.0, scale = 0.0;
  for (double t : terms) {
    asymptotic += t;
    scale += std::abs(t);
  }
  const double truncated = differential_flux_truncated(f, channels, R, n, 4);
  if (scale == 0.0) return std::abs(asymptotic - truncated);
  return std::abs(asymptotic - truncated) / scale;
}

}  // namespace nearfield
