#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nearfield/polynomial.hpp"
#include "nearfield/special_functions.hpp"
#include "nearfield/vec3.hpp"

namespace nearfield {

/// How exit-channel fluxes are weighted relative to the entrance channel.
enum class WeightMode { momentum_ratio, velocity_ratio };

std::string to_string(WeightMode mode);
WeightMode weight_mode_from_string(const std::string& name);

struct Channel {
  std::string label;
  double k = 0.0;         ///< wavenumber, inverse length
  double velocity = 0.0;  ///< only read in velocity_ratio mode
};

/// Open scattering channels together with the entrance channel.
class ChannelSet {
 public:
  /// Throws std::invalid_argument naming the violated invariant.
  ChannelSet(std::vector<Channel> channels, std::size_t entrance,
             WeightMode mode = WeightMode::momentum_ratio);

  std::size_t size() const { return channels_.size(); }
  const Channel& operator[](std::size_t b) const { return channels_.at(b); }
  const std::vector<Channel>& channels() const { return channels_; }
  std::size_t entrance() const { return entrance_; }
  WeightMode weight_mode() const { return mode_; }

  double k(std::size_t b) const { return channels_.at(b).k; }
  /// k_b, or v_b in velocity_ratio mode.
  double flux_speed(std::size_t b) const;
  /// flux_speed(b) / flux_speed(entrance).
  double weight(std::size_t b) const { return flux_speed(b) / flux_speed(entrance_); }

  ChannelSet with_entrance(std::size_t a) const { return {channels_, a, mode_}; }

 private:
  std::vector<Channel> channels_;
  std::size_t entrance_;
  WeightMode mode_;
};

/// Sparse partial-wave coefficients B^{lm}_{beta alpha} of
/// f_{beta alpha}(n) = sum_{l,m} Y_l^m(n) B^{lm}_{beta alpha}
/// for one entrance channel and one incident direction.
class PartialWaveAmplitude {
 public:
  using ModeMap = std::map<std::pair<int, int>, Complex>;

  explicit PartialWaveAmplitude(std::size_t channel_count, std::size_t entrance = 0,
                                Vec3 incident = z_axis);

  std::size_t channel_count() const { return modes_.size(); }
  std::size_t entrance() const { return entrance_; }
  const Vec3& incident() const { return incident_; }

  /// Throws std::out_of_range for a bad channel or |m| > l.
  void set(std::size_t beta, int l, int m, Complex value);
  Complex coefficient(std::size_t beta, int l, int m) const;
  const ModeMap& modes(std::size_t beta) const { return modes_.at(beta); }

  /// Largest l with a stored coefficient over all channels, -1 if none.
  int l_max() const;
  bool is_zero() const;

  PartialWaveAmplitude scaled(Complex s) const;
  PartialWaveAmplitude operator+(const PartialWaveAmplitude& o) const;

 private:
  std::size_t entrance_;
  Vec3 incident_;
  std::vector<ModeMap> modes_;
};

/// f_{beta alpha}(n). Throws std::out_of_range for an unknown channel.
Complex evaluate(const PartialWaveAmplitude& f, std::size_t beta, const Vec3& n);

/// c_l(n) = sum_m Y_l^m(n) B^{lm}_{beta alpha} for l = 0..l_max.
std::vector<Complex> partial_sums(const PartialWaveAmplitude& f, std::size_t beta, const Vec3& n,
                                  int l_max);

/// Eigenvalue action of the squared orbital momentum: B^{lm} -> [l(l+1)]^power B^{lm}.
PartialWaveAmplitude apply_angular_operator(const PartialWaveAmplitude& f, int power);

/// (1/S!) prod_{mu=1}^{S} [l(l+1) - mu(mu-1)].
Rational h_multiplier(int l, int S);

/// Coefficient h_S of the inverse-distance expansion of the scattered wave.
PartialWaveAmplitude h_coefficient(const PartialWaveAmplitude& f, int S);

/// Projects sampled amplitudes back onto Y_l^m for l <= l_max with the grid's quadrature.
template <typename Sampler>
PartialWaveAmplitude project(Sampler&& sample, std::size_t channel_count, int l_max,
                             const AngularGrid& grid, std::size_t entrance = 0) {
  PartialWaveAmplitude out(channel_count, entrance);
  std::vector<std::vector<Complex>> acc(channel_count,
                                        std::vector<Complex>(lm_index(l_max, l_max) + 1));
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const auto y = sph_harm_table(l_max, grid.nodes[q]);
    for (std::size_t b = 0; b < channel_count; ++b) {
      const Complex v = sample(b, grid.nodes[q]) * grid.weights[q];
      for (std::size_t i = 0; i < y.size(); ++i) acc[b][i] += std::conj(y[i]) * v;
    }
  }
  for (std::size_t b = 0; b < channel_count; ++b)
    for (int l = 0; l <= l_max; ++l)
      for (int m = -l; m <= l; ++m) out.set(b, l, m, acc[b][lm_index(l, m)]);
  return out;
}

/// Per-l channel-space S matrices S_l, l = 0..l_max.
struct SMatrixModel {
  std::vector<Eigen::MatrixXcd> blocks;

  std::size_t channel_count() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  int l_max() const { return static_cast<int>(blocks.size()) - 1; }
  /// max_l max_{ij} |(S_l^dagger S_l - 1)_{ij}|.
  double unitarity_deviation() const;
};

/// Hard-sphere phase shift with tan(delta_l) = j_l(ka)/y_l(ka), delta in (-pi/2, pi/2].
double hard_sphere_phase_shift(int l, double k, double a);
SMatrixModel hard_sphere_model(double k, double a, int l_max);
/// Independent random unitary S_l per l (QR of a complex Gaussian matrix).
SMatrixModel random_unitary_model(std::size_t channel_count, int l_max, std::uint64_t seed);

/// Partial-wave amplitudes of the entrance channel of `channels` for incidence
/// along kappa. Throws std::invalid_argument for a non-unitary model.
PartialWaveAmplitude amplitudes_from_smatrix(const SMatrixModel& model, const ChannelSet& channels,
                                             const Vec3& kappa = z_axis);

/// Rotates an amplitude that is axially symmetric about z (m = 0 only) to
/// incidence along kappa. Throws std::invalid_argument for other inputs.
PartialWaveAmplitude reorient(const PartialWaveAmplitude& f, const Vec3& kappa);

/// Amplitudes for every entrance channel, as needed by the unitarity relation.
struct AmplitudeSet {
  ChannelSet channels;
  std::vector<PartialWaveAmplitude> by_entrance;

  /// Throws std::out_of_range when the entrance channel has no data.
  PartialWaveAmplitude oriented(std::size_t entrance, const Vec3& kappa) const;
  AmplitudeSet scaled(Complex s) const;
};

AmplitudeSet amplitude_set_from_smatrix(const SMatrixModel& model, const ChannelSet& channels);

/// Scattered part of the channel wave factor, (1/R) sum chi_l(-i k_beta R) Y_l^m B^{lm}.
Complex scattered_wave_exact(const PartialWaveAmplitude& f, const ChannelSet& channels,
                             std::size_t beta, const Vec3& position);

/// Same quantity from e^{ikR}/R [f + sum_{S=1}^{S_max} h_S (-2ikR)^{-S}].
Complex scattered_wave_asymptotic(const PartialWaveAmplitude& f, const ChannelSet& channels,
                                  std::size_t beta, const Vec3& position, int S_max);

/// Full channel wave factor: incident plane wave in the entrance channel plus
/// the scattered wave (exact when S_max is empty).
Complex wave_factor(const PartialWaveAmplitude& f, const ChannelSet& channels, std::size_t beta,
                    const Vec3& position, std::optional<int> S_max = std::nullopt);

}  // namespace nearfield
