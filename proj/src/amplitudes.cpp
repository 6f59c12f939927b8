#include "nearfield/amplitudes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace nearfield {

namespace {

constexpr double unitarity_tolerance = 1e-10;

bool is_z_axis(const Vec3& v) {
  const Vec3 u = v.normalized();
  return std::abs(u.x) < 1e-15 && std::abs(u.y) < 1e-15 && u.z > 0.0;
}

}  // namespace

std::string to_string(WeightMode mode) {
  return mode == WeightMode::momentum_ratio ? "momentum_ratio" : "velocity_ratio";
}

WeightMode weight_mode_from_string(const std::string& name) {
  if (name == "momentum_ratio") return WeightMode::momentum_ratio;
  if (name == "velocity_ratio") return WeightMode::velocity_ratio;
  throw std::invalid_argument("unknown weight_mode '" + name + "'");
}

ChannelSet::ChannelSet(std::vector<Channel> channels, std::size_t entrance, WeightMode mode)
    : channels_(std::move(channels)), entrance_(entrance), mode_(mode) {
  if (channels_.empty()) throw std::invalid_argument("channel set is empty");
  for (const auto& c : channels_) {
    if (!(c.k > 0.0) || !std::isfinite(c.k))
      throw std::invalid_argument("channel '" + c.label + "' is not open: wavenumber must be > 0");
    if (mode_ == WeightMode::velocity_ratio && (!(c.velocity > 0.0) || !std::isfinite(c.velocity)))
      throw std::invalid_argument("channel '" + c.label + "' needs a velocity > 0 in velocity_ratio mode");
  }
  if (entrance_ >= channels_.size())
    throw std::invalid_argument("entrance index " + std::to_string(entrance_) + " is not a valid channel");
}

double ChannelSet::flux_speed(std::size_t b) const {
  const auto& c = channels_.at(b);
  return mode_ == WeightMode::momentum_ratio ? c.k : c.velocity;
}

PartialWaveAmplitude::PartialWaveAmplitude(std::size_t channel_count, std::size_t entrance, Vec3 incident)
    : entrance_(entrance), incident_(incident.normalized()), modes_(channel_count) {
  if (channel_count == 0) throw std::invalid_argument("amplitude needs at least one channel");
  if (entrance >= channel_count) throw std::out_of_range("entrance channel out of range");
}

void PartialWaveAmplitude::set(std::size_t beta, int l, int m, Complex value) {
  if (beta >= modes_.size()) throw std::out_of_range("unknown exit channel " + std::to_string(beta));
  if (l < 0 || std::abs(m) > l)
    throw std::out_of_range("invalid mode (l=" + std::to_string(l) + ", m=" + std::to_string(m) + ")");
  modes_[beta][{l, m}] = value;
}

Complex PartialWaveAmplitude::coefficient(std::size_t beta, int l, int m) const {
  const auto& map = modes_.at(beta);
  const auto it = map.find({l, m});
  return it == map.end() ? Complex{} : it->second;
}

int PartialWaveAmplitude::l_max() const {
  int l_max = -1;
  for (const auto& map : modes_)
    if (!map.empty()) l_max = std::max(l_max, map.rbegin()->first.first);
  return l_max;
}

bool PartialWaveAmplitude::is_zero() const {
  for (const auto& map : modes_)
    for (const auto& [key, value] : map)
      if (value != Complex{}) return false;
  return true;
}

PartialWaveAmplitude PartialWaveAmplitude::scaled(Complex s) const {
  PartialWaveAmplitude out = *this;
  for (auto& map : out.modes_)
    for (auto& [key, value] : map) value *= s;
  return out;
}

PartialWaveAmplitude PartialWaveAmplitude::operator+(const PartialWaveAmplitude& o) const {
  if (o.channel_count() != channel_count()) throw std::invalid_argument("channel count mismatch");
  PartialWaveAmplitude out = *this;
  for (std::size_t b = 0; b < modes_.size(); ++b)
    for (const auto& [key, value] : o.modes_[b]) out.modes_[b][key] += value;
  return out;
}

Complex evaluate(const PartialWaveAmplitude& f, std::size_t beta, const Vec3& n) {
  if (beta >= f.channel_count()) throw std::out_of_range("unknown exit channel " + std::to_string(beta));
  const int l_max = f.l_max();
  if (l_max < 0) return {};
  const auto y = sph_harm_table(l_max, n);
  Complex sum = 0.0;
  for (const auto& [key, value] : f.modes(beta)) sum += y[lm_index(key.first, key.second)] * value;
  return sum;
}

std::vector<Complex> partial_sums(const PartialWaveAmplitude& f, std::size_t beta, const Vec3& n,
                                  int l_max) {
  std::vector<Complex> c(static_cast<std::size_t>(std::max(l_max, -1) + 1));
  if (l_max < 0) return c;
  const auto y = sph_harm_table(l_max, n);
  for (const auto& [key, value] : f.modes(beta))
    if (key.first <= l_max) c[key.first] += y[lm_index(key.first, key.second)] * value;
  return c;
}

PartialWaveAmplitude apply_angular_operator(const PartialWaveAmplitude& f, int power) {
  if (power < 1) throw std::invalid_argument("angular operator power must be >= 1");
  PartialWaveAmplitude out(f.channel_count(), f.entrance(), f.incident());
  for (std::size_t b = 0; b < f.channel_count(); ++b)
    for (const auto& [key, value] : f.modes(b)) {
      const double eigen = static_cast<double>(key.first) * (key.first + 1);
      out.set(b, key.first, key.second, std::pow(eigen, power) * value);
    }
  return out;
}

Rational h_multiplier(int l, int S) {
  if (S < 1) throw std::invalid_argument("h_S is defined for S >= 1");
  Rational product = 1;
  const long eigen = static_cast<long>(l) * (l + 1);
  for (int mu = 1; mu <= S; ++mu) product *= Rational(eigen - static_cast<long>(mu) * (mu - 1), mu);
  return product;
}

PartialWaveAmplitude h_coefficient(const PartialWaveAmplitude& f, int S) {
  PartialWaveAmplitude out(f.channel_count(), f.entrance(), f.incident());
  for (std::size_t b = 0; b < f.channel_count(); ++b)
    for (const auto& [key, value] : f.modes(b))
      out.set(b, key.first, key.second, to_double(h_multiplier(key.first, S)) * value);
  return out;
}

double SMatrixModel::unitarity_deviation() const {
  double worst = 0.0;
  for (const auto& s : blocks) {
    const Eigen::MatrixXcd d = s.adjoint() * s - Eigen::MatrixXcd::Identity(s.rows(), s.cols());
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
  }
  return worst;
}

double hard_sphere_phase_shift(int l, double k, double a) {
  if (!(k > 0.0) || !(a > 0.0)) throw std::invalid_argument("hard sphere needs k > 0 and a > 0");
  const double x = k * a;
  return std::atan(regular_psi(l, x) / irregular_psi(l, x));
}

SMatrixModel hard_sphere_model(double k, double a, int l_max) {
  if (l_max < 0) throw std::invalid_argument("l_max must be >= 0");
  SMatrixModel model;
  for (int l = 0; l <= l_max; ++l) {
    Eigen::MatrixXcd s(1, 1);
    s(0, 0) = std::polar(1.0, 2.0 * hard_sphere_phase_shift(l, k, a));
    model.blocks.push_back(std::move(s));
  }
  return model;
}

SMatrixModel random_unitary_model(std::size_t channel_count, int l_max, std::uint64_t seed) {
  if (channel_count == 0 || l_max < 0) throw std::invalid_argument("random model needs channels and l_max >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const auto n = static_cast<Eigen::Index>(channel_count);
  SMatrixModel model;
  for (int l = 0; l <= l_max; ++l) {
    Eigen::MatrixXcd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(normal(rng), normal(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    model.blocks.push_back(qr.householderQ() * Eigen::MatrixXcd::Identity(n, n));
  }
  return model;
}

PartialWaveAmplitude amplitudes_from_smatrix(const SMatrixModel& model, const ChannelSet& channels,
                                             const Vec3& kappa) {
  if (model.channel_count() != channels.size())
    throw std::invalid_argument("S-matrix dimension does not match the channel set");
  if (model.unitarity_deviation() > unitarity_tolerance)
    throw std::invalid_argument("S-matrix model is not unitary");
  const std::size_t alpha = channels.entrance();
  PartialWaveAmplitude f(channels.size(), alpha);
  for (int l = 0; l <= model.l_max(); ++l) {
    const auto& s = model.blocks[l];
    const double norm = std::sqrt(4.0 * std::numbers::pi * (2 * l + 1));
    for (std::size_t b = 0; b < channels.size(); ++b) {
      const Complex t = s(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(alpha)) - (b == alpha ? 1.0 : 0.0);
      const double speeds = std::sqrt(channels.flux_speed(alpha) * channels.flux_speed(b));
      f.set(b, l, 0, norm * t / (Complex(0.0, 2.0) * speeds));
    }
  }
  return reorient(f, kappa);
}

PartialWaveAmplitude reorient(const PartialWaveAmplitude& f, const Vec3& kappa) {
  if (is_z_axis(kappa) && is_z_axis(f.incident())) return f;
  if (!is_z_axis(f.incident()))
    throw std::invalid_argument("reorient expects an amplitude referenced to incidence along z");
  for (std::size_t b = 0; b < f.channel_count(); ++b)
    for (const auto& [key, value] : f.modes(b))
      if (key.second != 0 && value != Complex{})
        throw std::invalid_argument("reorient needs an axially symmetric amplitude (m = 0 only)");
  PartialWaveAmplitude out(f.channel_count(), f.entrance(), kappa);
  const int l_max = f.l_max();
  if (l_max < 0) return out;
  const auto y = sph_harm_table(l_max, kappa);
  for (std::size_t b = 0; b < f.channel_count(); ++b)
    for (const auto& [key, value] : f.modes(b)) {
      const int l = key.first;
      const double norm = std::sqrt(4.0 * std::numbers::pi / (2 * l + 1));
      for (int m = -l; m <= l; ++m) out.set(b, l, m, norm * std::conj(y[lm_index(l, m)]) * value);
    }
  return out;
}

PartialWaveAmplitude AmplitudeSet::oriented(std::size_t entrance, const Vec3& kappa) const {
  if (entrance >= by_entrance.size())
    throw std::out_of_range("no amplitude data for entrance channel " + std::to_string(entrance));
  return reorient(by_entrance[entrance], kappa);
}

AmplitudeSet AmplitudeSet::scaled(Complex s) const {
  AmplitudeSet out = *this;
  for (auto& f : out.by_entrance) f = f.scaled(s);
  return out;
}

AmplitudeSet amplitude_set_from_smatrix(const SMatrixModel& model, const ChannelSet& channels) {
  AmplitudeSet set{channels, {}};
  for (std::size_t a = 0; a < channels.size(); ++a)
    set.by_entrance.push_back(amplitudes_from_smatrix(model, channels.with_entrance(a)));
  return set;
}

Complex scattered_wave_exact(const PartialWaveAmplitude& f, const ChannelSet& channels,
                             std::size_t beta, const Vec3& position) {
  const double R = position.norm();
  if (!(R > 0.0)) throw std::domain_error("wave factor needs R > 0");
  const int l_max = f.l_max();
  if (l_max < 0) return {};
  const auto c = partial_sums(f, beta, position, l_max);
  const Complex z(0.0, -channels.k(beta) * R);
  Complex sum = 0.0;
  for (int l = 0; l <= l_max; ++l) sum += chi(l, z) * c[l];
  return sum / R;
}

Complex scattered_wave_asymptotic(const PartialWaveAmplitude& f, const ChannelSet& channels,
                                  std::size_t beta, const Vec3& position, int S_max) {
  const double R = position.norm();
  if (!(R > 0.0)) throw std::domain_error("wave factor needs R > 0");
  const double kR = channels.k(beta) * R;
  const Complex two_z(0.0, -2.0 * kR);
  Complex bracket = evaluate(f, beta, position);
  Complex power = 1.0;
  for (int S = 1; S <= S_max; ++S) {
    power *= two_z;
    bracket += evaluate(h_coefficient(f, S), beta, position) / power;
  }
  return std::polar(1.0, kR) * bracket / R;
}

Complex wave_factor(const PartialWaveAmplitude& f, const ChannelSet& channels, std::size_t beta,
                    const Vec3& position, std::optional<int> S_max) {
  Complex incident = 0.0;
  if (beta == f.entrance()) incident = std::polar(1.0, channels.k(beta) * dot(f.incident(), position));
  const Complex scattered = S_max ? scattered_wave_asymptotic(f, channels, beta, position, *S_max)
                                  : scattered_wave_exact(f, channels, beta, position);
  return incident + scattered;
}

}  // namespace nearfield
