#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nearfield/amplitudes.hpp"
#include "nearfield/special_functions.hpp"
#include "nearfield/wronskian.hpp"

namespace nearfield {

/// Below k_beta R = 1 the inverse-distance expansion is not expected to hold;
/// samples there are flagged in profiles.
inline constexpr double validity_kR = 1.0;

/// Angular grid order that integrates every Y-bilinear of an l_max amplitude exactly.
constexpr int default_grid_order(int l_max) { return 2 * l_max + 4; }

/// Scattered differential flux at distance R along n:
///   sum_beta w_beta sum_{l,j} conj(c_l) c_j (1/2)[chi_j(z_beta) d<-> chi_l(-z_beta)],
/// z_beta = -i k_beta R, c_l = sum_m Y_l^m(n) B^{lm}. Throws std::domain_error for
/// R <= 0 and std::runtime_error if the double sum is not real to 1e-10.
double differential_flux_exact(const PartialWaveAmplitude& f, const ChannelSet& channels, double R,
                               const Vec3& n);

/// The same double sum with each half-Wronskian cut after (2z)^{-order}.
double differential_flux_truncated(const PartialWaveAmplitude& f, const ChannelSet& channels,
                                   double R, const Vec3& n, int order);

/// Contributions of inverse-distance orders 0..4 from the operator form of the
/// flux, each already multiplied by its power of 1/(k_beta R) and summed over channels.
std::array<double, 5> asymptotic_flux_terms(const PartialWaveAmplitude& f, const ChannelSet& channels,
                                            double R, const Vec3& n);

/// Sum of asymptotic_flux_terms through `order` (0..4); order 0 is the
/// far-field cross-section integrand. Throws std::invalid_argument past 4.
double differential_flux_asymptotic(const PartialWaveAmplitude& f, const ChannelSet& channels,
                                    double R, const Vec3& n, int order);

struct CrossSections {
  std::vector<double> parseval;    ///< sigma_{beta alpha} = w_beta sum |B|^2
  std::vector<double> quadrature;  ///< same from the grid
  std::vector<std::vector<double>> differential;  ///< [beta][node] w_beta |f|^2

  double total() const;
};

CrossSections cross_sections(const PartialWaveAmplitude& f, const ChannelSet& channels,
                             const AngularGrid& grid);

/// Angular integral of differential_flux_exact at R. The integral is taken on
/// the extended-precision twin of the (Gauss-Legendre product) grid.
double total_flux(const PartialWaveAmplitude& f, const ChannelSet& channels, double R,
                  const AngularGrid& grid);

/// Sesquilinear flux form between two amplitudes over the grid,
///   sum_beta s_beta int dOmega sum_{l,j} conj(c^left_l) c^right_j W_jl(z_beta),
/// evaluated in extended precision. s_beta is the flux speed (k_beta in
/// momentum_ratio mode). An empty R gives the far-field limit W = 1.
class FluxForm {
 public:
  FluxForm(const PartialWaveAmplitude& left, const PartialWaveAmplitude& right, int grid_order);

  Complex operator()(const ChannelSet& channels, std::optional<double> R) const;

 private:
  int l_max_;
  // gram_[beta][l * (l_max_+1) + j] = sum_q w_q conj(c^left_l(n_q)) c^right_j(n_q)
  std::vector<std::vector<ExtendedComplex>> gram_;
};

struct FluxProfile {
  std::vector<double> R_values;
  AngularGrid grid;
  std::vector<double> total;                   ///< per R
  std::vector<std::vector<double>> differential;  ///< [R][node]
  std::vector<double> min_differential;
  std::vector<double> max_differential;
  std::vector<bool> below_validity;  ///< some k_beta R < 1
  double sigma_sum = 0.0;            ///< far-field sum_beta sigma_{beta alpha}
};

/// Evaluates the flux over the R schedule. Worker threads split the R values;
/// every entry is computed independently, so results do not depend on `threads`.
FluxProfile flux_profile(const PartialWaveAmplitude& f, const ChannelSet& channels,
                         std::span<const double> R_values, const AngularGrid& grid,
                         unsigned threads = 1);

/// max over (gamma, alpha, s, kappa) of |unitarity flux + interference term|,
/// normalized by the largest flux term; 0 for no scattering.
///
/// The flux term is the finite-R sesquilinear form of f_{beta gamma}(.; s) and
/// f_{beta alpha}(.; kappa) (far field when R is empty); the interference term is
/// -(4 pi/2i)[f_{gamma alpha}(s; kappa) - conj(f_{alpha gamma}(kappa; s))].
double unitarity_defect(const AmplitudeSet& amplitudes, std::span<const Vec3> directions,
                        const AngularGrid& grid, std::optional<double> R = std::nullopt);

/// |sigma_total - (4 pi / s_alpha) Im f_{alpha alpha}(kappa; kappa)| / sigma_total,
/// where sigma_total is the Parseval sum, or total_flux at R when given.
double optical_theorem_defect(const PartialWaveAmplitude& f, const ChannelSet& channels,
                              std::optional<double> R = std::nullopt, int grid_order = -1);

/// One row of the comparison between extracted and closed-form A_n(l,j).
struct SeriesCheck {
  int j = 0;
  int l = 0;
  int n = 0;
  Rational extracted;
  Rational closed_form;
  bool agrees = false;
};

/// Compares A_0..A_3 for all j != l up to max_index.
std::vector<SeriesCheck> check_closed_form_series(int max_index);

/// |asymptotic(order 4) - truncated Wronskian(order 4)| normalized by the
/// sum of absolute order-0..4 contributions; zero up to rounding when the
/// printed operator coefficients are right.
double operator_form_discrepancy(const PartialWaveAmplitude& f, const ChannelSet& channels, double R,
                                 const Vec3& n);

}  // namespace nearfield
