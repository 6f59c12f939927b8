#pragma once

#include "nearfield/special_functions.hpp"
#include "nearfield/vec3.hpp"

namespace nearfield {

enum class WaveSign { outgoing, incoming };

/// Free Green function e^{+-ik|R-x|} / (4 pi |R-x|) evaluated for an
/// observation point R and a source point x.
struct GreensQuery {
  double k = 1.0;
  Vec3 observation;  ///< R
  Vec3 source;       ///< x
  WaveSign sign = WaveSign::outgoing;
};

/// Direct evaluation. Throws std::domain_error for coincident points.
Complex greens_point(const GreensQuery& q);

/// Multipole cutoff: ceil(e k r) + 15, past which psi_l(kr) has decayed, raised
/// so that (r/R)^l falls below 1e-16.
int auto_l_max(const GreensQuery& q);

/// The l-th multipole: chi_l(-+ikR)/(4 pi R) (4 pi/kr) i^{-+l} psi_l(kr) sum_m Y_l^m(n) conj(Y_l^m(s)).
Complex greens_multipole_term(const GreensQuery& q, int l);

/// Multipole sum through l_max (auto_l_max when negative).
/// Throws std::domain_error unless |x| < |R|.
Complex greens_multipole(const GreensQuery& q, int l_max = -1);

/// Inverse-distance series: e^{+-ikR}/(4 pi R) {1 + sum_{S=1}^{S_max} prod[L - mu(mu-1)]/(S!(-+2ikR)^S)}
/// applied to the plane wave e^{-+ik n.x}, expanded in Y_l^m through l_max.
Complex greens_asymptotic(const GreensQuery& q, int S_max, int l_max = -1);

}  // namespace nearfield
