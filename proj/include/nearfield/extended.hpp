#pragma once

#include <complex>

#include <boost/multiprecision/float128.hpp>

namespace nearfield {

/// 113-bit binary float used where angular integrals of the near-zone flux
/// cancel terms many orders of magnitude larger than the result.
using Extended = boost::multiprecision::float128;
using ExtendedComplex = std::complex<Extended>;

}  // namespace nearfield
