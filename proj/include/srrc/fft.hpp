#pragma once

#include <complex>
#include <vector>

namespace srrc {

using cdouble = std::complex<double>;

/// Forward DFT, unnormalized sum convention:
///   X_f = sum_t x_t exp(-2*pi*i*f*t/L).
/// Radix-2 for power-of-two lengths, Bluestein chirp-z otherwise.
std::vector<cdouble> dft(const std::vector<cdouble>& x);

/// Inverse DFT carrying the 1/L factor:
///   x_t = (1/L) sum_f X_f exp(+2*pi*i*f*t/L).
std::vector<cdouble> idft(const std::vector<cdouble>& X);

} // namespace srrc
