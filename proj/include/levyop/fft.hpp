#pragma once

#include <complex>
#include <span>

namespace levyop {

using cplx = std::complex<double>;

/// Unnormalized forward DFT (exponent -2 pi i j k / N) on an N^n array,
/// axis 0 slowest.  `in` and `out` may alias.
void dft_forward(int n, int points, std::span<const cplx> in, std::span<cplx> out);
/// Inverse DFT including the 1/N^n factor.
void dft_inverse(int n, int points, std::span<const cplx> in, std::span<cplx> out);

}  // namespace levyop
