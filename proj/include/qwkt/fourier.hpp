#pragma once

// Discrete Fourier machinery on half-offset, zero-centered grids.
//
// With ω_j = (j - c)·dω, T_k = (k - c)·dT, c = (n-1)/2 and dω·dT·n = 2π the
// midpoint sums
//   F_j = (dT/2π) Σ_k R_k e^{+iω_j T_k}      R_k = dω Σ_j F_j e^{-iω_j T_k}
// are exact inverses of each other. Both reduce to an FFT between a pre- and
// a post-twiddle; the twiddle phases are reduced modulo 2π in integer
// arithmetic so they stay exact for large n.

#include <complex>
#include <span>
#include <vector>

namespace qwkt::fourier {

using Complex = std::complex<double>;

/// Unnormalized DFT, X_m = Σ_k x_k e^{sign·2πi·km/n}, sign = -1 or +1.
std::vector<Complex> dft(std::span<const Complex> x, int sign);

/// (dT/2π) Σ_k R_k e^{+iω_j T_k} on the centered grids.
std::vector<Complex> centered_forward(std::span<const Complex> r, double dt);

/// dω Σ_j F_j e^{-iω_j T_k} on the centered grids.
std::vector<Complex> centered_inverse(std::span<const Complex> f, double domega);

}  // namespace qwkt::fourier
