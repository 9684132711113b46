#pragma once

#include "nsmild/fields.hpp"

namespace nsmild {

/// Complex 2D DFT on an n x n plane (out-of-place).
///
/// Forward carries the 1/n^2 factor, so a constant c maps to coefficient c at
/// k = 0 and the inverse is the plain Fourier sum.  Plans are cached per size
/// behind a mutex and executed through FFTW's new-array interface, which is
/// safe to call concurrently on distinct buffers.
void fft_forward(int n, const Complex* in, Complex* out);
void fft_inverse(int n, const Complex* in, Complex* out);

SpectralVectorField to_spectral(const PhysicalVectorField& f);
PhysicalVectorField to_physical(const SpectralVectorField& v);

/// Spectral transforms for a single real scalar plane.
ComplexPlane to_spectral(const ScalarField& f);
ScalarField to_physical(const TorusGrid& g, const ComplexPlane& coeffs);

/// Transform two real planes with one complex FFT.
void forward_pair(int n, const RealPlane& a, const RealPlane& b, ComplexPlane& a_hat,
                  ComplexPlane& b_hat);
/// Inverse of two Hermitian spectra with one complex FFT (imaginary parts of
/// the individual results are discarded).
void inverse_pair(int n, const ComplexPlane& a_hat, const ComplexPlane& b_hat, RealPlane& a,
                  RealPlane& b);

}  // namespace nsmild
