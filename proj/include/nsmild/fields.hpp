#pragma once

#include <array>
#include <complex>
#include <vector>

#include "nsmild/grid.hpp"

namespace nsmild {

using Complex = std::complex<double>;
using RealPlane = std::vector<double>;
using ComplexPlane = std::vector<Complex>;

struct ScalarField {
    TorusGrid grid;
    RealPlane values;

    explicit ScalarField(const TorusGrid& g) : grid(g), values(g.size(), 0.0) {}
    ScalarField(const TorusGrid& g, RealPlane v);

    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }
};

struct PhysicalVectorField {
    TorusGrid grid;
    std::array<RealPlane, 2> comp;

    explicit PhysicalVectorField(const TorusGrid& g)
        : grid(g), comp{RealPlane(g.size(), 0.0), RealPlane(g.size(), 0.0)} {}
};

/// 2x2 matrix field; component (m, l) is stored at comp[2*m + l].
struct PhysicalTensorField {
    TorusGrid grid;
    std::array<RealPlane, 4> comp;

    explicit PhysicalTensorField(const TorusGrid& g)
        : grid(g),
          comp{RealPlane(g.size(), 0.0), RealPlane(g.size(), 0.0), RealPlane(g.size(), 0.0),
               RealPlane(g.size(), 0.0)} {}

    RealPlane& at(int m, int l) { return comp[2 * m + l]; }
    const RealPlane& at(int m, int l) const { return comp[2 * m + l]; }
};

/// Fourier-series coefficients of a real vector field, FFT order.
///
/// `divfree` is a tag set by operations that guarantee a solenoidal result
/// (Leray projection and anything built on it); it is not re-verified on
/// every access.  Use `divergence_residual` to check it.
struct SpectralVectorField {
    TorusGrid grid;
    std::array<ComplexPlane, 2> coeffs;
    bool divfree = false;

    explicit SpectralVectorField(const TorusGrid& g)
        : grid(g), coeffs{ComplexPlane(g.size()), ComplexPlane(g.size())} {}

    SpectralVectorField& operator+=(const SpectralVectorField& o);
    SpectralVectorField& operator-=(const SpectralVectorField& o);
    SpectralVectorField& operator*=(double s);
};

SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b);
SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b);
SpectralVectorField operator*(double s, SpectralVectorField a);

/// sqrt(sum_k |v(k)|^2), i.e. the L2 norm by Parseval.
double coefficient_norm(const SpectralVectorField& v);

/// max_k |k . v(k)| over the non-Nyquist lattice.
double divergence_residual(const SpectralVectorField& v);

/// Largest |v(-k) - conj(v(k))| over pairs that both lie in the frequency set.
double hermitian_defect(const SpectralVectorField& v);

/// All entries finite.
bool all_finite(const RealPlane& p);

}  // namespace nsmild
