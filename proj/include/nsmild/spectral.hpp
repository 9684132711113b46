#pragma once

#include <vector>

#include "nsmild/fields.hpp"

namespace nsmild {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
/// Laplacian symbol is -kLaplaceScale * |k|^2 on R^2/Z^2.
inline constexpr double kLaplaceScale = 4.0 * kPi * kPi;

/// Separable table of e^{-4 pi^2 k^2 t} along one axis.
///
/// The 2D heat factor at (i, j) is axis(i) * axis(j).  Every heat-type
/// multiplier in the library goes through this class so that identical
/// (t, k) produce identical bits.
class HeatMultiplier {
public:
    HeatMultiplier(const TorusGrid& g, double t);

    double operator()(int i, int j) const noexcept { return axis_[i] * axis_[j]; }
    double time() const noexcept { return t_; }

private:
    std::vector<double> axis_;
    double t_;
};

/// (I - k k^T / |k|^2) applied mode by mode; k = 0 passes through and Nyquist
/// modes are zeroed.  Modes whose divergence is already at rounding level are
/// left bit-for-bit unchanged, which makes the projection exactly idempotent.
SpectralVectorField leray_project(const SpectralVectorField& v);

/// e^{t Delta}: multiply each coefficient by e^{-4 pi^2 |k|^2 t}.  Throws
/// std::invalid_argument for t < 0.
SpectralVectorField heat_semigroup(double t, const SpectralVectorField& v);

/// Component m has coefficient sum_l 2 pi i k_l F_ml(k); Nyquist zeroed.
SpectralVectorField divergence_of_tensor(const PhysicalTensorField& F);
SpectralVectorField divergence_of_tensor(const TorusGrid& g,
                                         const std::array<ComplexPlane, 4>& F_hat);

/// Forward transforms of the four tensor components, index 2*m + l.
std::array<ComplexPlane, 4> tensor_to_spectral(const PhysicalTensorField& F);

/// Zero every mode with max(|k1|, |k2|) >= n/3 (2/3 rule) plus Nyquist.
void truncate_two_thirds(SpectralVectorField& v);
bool inside_two_thirds(const TorusGrid& g, int i, int j);
void zero_nyquist(SpectralVectorField& v);

// Grid-quadrature norms on the unit torus.  Vector fields use the pointwise
// Euclidean magnitude, tensors the pointwise Frobenius magnitude.
double l1_norm(const ScalarField& f);
double l2_norm(const ScalarField& f);
double linf_norm(const ScalarField& f);
double l1_norm(const PhysicalVectorField& f);
double l2_norm(const PhysicalVectorField& f);
double linf_norm(const PhysicalVectorField& f);
double l1_norm(const PhysicalTensorField& f);
double l2_norm(const PhysicalTensorField& f);
double linf_norm(const PhysicalTensorField& f);

/// Pointwise |v(x)|.
ScalarField magnitude(const PhysicalVectorField& f);

}  // namespace nsmild
