#pragma once

#include <array>
#include <string>
#include <vector>

#include "nsmild/fields.hpp"
#include "nsmild/spectral.hpp"

namespace nsmild {

/// Physical-space kernel of e^{t Delta} P div at a fixed time t.
///
/// Slice (m, j, l) is the inverse transform of
///   e^{-4 pi^2 |k|^2 t} (delta_mj - k_m k_j / |k|^2) (2 pi i k_l),
/// set to zero at k = 0 and on Nyquist modes.  The multiplier is odd and
/// purely imaginary, so every slice is real, odd and mean-free.
struct OseenKernel {
    double t;
    TorusGrid grid;
    std::array<RealPlane, 8> slices;
    /// Set when e^{-4 pi^2 (n/2)^2 t} >= 1e-16, i.e. the grid truncates the
    /// multiplier noticeably.
    bool truncated = false;

    static constexpr int slice_index(int m, int j, int l) { return 4 * m + 2 * j + l; }
    const RealPlane& slice(int m, int j, int l) const { return slices[slice_index(m, j, l)]; }
};

/// Fourier multiplier of slice (m, j, l) at FFT index (i1, i2).
Complex oseen_multiplier(const TorusGrid& g, const HeatMultiplier& heat, int i1, int i2, int m,
                         int j, int l);

bool kernel_truncated(const TorusGrid& g, double t);

OseenKernel assemble_oseen_kernel(double t, const TorusGrid& g);

/// Frobenius-magnitude field |K(t, x)| of an assembled kernel.
ScalarField kernel_magnitude(const OseenKernel& K);

struct KernelNorms {
    double l1 = 0.0;
    double linf = 0.0;
};

/// ||K(t)||_1 and ||K(t)||_inf on grid g without materialising all slices.
KernelNorms kernel_norms(double t, const TorusGrid& g);

/// e^{t Delta} P div F, evaluated by contracting the tensor multiplier with F.
SpectralVectorField apply_oseen(double t, const PhysicalTensorField& F);

struct KernelNormEntry {
    double t = 0.0;
    int n = 0;
    double l1 = 0.0;
    double linf = 0.0;
    double sqrt_t_l1 = 0.0;
    double t32_linf = 0.0;
    bool converged = false;
    /// |l1(n) - l1(n/2)| / l1(n) for the reported pair (1.0 if never paired).
    double rel_change = 1.0;
    bool truncated = false;
};

struct ResolutionPolicy {
    /// Ascending dyadic resolutions tried in order.
    std::vector<int> resolutions{64, 128, 256, 512, 1024, 2048};
    /// Successive resolutions must agree on ||K||_1 to this relative level.
    double rel_tol = 1e-6;
    /// Resolutions with n * sqrt(t) below this are skipped as unresolved.
    double min_points_per_width = 4.0;
};

struct KernelNormProfile {
    std::vector<KernelNormEntry> entries;
    std::vector<int> resolutions;
    double rel_tol = 1e-6;

    std::size_t converged_count() const;
};

/// For each t, refines through policy.resolutions until two successive
/// resolutions agree on the L1 norm; reports the finer of the pair.  Entries
/// that never converge carry converged = false and the finest values seen.
KernelNormProfile kernel_norm_profile(const std::vector<double>& t_list,
                                      const ResolutionPolicy& policy = {}, int threads = 1);

struct KernelConstant {
    double value = 0.0;
    double t_at_max = 0.0;
    int n_at_max = 0;
    std::size_t entries_used = 0;
    std::string provenance;
};

/// max sqrt(t) ||K(t)||_1 over the converged entries of a profile.  Throws
/// ConvergenceError if no entry converged.
KernelConstant estimate_kernel_constant(const KernelNormProfile& profile);
KernelConstant estimate_kernel_constant(const std::vector<double>& t_grid,
                                        const ResolutionPolicy& policy = {}, int threads = 1);

/// `count` log-spaced points covering [lo, hi] inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace nsmild
