#include "nsmild/oseen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nsmild/errors.hpp"
#include "nsmild/fft.hpp"
#include "nsmild/parallel.hpp"

namespace nsmild {
namespace {

void require_positive_time(double t, const char* where) {
    if (!(t > 0.0)) {
        throw std::invalid_argument(std::string(where) + ": t must be > 0, got " +
                                    std::to_string(t));
    }
}

struct SliceId {
    int m, j, l;
};

// The six distinct slices up to the (m, j) symmetry of the projector, paired
// for packed inverse transforms so that both members have comparable size
// (K_001 and K_110 carry the k = (1, 0) and (0, 1) modes; the others start at
// |k|^2 = 2).  Mixing scales would put the larger slice's rounding into the
// smaller one.
struct SlicePair {
    SliceId a, b;
};
constexpr SlicePair kPairs[3] = {
    {{0, 0, 1}, {1, 1, 0}},
    {{0, 0, 0}, {0, 1, 0}},
    {{0, 1, 1}, {1, 1, 1}},
};

// Off-diagonal (m != j) slices stand for two entries of the tensor.
double slice_weight(const SliceId& s) { return s.m == s.j ? 1.0 : 2.0; }

// Inverse transform of M_a + i M_b; the real part is slice a, the imaginary
// part slice b (both multipliers are purely imaginary and odd in k).
ComplexPlane packed_slice_pair(const TorusGrid& g, const HeatMultiplier& heat, const SlicePair& p) {
    const int n = g.n();
    ComplexPlane spec(g.size());
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            const Complex a = oseen_multiplier(g, heat, i1, i2, p.a.m, p.a.j, p.a.l);
            const Complex b = oseen_multiplier(g, heat, i1, i2, p.b.m, p.b.j, p.b.l);
            spec[g.flat(i1, i2)] = a + Complex(-b.imag(), b.real());
        }
    }
    ComplexPlane phys(g.size());
    fft_inverse(n, spec.data(), phys.data());
    return phys;
}

}  // namespace

Complex oseen_multiplier(const TorusGrid& g, const HeatMultiplier& heat, int i1, int i2, int m,
                         int j, int l) {
    if (g.is_nyquist(i1) || g.is_nyquist(i2)) return {};
    const double k[2] = {double(g.freq(i1)), double(g.freq(i2))};
    const double k2sum = k[0] * k[0] + k[1] * k[1];
    if (k2sum == 0.0) return {};
    const double proj = (m == j ? 1.0 : 0.0) - k[m] * k[j] / k2sum;
    return Complex(0.0, heat(i1, i2) * proj * kTwoPi * k[l]);
}

bool kernel_truncated(const TorusGrid& g, double t) {
    const double kmax = g.n() / 2.0;
    return std::exp(-kLaplaceScale * kmax * kmax * t) >= 1e-16;
}

OseenKernel assemble_oseen_kernel(double t, const TorusGrid& g) {
    require_positive_time(t, "assemble_oseen_kernel");
    const HeatMultiplier heat(g, t);
    OseenKernel K{t, g, {}, kernel_truncated(g, t)};
    auto store = [&K](const SliceId& id, const RealPlane& plane) {
        K.slices[OseenKernel::slice_index(id.m, id.j, id.l)] = plane;
        if (id.m != id.j) K.slices[OseenKernel::slice_index(id.j, id.m, id.l)] = plane;
    };
    for (const auto& p : kPairs) {
        const ComplexPlane phys = packed_slice_pair(g, heat, p);
        RealPlane re(g.size()), im(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            re[k] = phys[k].real();
            im[k] = phys[k].imag();
        }
        store(p.a, re);
        store(p.b, im);
    }
    return K;
}

ScalarField kernel_magnitude(const OseenKernel& K) {
    ScalarField out(K.grid);
    for (std::size_t k = 0; k < K.grid.size(); ++k) {
        double s = 0.0;
        for (const auto& slice : K.slices) s += slice[k] * slice[k];
        out.values[k] = std::sqrt(s);
    }
    return out;
}

KernelNorms kernel_norms(double t, const TorusGrid& g) {
    require_positive_time(t, "kernel_norms");
    const HeatMultiplier heat(g, t);
    RealPlane mag2(g.size(), 0.0);
    for (const auto& p : kPairs) {
        const ComplexPlane phys = packed_slice_pair(g, heat, p);
        const double wa = slice_weight(p.a), wb = slice_weight(p.b);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double re = phys[k].real(), im = phys[k].imag();
            mag2[k] += wa * re * re + wb * im * im;
        }
    }
    KernelNorms out;
    double sum = 0.0;
    double peak = 0.0;
    for (double v : mag2) {
        sum += std::sqrt(v);
        peak = std::max(peak, v);
    }
    out.l1 = sum * g.cell_measure();
    out.linf = std::sqrt(peak);
    return out;
}

SpectralVectorField apply_oseen(double t, const PhysicalTensorField& F) {
    require_positive_time(t, "apply_oseen");
    const auto& g = F.grid;
    const HeatMultiplier heat(g, t);
    const auto F_hat = tensor_to_spectral(F);
    SpectralVectorField out(g);
    const int n = g.n();
    for (int i1 = 0; i1 < n; ++i1) {
        for (int i2 = 0; i2 < n; ++i2) {
            const auto idx = g.flat(i1, i2);
            for (int m = 0; m < 2; ++m) {
                Complex acc{};
                for (int j = 0; j < 2; ++j) {
                    for (int l = 0; l < 2; ++l) {
                        acc += oseen_multiplier(g, heat, i1, i2, m, j, l) * F_hat[2 * j + l][idx];
                    }
                }
                out.coeffs[m][idx] = acc;
            }
        }
    }
    out.divfree = true;
    return out;
}

std::size_t KernelNormProfile::converged_count() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.converged; }));
}

KernelNormProfile kernel_norm_profile(const std::vector<double>& t_list,
                                      const ResolutionPolicy& policy, int threads) {
    for (std::size_t i = 0; i < t_list.size(); ++i) {
        require_positive_time(t_list[i], "kernel_norm_profile");
        if (i > 0 && !(t_list[i] > t_list[i - 1])) {
            throw std::invalid_argument("kernel_norm_profile: t values must be strictly increasing");
        }
    }
    if (policy.resolutions.empty()) {
        throw std::invalid_argument("kernel_norm_profile: no resolutions given");
    }
    KernelNormProfile profile;
    profile.resolutions = policy.resolutions;
    profile.rel_tol = policy.rel_tol;
    profile.entries.resize(t_list.size());

    parallel_for(t_list.size(), threads, [&](std::size_t idx) {
        const double t = t_list[idx];
        KernelNormEntry e;
        e.t = t;
        bool have_prev = false;
        double prev_l1 = 0.0;
        for (int n : policy.resolutions) {
            const bool last = n == policy.resolutions.back();
            if (n * std::sqrt(t) < policy.min_points_per_width && !last) continue;
            const TorusGrid g(n);
            const KernelNorms norms = kernel_norms(t, g);
            e.n = n;
            e.l1 = norms.l1;
            e.linf = norms.linf;
            e.truncated = kernel_truncated(g, t);
            if (have_prev) {
                e.rel_change = std::abs(norms.l1 - prev_l1) / norms.l1;
                if (e.rel_change <= policy.rel_tol) {
                    e.converged = true;
                    break;
                }
            }
            have_prev = true;
            prev_l1 = norms.l1;
        }
        e.sqrt_t_l1 = std::sqrt(t) * e.l1;
        e.t32_linf = t * std::sqrt(t) * e.linf;
        profile.entries[idx] = e;
    });
    return profile;
}

KernelConstant estimate_kernel_constant(const KernelNormProfile& profile) {
    KernelConstant c;
    c.provenance = "estimated";
    for (const auto& e : profile.entries) {
        if (!e.converged) continue;
        ++c.entries_used;
        if (e.sqrt_t_l1 > c.value) {
            c.value = e.sqrt_t_l1;
            c.t_at_max = e.t;
            c.n_at_max = e.n;
        }
    }
    if (c.entries_used == 0) {
        throw ConvergenceError("estimate_kernel_constant: no kernel norm entry converged");
    }
    return c;
}

KernelConstant estimate_kernel_constant(const std::vector<double>& t_grid,
                                        const ResolutionPolicy& policy, int threads) {
    for (double t : t_grid) {
        if (!(t > 0.0 && t <= 1.0)) {
            throw std::invalid_argument("estimate_kernel_constant: t range must lie in (0, 1]");
        }
    }
    return estimate_kernel_constant(kernel_norm_profile(t_grid, policy, threads));
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi >= lo) || count < 1) {
        throw std::invalid_argument("log_spaced: need 0 < lo <= hi and count >= 1");
    }
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace nsmild
