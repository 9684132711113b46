#include "nsmild/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nsmild/fft.hpp"

namespace nsmild {

HeatMultiplier::HeatMultiplier(const TorusGrid& g, double t) : axis_(g.n()), t_(t) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("heat multiplier: time must be >= 0, got " + std::to_string(t));
    }
    for (int i = 0; i < g.n(); ++i) {
        const double k = g.freq(i);
        axis_[i] = std::exp(-kLaplaceScale * k * k * t);
    }
}

SpectralVectorField leray_project(const SpectralVectorField& v) {
    constexpr double kKeep = 8.0 * std::numeric_limits<double>::epsilon();
    const auto& g = v.grid;
    const int n = g.n();
    SpectralVectorField out(g);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto idx = g.flat(i, j);
            if (g.is_nyquist(i) || g.is_nyquist(j)) continue;
            const double k1 = g.freq(i);
            const double k2 = g.freq(j);
            const Complex a = v.coeffs[0][idx];
            const Complex b = v.coeffs[1][idx];
            const double k2sum = k1 * k1 + k2 * k2;
            if (k2sum == 0.0) {
                out.coeffs[0][idx] = a;
                out.coeffs[1][idx] = b;
                continue;
            }
            const Complex div = k1 * a + k2 * b;
            const double scale = std::sqrt(k2sum) * std::sqrt(std::norm(a) + std::norm(b));
            if (std::abs(div.real()) <= kKeep * scale && std::abs(div.imag()) <= kKeep * scale) {
                out.coeffs[0][idx] = a;
                out.coeffs[1][idx] = b;
                continue;
            }
            // Project onto k_perp = (-k2, k1).
            const Complex psi = (-k2 * a + k1 * b) / k2sum;
            out.coeffs[0][idx] = -k2 * psi;
            out.coeffs[1][idx] = k1 * psi;
        }
    }
    out.divfree = true;
    return out;
}

SpectralVectorField heat_semigroup(double t, const SpectralVectorField& v) {
    const HeatMultiplier heat(v.grid, t);
    const int n = v.grid.n();
    SpectralVectorField out(v.grid);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto idx = v.grid.flat(i, j);
            const double h = heat(i, j);
            out.coeffs[0][idx] = h * v.coeffs[0][idx];
            out.coeffs[1][idx] = h * v.coeffs[1][idx];
        }
    }
    out.divfree = v.divfree;
    return out;
}

std::array<ComplexPlane, 4> tensor_to_spectral(const PhysicalTensorField& F) {
    std::array<ComplexPlane, 4> hat;
    const int n = F.grid.n();
    forward_pair(n, F.comp[0], F.comp[1], hat[0], hat[1]);
    forward_pair(n, F.comp[2], F.comp[3], hat[2], hat[3]);
    return hat;
}

SpectralVectorField divergence_of_tensor(const TorusGrid& g,
                                         const std::array<ComplexPlane, 4>& F_hat) {
    const int n = g.n();
    SpectralVectorField out(g);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (g.is_nyquist(i) || g.is_nyquist(j)) continue;
            const auto idx = g.flat(i, j);
            const Complex ik1(0.0, kTwoPi * g.freq(i));
            const Complex ik2(0.0, kTwoPi * g.freq(j));
            for (int m = 0; m < 2; ++m) {
                out.coeffs[m][idx] = ik1 * F_hat[2 * m][idx] + ik2 * F_hat[2 * m + 1][idx];
            }
        }
    }
    return out;
}

SpectralVectorField divergence_of_tensor(const PhysicalTensorField& F) {
    return divergence_of_tensor(F.grid, tensor_to_spectral(F));
}

bool inside_two_thirds(const TorusGrid& g, int i, int j) {
    const int cutoff = g.n() / 3;
    return std::abs(g.freq(i)) < cutoff && std::abs(g.freq(j)) < cutoff && !g.is_nyquist(i) &&
           !g.is_nyquist(j);
}

void truncate_two_thirds(SpectralVectorField& v) {
    const int n = v.grid.n();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (inside_two_thirds(v.grid, i, j)) continue;
            const auto idx = v.grid.flat(i, j);
            v.coeffs[0][idx] = Complex{};
            v.coeffs[1][idx] = Complex{};
        }
    }
}

void zero_nyquist(SpectralVectorField& v) {
    const auto& g = v.grid;
    const int n = g.n();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!g.is_nyquist(i) && !g.is_nyquist(j)) continue;
            const auto idx = g.flat(i, j);
            v.coeffs[0][idx] = Complex{};
            v.coeffs[1][idx] = Complex{};
        }
    }
}

namespace {

template <typename PointMagnitude>
double weighted_sum(const TorusGrid& g, PointMagnitude&& mag) {
    double sum = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) sum += mag(k);
    return sum * g.cell_measure();
}

template <typename PointMagnitude>
double grid_max(const TorusGrid& g, PointMagnitude&& mag) {
    double m = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) m = std::max(m, mag(k));
    return m;
}

double vec_sq(const PhysicalVectorField& f, std::size_t k) {
    return f.comp[0][k] * f.comp[0][k] + f.comp[1][k] * f.comp[1][k];
}

double ten_sq(const PhysicalTensorField& f, std::size_t k) {
    double s = 0.0;
    for (const auto& c : f.comp) s += c[k] * c[k];
    return s;
}

}  // namespace

double l1_norm(const ScalarField& f) {
    return weighted_sum(f.grid, [&](std::size_t k) { return std::abs(f.values[k]); });
}

double l2_norm(const ScalarField& f) {
    return std::sqrt(weighted_sum(f.grid, [&](std::size_t k) { return f.values[k] * f.values[k]; }));
}

double linf_norm(const ScalarField& f) {
    return grid_max(f.grid, [&](std::size_t k) { return std::abs(f.values[k]); });
}

double l1_norm(const PhysicalVectorField& f) {
    return weighted_sum(f.grid, [&](std::size_t k) { return std::sqrt(vec_sq(f, k)); });
}

double l2_norm(const PhysicalVectorField& f) {
    return std::sqrt(weighted_sum(f.grid, [&](std::size_t k) { return vec_sq(f, k); }));
}

double linf_norm(const PhysicalVectorField& f) {
    return std::sqrt(grid_max(f.grid, [&](std::size_t k) { return vec_sq(f, k); }));
}

double l1_norm(const PhysicalTensorField& f) {
    return weighted_sum(f.grid, [&](std::size_t k) { return std::sqrt(ten_sq(f, k)); });
}

double l2_norm(const PhysicalTensorField& f) {
    return std::sqrt(weighted_sum(f.grid, [&](std::size_t k) { return ten_sq(f, k); }));
}

double linf_norm(const PhysicalTensorField& f) {
    return std::sqrt(grid_max(f.grid, [&](std::size_t k) { return ten_sq(f, k); }));
}

ScalarField magnitude(const PhysicalVectorField& f) {
    ScalarField out(f.grid);
    for (std::size_t k = 0; k < f.grid.size(); ++k) out.values[k] = std::sqrt(vec_sq(f, k));
    return out;
}

}  // namespace nsmild
