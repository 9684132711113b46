#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nsmild/fft.hpp"
#include "nsmild/fields.hpp"
#include "nsmild/spectral.hpp"

namespace testing {

using namespace nsmild;

inline PhysicalVectorField random_vector(const TorusGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PhysicalVectorField f(g);
    for (auto& c : f.comp)
        for (auto& x : c) x = u(rng);
    return f;
}

inline PhysicalTensorField random_tensor(const TorusGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PhysicalTensorField F(g);
    for (auto& c : F.comp)
        for (auto& x : c) x = u(rng);
    return F;
}

inline ScalarField random_scalar(const TorusGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    ScalarField f(g);
    for (auto& x : f.values) x = nd(rng);
    return f;
}

// Direct O(n^4) Fourier sum, independent of the FFT backend.
inline ComplexPlane naive_forward(const TorusGrid& g, const RealPlane& f) {
    const int n = g.n();
    ComplexPlane out(g.size());
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Complex s{};
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double ph = -2.0 * M_PI * (double(a) * i + double(b) * j) / n;
                    s += f[g.flat(i, j)] * Complex(std::cos(ph), std::sin(ph));
                }
            out[g.flat(a, b)] = s / double(n * n);
        }
    return out;
}

inline double max_abs_diff(const ComplexPlane& a, const ComplexPlane& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double max_abs_diff(const RealPlane& a, const RealPlane& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double max_abs(const RealPlane& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

inline double x_of(const TorusGrid& g, int i) { return double(i) / g.n(); }

}  // namespace testing
