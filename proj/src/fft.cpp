#include "nsmild/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace nsmild {
namespace {

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        // FFTW_ESTIMATE never touches the arrays and always yields the same
        // plan, so results are reproducible run to run.
        auto* in = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
        auto* out = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
        fftw_plan plan = fftw_plan_dft_2d(n, n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void execute(int n, int sign, const Complex* in, Complex* out) {
    fftw_plan plan = plan_cache().get(n, sign);
    // The new-array interface is const-incorrect; the input is not modified
    // for out-of-place plans.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void fft_forward(int n, const Complex* in, Complex* out) {
    execute(n, FFTW_FORWARD, in, out);
    const double scale = 1.0 / (static_cast<double>(n) * n);
    const std::size_t total = static_cast<std::size_t>(n) * n;
    for (std::size_t k = 0; k < total; ++k) out[k] *= scale;
}

void fft_inverse(int n, const Complex* in, Complex* out) { execute(n, FFTW_BACKWARD, in, out); }

void forward_pair(int n, const RealPlane& a, const RealPlane& b, ComplexPlane& a_hat,
                  ComplexPlane& b_hat) {
    const TorusGrid g(n);
    ComplexPlane packed(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) packed[k] = Complex(a[k], b[k]);
    ComplexPlane z(g.size());
    fft_forward(n, packed.data(), z.data());
    a_hat.assign(g.size(), Complex{});
    b_hat.assign(g.size(), Complex{});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto k = g.flat(i, j);
            const Complex zc = std::conj(z[g.conjugate_flat(i, j)]);
            a_hat[k] = 0.5 * (z[k] + zc);
            b_hat[k] = Complex(0.0, -0.5) * (z[k] - zc);
        }
    }
}

void inverse_pair(int n, const ComplexPlane& a_hat, const ComplexPlane& b_hat, RealPlane& a,
                  RealPlane& b) {
    const std::size_t total = static_cast<std::size_t>(n) * n;
    ComplexPlane packed(total);
    for (std::size_t k = 0; k < total; ++k) {
        packed[k] = a_hat[k] + Complex(-b_hat[k].imag(), b_hat[k].real());
    }
    ComplexPlane z(total);
    fft_inverse(n, packed.data(), z.data());
    a.resize(total);
    b.resize(total);
    for (std::size_t k = 0; k < total; ++k) {
        a[k] = z[k].real();
        b[k] = z[k].imag();
    }
}

SpectralVectorField to_spectral(const PhysicalVectorField& f) {
    SpectralVectorField out(f.grid);
    forward_pair(f.grid.n(), f.comp[0], f.comp[1], out.coeffs[0], out.coeffs[1]);
    return out;
}

PhysicalVectorField to_physical(const SpectralVectorField& v) {
    PhysicalVectorField out(v.grid);
    inverse_pair(v.grid.n(), v.coeffs[0], v.coeffs[1], out.comp[0], out.comp[1]);
    return out;
}

ComplexPlane to_spectral(const ScalarField& f) {
    const int n = f.grid.n();
    ComplexPlane in(f.grid.size());
    for (std::size_t k = 0; k < in.size(); ++k) in[k] = f.values[k];
    ComplexPlane out(f.grid.size());
    fft_forward(n, in.data(), out.data());
    return out;
}

ScalarField to_physical(const TorusGrid& g, const ComplexPlane& coeffs) {
    ComplexPlane z(g.size());
    fft_inverse(g.n(), coeffs.data(), z.data());
    ScalarField out(g);
    for (std::size_t k = 0; k < z.size(); ++k) out.values[k] = z[k].real();
    return out;
}

}  // namespace nsmild
