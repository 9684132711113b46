#include "nsmild/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nsmild {

ScalarField::ScalarField(const TorusGrid& g, RealPlane v) : grid(g), values(std::move(v)) {
    if (values.size() != g.size()) {
        throw std::invalid_argument("ScalarField: value count does not match grid");
    }
}

SpectralVectorField& SpectralVectorField::operator+=(const SpectralVectorField& o) {
    require_same_grid(grid, o.grid, "SpectralVectorField::operator+=");
    for (int m = 0; m < 2; ++m) {
        for (std::size_t k = 0; k < coeffs[m].size(); ++k) coeffs[m][k] += o.coeffs[m][k];
    }
    divfree = divfree && o.divfree;
    return *this;
}

SpectralVectorField& SpectralVectorField::operator-=(const SpectralVectorField& o) {
    require_same_grid(grid, o.grid, "SpectralVectorField::operator-=");
    for (int m = 0; m < 2; ++m) {
        for (std::size_t k = 0; k < coeffs[m].size(); ++k) coeffs[m][k] -= o.coeffs[m][k];
    }
    divfree = divfree && o.divfree;
    return *this;
}

SpectralVectorField& SpectralVectorField::operator*=(double s) {
    for (auto& plane : coeffs) {
        for (auto& c : plane) c *= s;
    }
    return *this;
}

SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) {
    a += b;
    return a;
}

SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) {
    a -= b;
    return a;
}

SpectralVectorField operator*(double s, SpectralVectorField a) {
    a *= s;
    return a;
}

double coefficient_norm(const SpectralVectorField& v) {
    double sum = 0.0;
    for (const auto& plane : v.coeffs) {
        for (const auto& c : plane) sum += std::norm(c);
    }
    return std::sqrt(sum);
}

double divergence_residual(const SpectralVectorField& v) {
    const auto& g = v.grid;
    const int n = g.n();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        if (g.is_nyquist(i)) continue;
        for (int j = 0; j < n; ++j) {
            if (g.is_nyquist(j)) continue;
            const auto idx = g.flat(i, j);
            const Complex d = double(g.freq(i)) * v.coeffs[0][idx] +
                              double(g.freq(j)) * v.coeffs[1][idx];
            worst = std::max(worst, std::abs(d));
        }
    }
    return worst;
}

double hermitian_defect(const SpectralVectorField& v) {
    const auto& g = v.grid;
    const int n = g.n();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        if (g.is_nyquist(i)) continue;
        for (int j = 0; j < n; ++j) {
            if (g.is_nyquist(j)) continue;
            const auto a = g.flat(i, j);
            const auto b = g.conjugate_flat(i, j);
            for (int m = 0; m < 2; ++m) {
                worst = std::max(worst, std::abs(v.coeffs[m][b] - std::conj(v.coeffs[m][a])));
            }
        }
    }
    return worst;
}

bool all_finite(const RealPlane& p) {
    return std::all_of(p.begin(), p.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace nsmild
