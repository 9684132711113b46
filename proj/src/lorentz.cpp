#include "nsmild/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include "nsmild/fft.hpp"
#include "nsmild/spectral.hpp"

namespace nsmild {
namespace {

// t1^a - t0^a without cancellation when the segment is short relative to t0.
double power_increment(double t0, double t1, double a) {
    if (t0 <= 0.0) return std::pow(t1, a);
    return std::pow(t0, a) * std::expm1(a * std::log1p((t1 - t0) / t0));
}

}  // namespace

double RearrangementProfile::l2_squared() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * values[i] * measures[i];
    return s;
}

RearrangementProfile rearrange_magnitudes(std::vector<double> magnitudes, double cell) {
    for (auto& m : magnitudes) m = std::abs(m);
    std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());
    RearrangementProfile out;
    std::size_t seen = 0;
    std::size_t i = 0;
    while (i < magnitudes.size()) {
        std::size_t j = i;
        while (j < magnitudes.size() && magnitudes[j] == magnitudes[i]) ++j;
        const std::size_t count = j - i;
        seen += count;
        out.values.push_back(magnitudes[i]);
        out.measures.push_back(static_cast<double>(count) * cell);
        out.cumulative.push_back(static_cast<double>(seen) * cell);
        i = j;
    }
    return out;
}

RearrangementProfile decreasing_rearrangement(const ScalarField& f) {
    return rearrange_magnitudes(f.values, f.grid.cell_measure());
}

RearrangementProfile decreasing_rearrangement(const PhysicalVectorField& f) {
    return rearrange_magnitudes(magnitude(f).values, f.grid.cell_measure());
}

double lorentz_norm(const RearrangementProfile& profile, double p, double r) {
    if (!(p >= 1.0) || std::isinf(p)) {
        throw std::invalid_argument("lorentz_norm: p must lie in [1, inf), got " + std::to_string(p));
    }
    if (!(r >= 1.0)) {
        throw std::invalid_argument("lorentz_norm: r must lie in [1, inf], got " + std::to_string(r));
    }
    const auto& v = profile.values;
    const auto& t = profile.cumulative;
    if (std::isinf(r)) {
        double best = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) best = std::max(best, std::pow(t[i], 1.0 / p) * v[i]);
        return best;
    }
    double sum = 0.0;
    if (r == p) {
        for (std::size_t i = 0; i < v.size(); ++i) sum += std::pow(v[i], r) * profile.measures[i];
        return std::pow(sum, 1.0 / r);
    }
    const double a = r / p;
    double prev = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > 0.0) sum += std::pow(v[i], r) * (p / r) * power_increment(prev, t[i], a);
        prev = t[i];
    }
    return std::pow(sum, 1.0 / r);
}

double lorentz_norm(const ScalarField& f, double p, double r) {
    return lorentz_norm(decreasing_rearrangement(f), p, r);
}

double lorentz_norm(const PhysicalVectorField& f, double p, double r) {
    return lorentz_norm(decreasing_rearrangement(f), p, r);
}

double lorentz_monotone_bound(double r1, double r2) {
    if (!(r1 >= 1.0 && r2 > r1)) {
        throw std::invalid_argument("lorentz_monotone_bound: need 1 <= r1 < r2");
    }
    const double exponent = std::isinf(r2) ? 1.0 / r1 : (1.0 / r1) * (1.0 - r1 / r2);
    return std::pow(r1 / 2.0, exponent);
}

EmbeddingCheck embedding_ratio_check(const RearrangementProfile& profile, double q) {
    if (!(q > 1.0 && q < 2.0)) {
        throw std::invalid_argument("embedding_ratio_check: q must lie in (1, 2)");
    }
    EmbeddingCheck c;
    c.bound = lorentz_monotone_bound(q, 2.0);
    const double denom = lorentz_norm(profile, 2.0, q);
    c.ratio = denom > 0.0 ? lorentz_norm(profile, 2.0, 2.0) / denom : 0.0;
    c.pass = c.ratio <= c.bound * (1.0 + 1e-10);
    return c;
}

EmbeddingCheck embedding_ratio_check(const ScalarField& f, double q) {
    return embedding_ratio_check(decreasing_rearrangement(f), q);
}

ProductCheck product_l1_check(const ScalarField& w, const ScalarField& z) {
    require_same_grid(w.grid, z.grid, "product_l1_check");
    const auto& g = w.grid;
    ProductCheck c;
    const double w_sup = linf_norm(w);
    double l1 = 0.0;
    double prod_sq = 0.0;
    double bound_sq = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double wz = std::abs(w.values[k] * z.values[k]);
        const double mz = std::abs(w_sup * z.values[k]);
        l1 += wz;
        prod_sq += wz * wz;
        bound_sq += mz * mz;
    }
    c.lhs = l1 * g.cell_measure();
    c.product_l2_sq = prod_sq * g.cell_measure();
    c.linf_l2_sq = bound_sq * g.cell_measure();
    c.linf_l2_holds = c.product_l2_sq <= c.linf_l2_sq;
    c.rhs_factor = lorentz_norm(w, 2.0, 1.0) * lorentz_norm(z, 2.0, kInfExponent);
    c.ratio = c.rhs_factor > 0.0 ? c.lhs / c.rhs_factor : 0.0;
    return c;
}

ScalarField corpus_field(const TorusGrid& g, std::uint64_t seed) {
    constexpr int kBand = 6;
    if (g.n() < 16) throw std::invalid_argument("corpus_field: needs n >= 16");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.5, 2.5);
    const double decay = uniform(rng);
    ComplexPlane coeffs(g.size());
    for (int k1 = 0; k1 <= kBand; ++k1) {
        for (int k2 = -kBand; k2 <= kBand; ++k2) {
            if (k1 == 0 && k2 < 0) continue;
            const double re = normal(rng), im = normal(rng);
            const double amp = std::pow(1.0 + k1 * k1 + k2 * k2, -0.5 * decay);
            const auto i = g.index_of(k1), j = g.index_of(k2);
            if (k1 == 0 && k2 == 0) {
                coeffs[g.flat(i, j)] = Complex(amp * re, 0.0);
                continue;
            }
            const Complex c = amp * Complex(re, im);
            coeffs[g.flat(i, j)] = c;
            coeffs[g.conjugate_flat(i, j)] = std::conj(c);
        }
    }
    ScalarField f = to_physical(g, coeffs);
    switch (seed % 4) {
        case 1:
            for (auto& v : f.values) v = std::exp(2.0 * v);
            break;
        case 2:
            for (auto& v : f.values) v = v > 0.0 ? 1.0 : 0.0;
            break;
        case 3:
            for (auto& v : f.values) v = std::pow(std::abs(v), 3.0);
            break;
        default: break;
    }
    return f;
}

}  // namespace nsmild
