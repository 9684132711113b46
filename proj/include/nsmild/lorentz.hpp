#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "nsmild/fields.hpp"

namespace nsmild {

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// Decreasing rearrangement f* of a grid function as a step function.
///
/// Segment i has value values[i] on (cumulative[i-1], cumulative[i]].
/// Cumulative measures are integer cell counts times 1/n^2.
struct RearrangementProfile {
    std::vector<double> values;
    std::vector<double> measures;
    std::vector<double> cumulative;

    std::size_t size() const noexcept { return values.size(); }
    /// sum v_i^2 mu_i
    double l2_squared() const;
};

/// Sort |f| descending and merge ties; each cell carries measure 1/n^2.
RearrangementProfile decreasing_rearrangement(const ScalarField& f);
/// Vector fields are rearranged through their pointwise Euclidean magnitude.
RearrangementProfile decreasing_rearrangement(const PhysicalVectorField& f);
/// Rearrangement of raw non-negative magnitudes with atom measure `cell`.
RearrangementProfile rearrange_magnitudes(std::vector<double> magnitudes, double cell);

/// Lorentz quasi-norm ||f||_{p,r}, exact for step functions.
///
/// r < inf:  ( sum_i v_i^r (p/r) (t_i^{r/p} - t_{i-1}^{r/p}) )^{1/r}
/// r = inf:  max_i t_i^{1/p} v_i
/// Throws std::invalid_argument for p < 1 or r < 1.
double lorentz_norm(const RearrangementProfile& profile, double p, double r);
double lorentz_norm(const ScalarField& f, double p, double r);
double lorentz_norm(const PhysicalVectorField& f, double p, double r);

/// (r1/2)^{(1/r1)(1 - r1/r2)}: bound on ||f||_{2,r2} / ||f||_{2,r1} for r1 < r2.
double lorentz_monotone_bound(double r1, double r2);

struct EmbeddingCheck {
    double ratio = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// ||f||_{2,2} / ||f||_{2,q} against (q/2)^{(1/q)(1 - q/2)}, q in (1, 2).
EmbeddingCheck embedding_ratio_check(const ScalarField& f, double q);
EmbeddingCheck embedding_ratio_check(const RearrangementProfile& profile, double q);

struct ProductCheck {
    double lhs = 0.0;         ///< ||w z||_1
    double rhs_factor = 0.0;  ///< ||w||_{2,1} ||z||_{2,inf}
    double ratio = 0.0;       ///< lhs / rhs_factor (0 when rhs_factor = 0)
    /// ||w z||_2^2 and (||w||_inf ||z||_2)^2 accumulated term by term so the
    /// comparison is exact in floating point.
    double product_l2_sq = 0.0;
    double linf_l2_sq = 0.0;
    bool linf_l2_holds = false;
};

ProductCheck product_l1_check(const ScalarField& w, const ScalarField& z);

/// Seeded test function sampled on the grid.  The underlying function is a
/// band-limited trigonometric polynomial g (|k| <= 6) passed through one of
/// g, exp(2g), 1{g > 0}, |g|^3 chosen by seed % 4, so the same seed gives the
/// same function at every resolution n >= 16.
ScalarField corpus_field(const TorusGrid& g, std::uint64_t seed);

}  // namespace nsmild
