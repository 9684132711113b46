#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nsmild/diagnostics.hpp"
#include "nsmild/errors.hpp"
#include "nsmild/oseen.hpp"
#include "support.hpp"

using namespace nsmild;
using namespace testing;

namespace {

SolverConfig small_config(double dt = 2e-4) {
    SolverConfig c;
    c.n = 32;
    c.dt = dt;
    return c;
}

SpectralVectorField constant_field(const TorusGrid& g, double c0, double c1) {
    SpectralVectorField v(g);
    v.coeffs[0][0] = c0;
    v.coeffs[1][0] = c1;
    v.divfree = true;
    return v;
}

// int_{s0}^{s1} (t - s)^{-1/2} (alpha + beta s) ds in closed form.
double linear_piece(double t, double s0, double s1, double g0, double g1) {
    const double beta = (g1 - g0) / (s1 - s0);
    const double alpha = g0 - beta * s0;
    auto prim = [&](double s) {
        const double u = t - s;
        // d/ds of -(2 alpha sqrt(u) + beta (2 t sqrt(u) - (2/3) u^{3/2}))
        return -(2.0 * alpha * std::sqrt(u) + beta * (2.0 * t * std::sqrt(u) - (2.0 / 3.0) * u * std::sqrt(u)));
    };
    return prim(s1) - prim(s0);
}

}  // namespace

TEST_CASE("Beta integral") {
    SUBCASE("substitution rule returns pi for random windows") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 20; ++i) {
            const double T0 = 10.0 * u(rng);
            const double t = T0 + std::pow(10.0, -6.0 + 7.0 * u(rng));
            CHECK(std::abs(beta_quadrature(T0, t, BetaRule::SubstitutionExact) - kPi) <= 1e-12);
        }
    }
    SUBCASE("substituted integrand is the constant 2") {
        for (double x : beta_substituted_integrand(0.3, 0.7, 32)) CHECK(std::abs(x - 2.0) <= 1e-14);
        for (double x : beta_substituted_integrand(1e-3, 1e-3 + 1e-7, 16)) CHECK(std::abs(x - 2.0) <= 1e-12);
    }
    SUBCASE("midpoint rule converges like n^{-1/2}") {
        std::vector<double> n, err;
        for (int k = 6; k <= 16; ++k) {
            const int nodes = 1 << k;
            n.push_back(nodes);
            err.push_back(std::abs(beta_quadrature(0.2, 0.9, BetaRule::Midpoint, nodes) - kPi));
        }
        const SlopeFit fit = loglog_fit(n, err);
        CHECK(std::abs(fit.slope + 0.5) <= 0.1);
    }
    SUBCASE("t <= T0 is rejected") {
        CHECK_THROWS_AS(beta_quadrature(1.0, 1.0, BetaRule::SubstitutionExact), std::invalid_argument);
        CHECK_THROWS_AS(beta_quadrature(1.0, 0.5, BetaRule::Midpoint), std::invalid_argument);
    }
}

TEST_CASE("kappa") {
    CHECK(kappa(1.7, 0.0) == 0.0);
    CHECK(kappa(1.0, 1.0 / kPi) == doctest::Approx(1.0).epsilon(1e-16));
    CHECK(kappa(2.0, 0.25) == 2.0 * kPi * 0.25);
    CHECK_THROWS_AS(kappa(-1.0, 0.1), std::invalid_argument);
}

TEST_CASE("log-log fit") {
    std::vector<double> x{1e-3, 1e-2, 1e-1}, y;
    for (double v : x) y.push_back(3.0 * std::sqrt(v));
    const SlopeFit f = loglog_fit(x, y);
    CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(loglog_fit({1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(loglog_fit({1.0, 2.0}, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("smoothing functional") {
    const TorusGrid g(32);
    const auto times = restart_time_grid(0.0, 0.1, 1e-3, 12);
    SUBCASE("zero trajectory") {
        const Trajectory z = evolve_on_grid(SpectralVectorField(g), times, small_config());
        for (double d : {1e-3, 1e-2, 0.1}) CHECK(smoothing_functional(z, 0.0, d) == 0.0);
    }
    SUBCASE("constant in time gives c sqrt(delta)") {
        const Trajectory c = evolve_on_grid(constant_field(g, 0.6, 0.8), times, small_config());
        for (const auto& d : c.diagnostics) CHECK(d.linf == doctest::Approx(1.0).epsilon(1e-15));
        for (int j = 0; j <= 12; ++j) {
            const double delta = std::ldexp(0.1, -j);
            CHECK(smoothing_functional(c, 0.0, delta) == doctest::Approx(std::sqrt(delta)).epsilon(1e-14));
            CHECK(smoothing_functional(c, c, 0.0, delta) == doctest::Approx(2.0 * std::sqrt(delta)).epsilon(1e-14));
        }
    }
    SUBCASE("monotone in delta, and the profile agrees") {
        const SpectralVectorField v0 = scaled_to_l2(random_divfree(g, 4, 2.0), 2.0);
        const Trajectory traj = evolve_on_grid(v0, restart_time_grid(0.01, 0.05, 1e-3, 12),
                                               small_config(1e-3));
        const auto deltas = log_spaced(1e-4, 0.05, 12);
        const SmoothingProfile prof = smoothing_profile(traj, nullptr, 0.01, deltas);
        double prev = 0.0;
        for (double d : deltas) {
            const double M = smoothing_functional(traj, 0.01, d);
            CHECK(M >= prev);
            CHECK(prof.M_of_delta.at(d) == M);
            prev = M;
        }
        for (const auto& s : prof.samples) {
            CHECK(s.t > 0.01);
            CHECK(s.weighted == std::sqrt(s.t - 0.01) * s.linf);
        }
    }
    SUBCASE("window errors") {
        const Trajectory c = evolve_on_grid(constant_field(g, 1.0, 0.0), times, small_config());
        CHECK_THROWS_AS(smoothing_functional(c, 0.0, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(smoothing_functional(c, 0.0, 1e-9), std::invalid_argument);
        CHECK_THROWS_AS(smoothing_functional(c, 0.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("Volterra check") {
    const TorusGrid g(32);
    const auto times = restart_time_grid(0.01, 0.02, 1e-3, 10);
    const SpectralVectorField v0 = scaled_to_l2(random_divfree(g, 6, 2.5), 1.0);
    SUBCASE("identical trajectories") {
        const Trajectory a = evolve_on_grid(v0, times, small_config(1e-3));
        for (const auto& p : volterra_check(a, a, 0.01, 1.6)) {
            CHECK(p.lhs == 0.0);
            CHECK(p.pass);
        }
    }
    SUBCASE("heat-only pair is a contraction") {
        SolverConfig c = small_config(1e-3);
        c.nonlinear = false;
        SpectralVectorField v1 = v0 + 0.1 * seeded_perturbation(g, 3, 3.0);
        v1.divfree = true;
        const Trajectory a = evolve_on_grid(v0, times, c);
        const Trajectory b = evolve_on_grid(v1, times, c);
        const double w0 = coefficient_norm(v1 - v0);
        for (const auto& p : volterra_check(a, b, 0.01, 0.0)) {
            CHECK(p.rhs == doctest::Approx(w0).epsilon(1e-15));
            CHECK(p.lhs <= w0);
            CHECK(p.pass);
        }
    }
    SUBCASE("rhs matches a closed-form integral of the interpolated integrand") {
        SpectralVectorField v1 = v0 + 1e-3 * seeded_perturbation(g, 8, 3.0);
        v1.divfree = true;
        const Trajectory a = evolve_on_grid(v0, times, small_config(1e-3));
        const Trajectory b = evolve_on_grid(v1, times, small_config(1e-3));
        std::vector<double> gs(a.size()), wn(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            wn[i] = coefficient_norm(b.states[i] - a.states[i]);
            gs[i] = (a.diagnostics[i].linf + b.diagnostics[i].linf) * wn[i];
        }
        const double C = 1.63;
        const auto pts = volterra_check(a, b, 0.01, C);
        REQUIRE(pts.size() == a.size() - 1);
        for (std::size_t k = 1; k < a.size(); ++k) {
            double Q = 0.0;
            for (std::size_t i = 0; i < k; ++i) Q += linear_piece(a.times[k], a.times[i], a.times[i + 1], gs[i], gs[i + 1]);
            CHECK(pts[k - 1].t == a.times[k]);
            CHECK(pts[k - 1].lhs == wn[k]);
            CHECK(pts[k - 1].rhs == doctest::Approx(wn[0] + C * Q).epsilon(1e-10));
            CHECK(pts[k - 1].pass);
        }
    }
    SUBCASE("selected samples and mismatched grids") {
        const Trajectory a = evolve_on_grid(v0, times, small_config(1e-3));
        CHECK(volterra_check(a, a, 0.01, 1.0, {0.02, 0.03}).size() == 2);
        CHECK_THROWS_AS(volterra_check(a, a, 0.01, 1.0, {0.01}), std::invalid_argument);
        const Trajectory other = evolve_on_grid(v0, restart_time_grid(0.01, 0.02, 1e-3, 4), small_config(1e-3));
        CHECK_THROWS_AS(volterra_check(a, other, 0.01, 1.0), std::invalid_argument);
    }
}

TEST_CASE("seeded perturbation") {
    const TorusGrid g(32);
    const SpectralVectorField p = seeded_perturbation(g, 5, 3.0);
    CHECK(coefficient_norm(p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(divergence_residual(p) <= 1e-14);
    const SpectralVectorField q = seeded_perturbation(g, 5, 3.0);
    CHECK(p.coeffs[0] == q.coeffs[0]);
    CHECK(coefficient_norm(p - scaled_to_l2(random_divfree(g, 5, 3.0), 1.0)) > 0.1);
}

TEST_CASE("stability experiment") {
    const TorusGrid g(32);
    const SolverConfig c = small_config();
    StabilityParams params;
    params.C_hat = 1.63;
    params.C_hat_provenance = "user-supplied";
    const SpectralVectorField base = scaled_to_l2(random_divfree(g, 2, 3.0), 1.0);

    SUBCASE("eps = 0 gives w = 0") {
        params.eps = 0.0;
        const StabilityReport r = stability_experiment(base, params, c);
        CHECK(r.w0_norm == 0.0);
        CHECK(r.sup_w == 0.0);
        CHECK(r.bound == 0.0);
        CHECK(r.pass);
        CHECK(r.volterra_failures == 0);
    }
    SUBCASE("report consistency") {
        const StabilityReport r = stability_experiment(base, params, c);
        CHECK(r.pass);
        CHECK(r.C_hat_provenance == "user-supplied");
        CHECK(r.kappa == kappa(r.C_hat, r.M_delta));
        CHECK(r.kappa <= 0.5);
        CHECK(r.bound * (1.0 - r.kappa) == doctest::Approx(r.w0_norm).epsilon(1e-12));
        CHECK(r.margin == r.bound - r.sup_w);
        CHECK(r.w0_norm == doctest::Approx(params.eps).epsilon(1e-12));
        CHECK(r.delta == std::ldexp(r.delta_requested, -r.halvings));
        CHECK(r.volterra_points > 0);
        CHECK(r.volterra_failures == 0);
    }
    SUBCASE("auto-shrink halves delta until kappa <= 1/2") {
        params.C_hat = 20.0;
        const StabilityReport r = stability_experiment(base, params, c);
        CHECK(r.halvings > 0);
        CHECK(r.kappa <= 0.5);
        // The previous window was still too large.
        const double M_prev = [&] {
            const auto times = restart_time_grid(params.T0, params.delta, c.dt, params.levels);
            const Trajectory v1 = evolve_on_grid(evolve(base, params.T0, c).states.back(), times, c);
            SpectralVectorField p = v1.states[0] + params.eps * seeded_perturbation(g, params.seed, 3.0);
            p.divfree = true;
            const Trajectory v2 = evolve_on_grid(p, times, c);
            return smoothing_functional(v1, v2, params.T0, 2.0 * r.delta);
        }();
        CHECK(kappa(params.C_hat, M_prev) > 0.5);
        CHECK(r.pass);
    }
    SUBCASE("underflow is a distinct error") {
        params.C_hat = 1e12;
        params.levels = 3;
        CHECK_THROWS_AS(stability_experiment(base, params, c), SmoothingUnderflow);
    }
    SUBCASE("Taylor-Green base") {
        params.T0 = 0.05;
        const StabilityReport r = stability_experiment(taylor_green(g, 1.0), params, c);
        CHECK(r.pass);
        CHECK(r.margin > 0.0);
    }
}

TEST_CASE("campaign is ordered by seed and thread-invariant") {
    CampaignParams p;
    p.trial.C_hat = 1.63;
    p.trial.delta = 0.01;
    p.first_seed = 5;
    p.trials = 3;
    const SolverConfig c = small_config(5e-4);
    const CampaignResult a = campaign(p, c, 1);
    const CampaignResult b = campaign(p, c, 3);
    REQUIRE(a.reports.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a.reports[i].seed == 5 + i);
        CHECK(a.reports[i].sup_w == b.reports[i].sup_w);
        CHECK(a.reports[i].M_delta == b.reports[i].M_delta);
    }
    CHECK(a.passed() == 3);
    CHECK(a.volterra_failures() == 0);
    CHECK(coefficient_norm(campaign_base(p, TorusGrid(32), 5)) == doctest::Approx(1.0).epsilon(1e-14));
}
