// One PASS/FAIL line per acceptance criterion.  Exit status is the number of
// failing criteria (capped at 1).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nsmild/diagnostics.hpp"
#include "nsmild/fft.hpp"
#include "nsmild/lorentz.hpp"
#include "nsmild/oseen.hpp"
#include "nsmild/parallel.hpp"
#include "nsmild/solver.hpp"

using namespace nsmild;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

PhysicalTensorField seeded_tensor(const TorusGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    PhysicalTensorField F(g);
    for (auto& c : F.comp)
        for (auto& x : c) x = nd(rng);
    return F;
}

ScalarField indicator(const TorusGrid& g, std::size_t cells) {
    ScalarField f(g);
    for (std::size_t k = 0; k < cells; ++k) f.values[k] = 1.0;
    return f;
}

// Shared between criteria 2, 3, 10 and 11.
KernelNormProfile small_t_profile;
bool small_t_ready = false;
CampaignResult campaign_result;
bool campaign_ready = false;

}  // namespace

int main() {
    const int threads = 0;

    report(1, "Beta constant", [] {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double T0 = 5.0 * u(rng);
            const double t = T0 + std::pow(10.0, -4.0 + 5.0 * u(rng));
            worst = std::max(worst, std::abs(beta_quadrature(T0, t, BetaRule::SubstitutionExact) - kPi));
        }
        return Outcome{worst <= 1e-12, "max |B - pi| over 20 windows = " + fmt("%.3g", worst)};
    });

    report(2, "kernel L1 bound, sqrt(t)||K||_1 on [1e-3, 1e-2]", [&] {
        small_t_profile = kernel_norm_profile(log_spaced(1e-3, 1e-2, 8), ResolutionPolicy{}, threads);
        small_t_ready = small_t_profile.converged_count() == small_t_profile.entries.size();
        double lo = 1e300, hi = 0.0, worst_change = 0.0;
        int n_max = 0;
        for (const auto& e : small_t_profile.entries) {
            lo = std::min(lo, e.sqrt_t_l1);
            hi = std::max(hi, e.sqrt_t_l1);
            worst_change = std::max(worst_change, e.rel_change);
            n_max = std::max(n_max, e.n);
        }
        const double variation = (hi - lo) / lo;
        const bool converged = small_t_ready && worst_change <= 1e-6;
        std::ostringstream d;
        d << "converged " << small_t_profile.converged_count() << "/" << small_t_profile.entries.size()
          << " (max rel change " << fmt("%.2g", worst_change) << ", n <= " << n_max << "), range ["
          << fmt("%.6f", lo) << ", " << fmt("%.6f", hi) << "], variation " << fmt("%.1f", 100.0 * variation)
          << "% (limit 5%)";
        return Outcome{converged && variation < 0.05, d.str()};
    });

    report(3, "kernel Linf bound, t^{3/2}||K||_inf on [1e-3, 1e-1]", [&] {
        const auto prof = kernel_norm_profile(log_spaced(1e-3, 1e-1, 16), ResolutionPolicy{}, threads);
        double lo = 1e300, hi = 0.0;
        for (const auto& e : prof.entries) {
            lo = std::min(lo, e.t32_linf);
            hi = std::max(hi, e.t32_linf);
        }
        const bool converged = prof.converged_count() == prof.entries.size();
        std::ostringstream d;
        d << "range [" << fmt("%.6f", lo) << ", " << fmt("%.6f", hi) << "], max/min " << fmt("%.4f", hi / lo)
          << " (limit 3), converged " << prof.converged_count() << "/" << prof.entries.size();
        return Outcome{converged && std::isfinite(hi) && hi / lo < 3.0, d.str()};
    });

    report(4, "dual-path operator identity", [] {
        const TorusGrid g(64);
        const double times[] = {1e-3, 1e-2, 0.1};
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const PhysicalTensorField F = seeded_tensor(g, seed);
            const double t = times[seed % 3];
            const SpectralVectorField a = apply_oseen(t, F);
            const SpectralVectorField b = heat_semigroup(t, leray_project(divergence_of_tensor(F)));
            worst = std::max(worst, coefficient_norm(a - b) / coefficient_norm(b));
        }
        return Outcome{worst <= 1e-13, "max relative difference over 100 tensors = " + fmt("%.3g", worst)};
    });

    report(5, "Lorentz closed forms", [] {
        const TorusGrid g(64);
        double worst_ind = 0.0;
        for (double a : {1.0 / 64.0, 0.25, 1.0}) {
            const ScalarField f = indicator(g, static_cast<std::size_t>(a * g.size()));
            for (double q : {1.1, 1.5, 1.9}) {
                const double want = std::pow(2.0 / q, 1.0 / q) * std::sqrt(a);
                worst_ind = std::max(worst_ind, std::abs(lorentz_norm(f, 2.0, q) - want) / want);
            }
        }
        double worst_l22 = 0.0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const ScalarField f = corpus_field(g, seed);
            const double l2 = l2_norm(f);
            worst_l22 = std::max(worst_l22, std::abs(lorentz_norm(f, 2.0, 2.0) - l2) / l2);
        }
        return Outcome{worst_ind <= 1e-12 && worst_l22 <= 1e-12,
                       "indicator max rel error " + fmt("%.3g", worst_ind) + ", L22 vs L2 max rel error " +
                           fmt("%.3g", worst_l22) + " on 100 fields"};
    });

    report(6, "embedding and product inequalities", [&] {
        const double qs[] = {1.1, 1.5, 1.9};
        // Two-step brute force of ||f||_{2,2} / ||f||_{2,q} on a 50^3 grid.
        bool brute_ok = true;
        double brute_best_frac = 0.0;
        for (double q : qs) {
            const double bound = lorentz_monotone_bound(q, 2.0);
            double best = 0.0;
            for (int a = 1; a <= 50; ++a)
                for (int b = 0; b < 50; ++b)
                    for (int c = 1; c <= 50; ++c) {
                        const double v1 = a / 50.0, v2 = v1 * b / 50.0, t1 = c / 51.0;
                        const double tq = std::pow(t1, q / 2.0);
                        const double nq = (2.0 / q) * (std::pow(v1, q) * tq + std::pow(v2, q) * (1.0 - tq));
                        const double n2 = std::sqrt(v1 * v1 * t1 + v2 * v2 * (1.0 - t1));
                        best = std::max(best, n2 / std::pow(nq, 1.0 / q));
                    }
            brute_ok = brute_ok && best <= bound;
            brute_best_frac = std::max(brute_best_frac, best / bound);
        }

        std::size_t embed_fail = 0, lemma_fail = 0;
        double oneil[3] = {0.0, 0.0, 0.0};
        const int ns[] = {64, 128, 256};
        for (int r = 0; r < 3; ++r) {
            const TorusGrid g(ns[r]);
            std::vector<std::size_t> ef(100, 0);
            parallel_for(100, threads, [&](std::size_t i) {
                const auto prof = decreasing_rearrangement(corpus_field(g, 1 + i));
                for (double q : qs)
                    if (!embedding_ratio_check(prof, q).pass) ++ef[i];
            });
            for (auto x : ef) embed_fail += x;
            std::vector<ProductCheck> pc(200);
            parallel_for(pc.size(), threads, [&](std::size_t j) {
                pc[j] = product_l1_check(corpus_field(g, 1 + 2 * j), corpus_field(g, 2 + 2 * j));
            });
            for (const auto& p : pc) {
                if (!p.linf_l2_holds) ++lemma_fail;
                oneil[r] = std::max(oneil[r], p.ratio);
            }
        }
        const double hi = *std::max_element(oneil, oneil + 3), lo = *std::min_element(oneil, oneil + 3);
        const bool stable = std::isfinite(hi) && lo > 0.0 && (hi - lo) / lo <= 0.05;
        std::ostringstream d;
        d << "embedding failures " << embed_fail << "/900, brute-force max/bound " << fmt("%.4f", brute_best_frac)
          << ", product lemma failures " << lemma_fail << "/600, max product ratio n=64/128/256: "
          << fmt("%.6f", oneil[0]) << "/" << fmt("%.6f", oneil[1]) << "/" << fmt("%.6f", oneil[2]);
        return Outcome{brute_ok && embed_fail == 0 && lemma_fail == 0 && stable, d.str()};
    });

    report(7, "Taylor-Green exactness", [] {
        const TorusGrid g(64);
        const SpectralVectorField v0 = taylor_green(g, 1.0);
        const double pre = coefficient_norm(nonlinear_term(v0));
        if (pre > 1e-12) return Outcome{false, "nonlinear_term pre-check " + fmt("%.3g", pre)};
        SolverConfig c;
        c.n = 64;
        c.dt = 1e-4;
        const Trajectory traj = evolve(v0, 0.1, c);
        const SpectralVectorField exact = std::exp(-8.0 * kPi * kPi * 0.1) * v0;
        const double err = coefficient_norm(traj.states.back() - exact) / coefficient_norm(exact);
        return Outcome{err <= 1e-6,
                       "pre-check " + fmt("%.3g", pre) + ", relative L2 error at t = 0.1: " + fmt("%.3g", err)};
    });

    report(8, "restart identity", [] {
        SolverConfig c;
        c.n = 64;
        c.dt = 1e-4;
        const TorusGrid g(64);
        double worst = 0.0;
        const Trajectory tg = evolve(taylor_green(g, 1.0), 0.01, c);
        for (double T0 : {0.002, 0.005, 0.008}) worst = std::max(worst, restart_consistency(tg, T0));
        const Trajectory rnd = evolve(scaled_to_l2(random_divfree(g, 42, 2.0), 1.0), 0.01, c);
        for (double T0 : {0.002, 0.005, 0.008}) worst = std::max(worst, restart_consistency(rnd, T0));
        return Outcome{worst <= 1e-12, "max deviation over 6 restarts = " + fmt("%.3g", worst)};
    });

    report(9, "smoothing functional on Taylor-Green", [] {
        SolverConfig c;
        c.n = 64;
        c.dt = 1e-4;
        const std::vector<double> deltas = log_spaced(1e-3, 1e-1, 9);
        const Trajectory traj =
            evolve_on_grid(taylor_green(TorusGrid(64), 1.0), restart_time_grid(0.0, 0.1, c.dt, 24), c);
        std::vector<double> M;
        bool monotone = true;
        for (double d : deltas) {
            M.push_back(smoothing_functional(traj, 0.0, d));
            if (M.size() > 1 && M.back() < M[M.size() - 2]) monotone = false;
        }
        const SlopeFit fit = loglog_fit(deltas, M);
        std::ostringstream d;
        d << (monotone ? "monotone" : "NOT monotone") << ", log-log slope " << fmt("%.4f", fit.slope)
          << " (target 0.5 +- 0.05), M(1e-3) = " << fmt("%.4g", M.front()) << ", M(1e-1) = " << fmt("%.4g", M.back());
        return Outcome{monotone && std::abs(fit.slope - 0.5) <= 0.05, d.str()};
    });

    report(10, "stability campaign, 100 trials", [&] {
        if (small_t_profile.entries.empty()) {
            small_t_profile = kernel_norm_profile(log_spaced(1e-3, 1e-2, 8), ResolutionPolicy{}, threads);
        }
        const KernelConstant C = estimate_kernel_constant(small_t_profile);
        CampaignParams p;
        p.trial.C_hat = C.value;
        p.trial.C_hat_provenance = C.provenance;
        p.trial.eps = 1e-3;
        p.trials = 100;
        SolverConfig c;
        c.n = 64;
        c.dt = 1e-4;
        campaign_result = campaign(p, c, threads);
        campaign_ready = true;
        double worst_kappa = 0.0, min_margin = 1e300;
        int max_halvings = 0;
        for (const auto& r : campaign_result.reports) {
            worst_kappa = std::max(worst_kappa, r.kappa);
            min_margin = std::min(min_margin, r.margin);
            max_halvings = std::max(max_halvings, r.halvings);
        }
        std::ostringstream d;
        d << campaign_result.passed() << "/100 pass with C_hat = " << fmt("%.6f", C.value) << ", max kappa "
          << fmt("%.4f", worst_kappa) << ", max halvings " << max_halvings << ", min margin "
          << fmt("%.3g", min_margin);
        return Outcome{campaign_result.passed() == 100, d.str()};
    });

    report(11, "Volterra inequality on the campaign trajectories", [&] {
        if (!campaign_ready) return Outcome{false, "campaign did not run"};
        std::size_t points = 0;
        double worst = 0.0;
        for (const auto& r : campaign_result.reports) {
            points += r.volterra_points;
            worst = std::max(worst, r.volterra_worst_ratio);
        }
        std::ostringstream d;
        d << campaign_result.volterra_failures() << " failures at " << points << " sampled times, worst lhs/rhs "
          << fmt("%.6f", worst);
        return Outcome{points > 0 && campaign_result.volterra_failures() == 0, d.str()};
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
