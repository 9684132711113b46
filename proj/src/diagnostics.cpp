#include "nsmild/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nsmild/errors.hpp"
#include "nsmild/parallel.hpp"

namespace nsmild {
namespace {

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

void require_shared_grid(const Trajectory& a, const Trajectory& b, const char* where) {
    if (a.times.size() != b.times.size()) {
        throw std::invalid_argument(std::string(where) + ": trajectories have different time grids");
    }
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        if (!same_time(a.times[i], b.times[i])) {
            throw std::invalid_argument(std::string(where) + ": trajectories have different time grids");
        }
    }
    if (!a.states.empty() && !b.states.empty()) require_same_grid(a.states[0].grid, b.states[0].grid, where);
}

// Indices of samples in (T0, T0 + delta].
std::pair<std::size_t, std::size_t> window(const Trajectory& traj, double T0, double delta) {
    if (traj.times.empty()) throw std::invalid_argument("smoothing_functional: empty trajectory");
    if (!(delta > 0.0)) throw std::invalid_argument("smoothing_functional: delta must be > 0");
    const double end = T0 + delta;
    if (T0 < traj.times.front() - 1e-12 || end > traj.times.back() * (1.0 + 1e-12) + 1e-300) {
        std::ostringstream msg;
        msg << "smoothing_functional: window (" << T0 << ", " << end << "] leaves trajectory range ["
            << traj.times.front() << ", " << traj.times.back() << "]";
        throw std::invalid_argument(msg.str());
    }
    std::size_t lo = traj.times.size(), hi = 0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        if (t > T0 && !same_time(t, T0) && (t <= end || same_time(t, end))) {
            lo = std::min(lo, i);
            hi = i + 1;
        }
    }
    if (lo >= hi) throw std::invalid_argument("smoothing_functional: no samples in (T0, T0 + delta]");
    return {lo, hi};
}

double sup_weighted(const Trajectory& a, const Trajectory* b, double T0, double delta) {
    const auto [lo, hi] = window(a, T0, delta);
    double best = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        double linf = a.diagnostics[i].linf;
        if (b) linf += b->diagnostics[i].linf;
        best = std::max(best, std::sqrt(a.times[i] - T0) * linf);
    }
    return best;
}

std::vector<double> difference_norms(const Trajectory& a, const Trajectory& b, std::size_t from) {
    std::vector<double> out(a.size(), 0.0);
    for (std::size_t i = from; i < a.size(); ++i) out[i] = coefficient_norm(b.states[i] - a.states[i]);
    return out;
}

}  // namespace

double smoothing_functional(const Trajectory& traj, double T0, double delta) {
    return sup_weighted(traj, nullptr, T0, delta);
}

double smoothing_functional(const Trajectory& a, const Trajectory& b, double T0, double delta) {
    require_shared_grid(a, b, "smoothing_functional");
    return sup_weighted(a, &b, T0, delta);
}

SmoothingProfile smoothing_profile(const Trajectory& traj, const Trajectory* second, double T0,
                                   const std::vector<double>& deltas) {
    if (second) require_shared_grid(traj, *second, "smoothing_profile");
    SmoothingProfile p;
    p.T0 = T0;
    double widest = 0.0;
    for (double d : deltas) {
        p.M_of_delta[d] = sup_weighted(traj, second, T0, d);
        widest = std::max(widest, d);
    }
    if (widest > 0.0) {
        const auto [lo, hi] = window(traj, T0, widest);
        for (std::size_t i = lo; i < hi; ++i) {
            SmoothingSample s;
            s.t = traj.times[i];
            s.linf = traj.diagnostics[i].linf + (second ? second->diagnostics[i].linf : 0.0);
            s.weighted = std::sqrt(s.t - T0) * s.linf;
            p.samples.push_back(s);
        }
    }
    return p;
}

SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_fit: need two or more matching points");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_fit: values must be > 0");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("loglog_fit: x values coincide");
    SlopeFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

std::vector<double> beta_substituted_integrand(double T0, double t, int nodes) {
    if (!(t > T0)) throw std::invalid_argument("beta_quadrature: need t > T0");
    if (nodes < 1) throw std::invalid_argument("beta_quadrature: nodes must be >= 1");
    const double L = t - T0;
    const double h = 0.5 * kPi / nodes;
    std::vector<double> out(nodes);
    for (int i = 0; i < nodes; ++i) {
        const double theta = (i + 0.5) * h;
        const double s = std::sin(theta), c = std::cos(theta);
        const double jacobian = 2.0 * L * s * c;
        out[i] = jacobian / (std::sqrt(L * c * c) * std::sqrt(L * s * s));
    }
    return out;
}

double beta_quadrature(double T0, double t, BetaRule rule, int nodes) {
    if (!(t > T0)) throw std::invalid_argument("beta_quadrature: need t > T0");
    if (nodes < 1) throw std::invalid_argument("beta_quadrature: nodes must be >= 1");
    if (rule == BetaRule::SubstitutionExact) {
        double sum = 0.0;
        for (double v : beta_substituted_integrand(T0, t, nodes)) sum += v;
        return sum * (0.5 * kPi / nodes);
    }
    const double L = t - T0;
    const double h = L / nodes;
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double off = (i + 0.5) * h;
        sum += 1.0 / (std::sqrt(L - off) * std::sqrt(off));
    }
    return sum * h;
}

std::vector<VolterraPoint> volterra_check(const Trajectory& a, const Trajectory& b, double T0,
                                          double C_hat, const std::vector<double>& t_samples) {
    require_shared_grid(a, b, "volterra_check");
    const std::size_t i0 = a.index_of(T0);
    const auto wn = difference_norms(a, b, i0);
    std::vector<double> g(a.size(), 0.0);
    for (std::size_t i = i0; i < a.size(); ++i) {
        g[i] = (a.diagnostics[i].linf + b.diagnostics[i].linf) * wn[i];
    }
    std::vector<std::size_t> targets;
    if (t_samples.empty()) {
        for (std::size_t i = i0 + 1; i < a.size(); ++i) targets.push_back(i);
    } else {
        for (double t : t_samples) {
            const std::size_t k = a.index_of(t);
            if (k <= i0) throw std::invalid_argument("volterra_check: sample times must follow T0");
            targets.push_back(k);
        }
    }
    const double gauss = 1.0 / std::sqrt(3.0);
    std::vector<VolterraPoint> out;
    out.reserve(targets.size());
    for (std::size_t k : targets) {
        const double t = a.times[k];
        double Q = 0.0;
        for (std::size_t i = i0; i < k; ++i) {
            const double s0 = a.times[i], s1 = a.times[i + 1];
            // s = t - u^2 turns (t - s)^{-1/2} ds into -2 du; g(t - u^2) is
            // quadratic in u, so two Gauss points are exact.
            const double ua = std::sqrt(t - s0), ub = std::sqrt(t - s1);
            const double mid = 0.5 * (ua + ub), half = 0.5 * (ua - ub);
            double piece = 0.0;
            for (double x : {-gauss, gauss}) {
                const double u = mid + half * x;
                const double s = t - u * u;
                const double lam = (s - s0) / (s1 - s0);
                piece += g[i] + (g[i + 1] - g[i]) * lam;
            }
            Q += 2.0 * half * piece;
        }
        VolterraPoint p;
        p.t = t;
        p.lhs = wn[k];
        p.rhs = wn[i0] + C_hat * Q;
        p.pass = p.lhs <= p.rhs * (1.0 + 1e-6);
        out.push_back(p);
    }
    return out;
}

double kappa(double C_hat, double m) {
    if (!(C_hat >= 0.0) || !(m >= 0.0)) throw std::invalid_argument("kappa: C and m must be >= 0");
    return C_hat * kPi * m;
}

StabilityReport stability_report(const Trajectory& v1, const Trajectory& v2,
                                 const StabilityParams& params) {
    require_shared_grid(v1, v2, "stability_report");
    StabilityReport r;
    r.T0 = params.T0;
    r.delta_requested = params.delta;
    r.eps = params.eps;
    r.seed = params.seed;
    r.C_hat = params.C_hat;
    r.C_hat_provenance = params.C_hat_provenance;

    bool found = false;
    for (int j = 0; j <= params.levels; ++j) {
        const double d = std::ldexp(params.delta, -j);
        const double M = smoothing_functional(v1, v2, params.T0, d);
        const double k = kappa(params.C_hat, M);
        if (k <= params.kappa_target) {
            r.delta = d;
            r.halvings = j;
            r.M_delta = M;
            r.kappa = k;
            found = true;
            break;
        }
    }
    if (!found) {
        std::ostringstream msg;
        msg << "smoothing functional stays above the kappa target after " << params.levels
            << " halvings of delta = " << params.delta;
        throw SmoothingUnderflow(msg.str());
    }

    const std::size_t i0 = v1.index_of(params.T0);
    const auto wn = difference_norms(v1, v2, i0);
    r.w0_norm = wn[i0];
    std::vector<double> window_times;
    for (std::size_t i = i0; i < v1.size(); ++i) {
        const double t = v1.times[i];
        if (t > params.T0 + r.delta && !same_time(t, params.T0 + r.delta)) break;
        r.sup_w = std::max(r.sup_w, wn[i]);
        if (i > i0) window_times.push_back(t);
    }
    r.bound = r.w0_norm / (1.0 - r.kappa);
    r.margin = r.bound - r.sup_w;
    r.pass = r.kappa < 1.0 && r.sup_w <= r.bound * (1.0 + 1e-8);

    if (!window_times.empty()) {
        const auto points = volterra_check(v1, v2, params.T0, params.C_hat, window_times);
        r.volterra_points = points.size();
        for (const auto& p : points) {
            if (!p.pass) ++r.volterra_failures;
            if (p.rhs > 0.0) r.volterra_worst_ratio = std::max(r.volterra_worst_ratio, p.lhs / p.rhs);
        }
    }
    return r;
}

SpectralVectorField seeded_perturbation(const TorusGrid& g, std::uint64_t seed, double sigma) {
    // Offset keeps perturbations independent of base data drawn from the same seed.
    return scaled_to_l2(random_divfree(g, seed + 0x9E3779B97F4A7C15ULL, sigma), 1.0);
}

StabilityReport stability_experiment(const SpectralVectorField& v_base, const StabilityParams& params,
                                     const SolverConfig& config) {
    if (!(params.T0 >= 0.0)) throw std::invalid_argument("stability_experiment: T0 must be >= 0");
    if (!(params.delta > 0.0)) throw std::invalid_argument("stability_experiment: delta must be > 0");
    if (!(params.eps >= 0.0)) throw std::invalid_argument("stability_experiment: eps must be >= 0");
    const TorusGrid& g = v_base.grid;
    SpectralVectorField start = v_base;
    if (params.T0 > 0.0) start = evolve(v_base, params.T0, config).states.back();

    const SpectralVectorField p = seeded_perturbation(g, params.seed, params.perturbation_sigma);
    SpectralVectorField perturbed = start + params.eps * p;
    perturbed.divfree = true;

    const auto times = restart_time_grid(params.T0, params.delta, config.dt, params.levels);
    const Trajectory v1 = evolve_on_grid(start, times, config);
    const Trajectory v2 = evolve_on_grid(perturbed, times, config);
    return stability_report(v1, v2, params);
}

std::size_t CampaignResult::passed() const {
    return static_cast<std::size_t>(
        std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.pass; }));
}

std::size_t CampaignResult::volterra_failures() const {
    std::size_t n = 0;
    for (const auto& r : reports) n += r.volterra_failures;
    return n;
}

SpectralVectorField campaign_base(const CampaignParams& params, const TorusGrid& g, std::uint64_t seed) {
    if (params.base == BaseField::TaylorGreen) return taylor_green(g, params.base_l2);
    return scaled_to_l2(random_divfree(g, seed, params.base_sigma), params.base_l2);
}

CampaignResult campaign(const CampaignParams& params, const SolverConfig& config, int threads) {
    if (params.trials < 1) throw std::invalid_argument("campaign: trials must be >= 1");
    config.validate();
    CampaignResult result;
    result.reports.resize(static_cast<std::size_t>(params.trials));
    const TorusGrid g(config.n);
    parallel_for(result.reports.size(), threads, [&](std::size_t i) {
        StabilityParams trial = params.trial;
        trial.seed = params.first_seed + i;
        result.reports[i] = stability_experiment(campaign_base(params, g, trial.seed), trial, config);
    });
    return result;
}

}  // namespace nsmild
