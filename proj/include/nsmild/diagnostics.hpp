#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nsmild/solver.hpp"

namespace nsmild {

struct SmoothingSample {
    double t = 0.0;
    double linf = 0.0;      ///< ||v1(t)||_inf (+ ||v2(t)||_inf for a pair)
    double weighted = 0.0;  ///< sqrt(t - T0) * linf
};

struct SmoothingProfile {
    double T0 = 0.0;
    std::vector<SmoothingSample> samples;
    std::map<double, double> M_of_delta;
};

/// M(delta): discrete sup of sqrt(s - T0) ||v(s)||_inf over samples in
/// (T0, T0 + delta].  Throws std::invalid_argument on an empty window or when
/// the window leaves the trajectory.
double smoothing_functional(const Trajectory& traj, double T0, double delta);
/// Two-solution form with ||v1||_inf + ||v2||_inf; the trajectories must share
/// their time grid.
double smoothing_functional(const Trajectory& a, const Trajectory& b, double T0, double delta);

/// Samples and M(delta) for each delta in `deltas`.  `second` may be null.
SmoothingProfile smoothing_profile(const Trajectory& traj, const Trajectory* second, double T0,
                                   const std::vector<double>& deltas);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares fit of log y against log x.  Needs >= 2 points, all positive.
SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

enum class BetaRule { SubstitutionExact, Midpoint };

/// int_{T0}^{t} (t - s)^{-1/2} (s - T0)^{-1/2} ds.
///
/// SubstitutionExact maps s = T0 + (t - T0) sin^2(theta) and sums the
/// transformed integrand at `nodes` midpoints of [0, pi/2].  Midpoint applies
/// the `nodes`-point midpoint rule to the raw singular integrand.
double beta_quadrature(double T0, double t, BetaRule rule, int nodes = 64);

/// The transformed integrand at the midpoint nodes of [0, pi/2] (2 up to rounding).
std::vector<double> beta_substituted_integrand(double T0, double t, int nodes);

struct VolterraPoint {
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// ||w(t)||_2 against ||w(T0)||_2 + C int_{T0}^{t} (t - s)^{-1/2} g(s) ds with
/// g = (||v1||_inf + ||v2||_inf) ||w||_2 interpolated linearly between samples
/// and each piece integrated exactly after the substitution u = sqrt(t - s).
/// An empty `t_samples` checks every sample after T0.
std::vector<VolterraPoint> volterra_check(const Trajectory& a, const Trajectory& b, double T0,
                                          double C_hat, const std::vector<double>& t_samples = {});

/// C pi m.
double kappa(double C_hat, double m);

struct StabilityParams {
    double T0 = 0.01;
    double delta = 0.02;
    double eps = 1e-3;
    std::uint64_t seed = 1;
    /// Spectral decay of the seeded perturbation.
    double perturbation_sigma = 3.0;
    double C_hat = 0.0;
    std::string C_hat_provenance = "estimated";
    /// Geometric refinement levels T0 + delta 2^{-j} in the time grid; also the
    /// number of halvings available to the auto-shrink.
    int levels = 24;
    double kappa_target = 0.5;
};

struct StabilityReport {
    double T0 = 0.0;
    double delta = 0.0;            ///< window actually used
    double delta_requested = 0.0;
    int halvings = 0;
    double eps = 0.0;
    std::uint64_t seed = 0;
    double C_hat = 0.0;
    std::string C_hat_provenance;
    double M_delta = 0.0;
    double kappa = 0.0;
    double w0_norm = 0.0;
    double sup_w = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool pass = false;
    std::size_t volterra_points = 0;
    std::size_t volterra_failures = 0;
    double volterra_worst_ratio = 0.0;  ///< max lhs / rhs
};

/// Unit-L2 divergence-free perturbation drawn from `seed`.
SpectralVectorField seeded_perturbation(const TorusGrid& g, std::uint64_t seed, double sigma);

/// Evolves v_base to T0, perturbs by eps times a seeded unit divergence-free
/// field, evolves both copies on [T0, T0 + delta] and fills the report.
/// The window is halved until kappa <= kappa_target; running out of levels
/// throws SmoothingUnderflow.
StabilityReport stability_experiment(const SpectralVectorField& v_base, const StabilityParams& params,
                                     const SolverConfig& config);

/// The report from already computed trajectories v1, v2 (sharing a time grid
/// that contains T0 + delta 2^{-j}).
StabilityReport stability_report(const Trajectory& v1, const Trajectory& v2,
                                 const StabilityParams& params);

enum class BaseField { TaylorGreen, Random };

struct CampaignParams {
    StabilityParams trial;  ///< seed is overwritten per trial
    std::uint64_t first_seed = 1;
    int trials = 100;
    BaseField base = BaseField::Random;
    double base_sigma = 3.0;
    double base_l2 = 1.0;  ///< L2 norm of random base data; amplitude for Taylor-Green
};

struct CampaignResult {
    std::vector<StabilityReport> reports;  ///< seed order
    std::size_t passed() const;
    std::size_t volterra_failures() const;
};

/// Independent trials in parallel; results are ordered by seed.
CampaignResult campaign(const CampaignParams& params, const SolverConfig& config, int threads);

/// Base initial data of trial `seed`.
SpectralVectorField campaign_base(const CampaignParams& params, const TorusGrid& g, std::uint64_t seed);

}  // namespace nsmild
