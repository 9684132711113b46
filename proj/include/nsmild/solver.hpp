#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsmild/fields.hpp"
#include "nsmild/spectral.hpp"

namespace nsmild {

enum class Scheme {
    /// Picard iteration of the Duhamel formula on each step, with the
    /// nonlinearity interpolated quadratically at s = 0, h/2, h and the
    /// resulting integrals evaluated exactly by phi-function weights.
    PicardExponential,
    /// Cox-Matthews exponential Runge-Kutta of order 2.
    Etdrk2,
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
    int n = 64;
    double dt = 1e-4;
    Scheme scheme = Scheme::PicardExponential;
    double picard_tol = 1e-12;
    int picard_max_iters = 50;
    bool dealias = true;
    /// false drops the nonlinearity entirely (pure heat flow).
    bool nonlinear = true;

    /// Throws ConfigError naming the offending field.
    void validate() const;
    /// Classical order the scheme is designed for.
    int declared_order() const;
};

/// P div(v (x) v): product formed on the grid from the 2/3-truncated field,
/// result truncated again before projection when `dealias` is set.
SpectralVectorField nonlinear_term(const SpectralVectorField& v, bool dealias = true);

/// phi_1..phi_3 at z <= 0, phi_j(z) = sum_m z^m / (m + j)!.
struct PhiValues {
    double phi1, phi2, phi3;
};
PhiValues phi_functions(double z);

/// Single-step integrator with cached exponential weights per step size.
/// Not thread-safe; use one Stepper per trajectory.
class Stepper {
public:
    explicit Stepper(SolverConfig config);

    const SolverConfig& config() const noexcept { return config_; }
    /// Advance a divergence-free state by h.  Throws PicardError when the
    /// Picard iteration stalls.
    SpectralVectorField step(const SpectralVectorField& v, double h, double t_now = 0.0);
    /// Picard iterations used by the most recent step (0 for etdrk2).
    int last_iterations() const noexcept { return last_iterations_; }

private:
    struct Weights;
    const Weights& weights_for(double h);

    SpectralVectorField nonlinear(const SpectralVectorField& v) const;
    SpectralVectorField step_picard(const SpectralVectorField& v, double h, double t_now);
    SpectralVectorField step_etdrk2(const SpectralVectorField& v, double h);

    SolverConfig config_;
    TorusGrid grid_;
    std::map<double, std::shared_ptr<Weights>> cache_;
    int last_iterations_ = 0;
};

/// One step through a temporary Stepper.
SpectralVectorField step(const SpectralVectorField& v, double dt, const SolverConfig& config);

struct SampleDiagnostics {
    double l2 = 0.0;
    double linf = 0.0;
    double energy = 0.0;
};

SampleDiagnostics diagnose(const SpectralVectorField& v);

struct Trajectory {
    std::vector<double> times;
    /// steps[i] is the step size used between times[i] and times[i + 1].
    std::vector<double> steps;
    std::vector<SpectralVectorField> states;
    std::vector<SampleDiagnostics> diagnostics;
    SolverConfig config;

    std::size_t size() const noexcept { return times.size(); }
    /// Index of the sample at time t (relative tolerance 1e-12).
    std::optional<std::size_t> find_time(double t) const;
    std::size_t index_of(double t) const;
    const SpectralVectorField& state_at(double t) const { return states[index_of(t)]; }
};

/// Uniform steps of config.dt from t0 to t_end; the final step is shortened
/// to land on t_end.
Trajectory evolve(const SpectralVectorField& v0, double t_end, const SolverConfig& config,
                  double t0 = 0.0);

/// Steps exactly between consecutive entries of `times` (times[0] is the
/// time of v0).
Trajectory evolve_on_grid(const SpectralVectorField& v0, const std::vector<double>& times,
                          const SolverConfig& config);

/// Union of the uniform grid T0 + i*dt and the geometric points
/// T0 + delta * 2^{-j}, j = 0..levels, restricted to [T0, T0 + delta], plus
/// T0 + o for every o in `extra_offsets`.
std::vector<double> restart_time_grid(double T0, double delta, double dt, int levels,
                                      const std::vector<double>& extra_offsets = {});

/// Re-runs the trajectory from its sample at T0 with the recorded step sizes
/// and returns the largest relative L2 deviation over the shared samples.
double restart_consistency(const Trajectory& traj, double T0);

/// A (cos 2 pi x1 sin 2 pi x2, -sin 2 pi x1 cos 2 pi x2).
SpectralVectorField taylor_green(const TorusGrid& g, double amplitude);

/// Hermitian random field with |v(k)| ~ |k|^{-sigma}, Leray-projected,
/// mean-free.  Same seed gives the same bits.
SpectralVectorField random_divfree(const TorusGrid& g, std::uint64_t seed, double sigma);

/// Copy of v rescaled so that its L2 norm equals `target` (v must be nonzero).
SpectralVectorField scaled_to_l2(const SpectralVectorField& v, double target);

}  // namespace nsmild
