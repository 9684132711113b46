#include "nsmild/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nsmild/errors.hpp"
#include "nsmild/fft.hpp"

namespace nsmild {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::PicardExponential: return "picard-exponential";
        case Scheme::Etdrk2: return "etdrk2";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "picard-exponential") return Scheme::PicardExponential;
    if (name == "etdrk2") return Scheme::Etdrk2;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

void SolverConfig::validate() const {
    if (n < 4 || n % 2 != 0) throw ConfigError("n", "must be an even integer >= 4");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "must be > 0");
    if (!(picard_tol > 0.0)) throw ConfigError("picard_tol", "must be > 0");
    if (picard_max_iters < 1) throw ConfigError("picard_max_iters", "must be >= 1");
}

int SolverConfig::declared_order() const { return scheme == Scheme::Etdrk2 ? 2 : 3; }

SpectralVectorField nonlinear_term(const SpectralVectorField& v, bool dealias) {
    const auto& g = v.grid;
    const int n = g.n();
    SpectralVectorField u = v;
    zero_nyquist(u);
    if (dealias) truncate_two_thirds(u);
    RealPlane u1, u2;
    inverse_pair(n, u.coeffs[0], u.coeffs[1], u1, u2);

    RealPlane p11(g.size()), p12(g.size()), p22(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        p11[k] = u1[k] * u1[k];
        p12[k] = u1[k] * u2[k];
        p22[k] = u2[k] * u2[k];
    }
    std::array<ComplexPlane, 4> F_hat;
    forward_pair(n, p11, p12, F_hat[0], F_hat[1]);
    F_hat[2] = F_hat[1];
    F_hat[3] = to_spectral(ScalarField(g, std::move(p22)));

    SpectralVectorField div = divergence_of_tensor(g, F_hat);
    if (dealias) truncate_two_thirds(div);
    return leray_project(div);
}

PhiValues phi_functions(double z) {
    if (std::abs(z) < 1.0) {
        // phi_j(z) = sum_m z^m / (m + j)!; 30 terms reach rounding for |z| < 1.
        double p1 = 0.0, p2 = 0.0, p3 = 0.0;
        double zm = 1.0;
        double f1 = 1.0, f2 = 2.0, f3 = 6.0;  // (m+1)!, (m+2)!, (m+3)!
        for (int m = 0; m < 30; ++m) {
            p1 += zm / f1;
            p2 += zm / f2;
            p3 += zm / f3;
            zm *= z;
            f1 *= (m + 2);
            f2 *= (m + 3);
            f3 *= (m + 4);
        }
        return {p1, p2, p3};
    }
    const double p1 = std::expm1(z) / z;
    const double p2 = (p1 - 1.0) / z;
    const double p3 = (p2 - 0.5) / z;
    return {p1, p2, p3};
}

struct Stepper::Weights {
    // Heat factors at h and h/2, and phi_1..3 at -4 pi^2 |k|^2 h (full) and
    // half of that (half), flattened over the grid.
    HeatMultiplier heat_full;
    HeatMultiplier heat_half;
    std::vector<PhiValues> full;
    std::vector<PhiValues> half;

    Weights(const TorusGrid& g, double h) : heat_full(g, h), heat_half(g, 0.5 * h) {
        const int n = g.n();
        full.resize(g.size());
        half.resize(g.size());
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double k1 = g.freq(i), k2 = g.freq(j);
                const double z = -kLaplaceScale * (k1 * k1 + k2 * k2) * h;
                full[g.flat(i, j)] = phi_functions(z);
                half[g.flat(i, j)] = phi_functions(0.5 * z);
            }
        }
    }
};

Stepper::Stepper(SolverConfig config) : config_(config), grid_(config.n) { config_.validate(); }

const Stepper::Weights& Stepper::weights_for(double h) {
    auto it = cache_.find(h);
    if (it == cache_.end()) {
        if (cache_.size() > 64) cache_.clear();
        it = cache_.emplace(h, std::make_shared<Weights>(grid_, h)).first;
    }
    return *it->second;
}

SpectralVectorField Stepper::nonlinear(const SpectralVectorField& v) const {
    if (!config_.nonlinear) {
        SpectralVectorField zero(v.grid);
        zero.divfree = true;
        return zero;
    }
    return nonlinear_term(v, config_.dealias);
}

SpectralVectorField Stepper::step(const SpectralVectorField& v, double h, double t_now) {
    require_same_grid(v.grid, grid_, "Stepper::step");
    if (!(h > 0.0)) throw std::invalid_argument("Stepper::step: step size must be > 0");
    if (!config_.nonlinear) {
        last_iterations_ = 0;
        return heat_semigroup(h, v);
    }
    return config_.scheme == Scheme::Etdrk2 ? step_etdrk2(v, h) : step_picard(v, h, t_now);
}

SpectralVectorField Stepper::step_etdrk2(const SpectralVectorField& v, double h) {
    const Weights& w = weights_for(h);
    const int n = grid_.n();
    const SpectralVectorField N0 = nonlinear(v);
    SpectralVectorField a(grid_);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const auto idx = grid_.flat(i, j);
            const double e = w.heat_full(i, j);
            const double c1 = h * w.full[idx].phi1;
            for (int m = 0; m < 2; ++m) a.coeffs[m][idx] = e * v.coeffs[m][idx] - c1 * N0.coeffs[m][idx];
        }
    }
    a.divfree = true;
    const SpectralVectorField Na = nonlinear(a);
    SpectralVectorField out = a;
    for (std::size_t idx = 0; idx < grid_.size(); ++idx) {
        const double c2 = h * w.full[idx].phi2;
        for (int m = 0; m < 2; ++m) {
            out.coeffs[m][idx] -= c2 * (Na.coeffs[m][idx] - N0.coeffs[m][idx]);
        }
    }
    last_iterations_ = 0;
    return out;
}

SpectralVectorField Stepper::step_picard(const SpectralVectorField& v, double h, double t_now) {
    const Weights& w = weights_for(h);
    const int n = grid_.n();
    const SpectralVectorField N0 = nonlinear(v);
    SpectralVectorField N_half = N0;
    SpectralVectorField N_full = N0;
    SpectralVectorField V_half(grid_), V_full(grid_);
    SpectralVectorField prev_full(grid_);
    double residual = std::numeric_limits<double>::infinity();  // unmeasured until two iterates exist

    for (int iter = 1; iter <= config_.picard_max_iters; ++iter) {
        // Quadratic through (0, N0), (1/2, N_half), (1, N_full) in s/h:
        //   P(s) = N0 + a (s/h) + b (s/h)^2.
        // int_0^tau e^{(tau - s)L} (s/tau)^j ds = tau j! phi_{j+1}(tau L).
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const auto idx = grid_.flat(i, j);
                const PhiValues& pf = w.full[idx];
                const PhiValues& ph = w.half[idx];
                const double ef = w.heat_full(i, j);
                const double eh = w.heat_half(i, j);
                for (int m = 0; m < 2; ++m) {
                    const Complex n0 = N0.coeffs[m][idx];
                    const Complex nh = N_half.coeffs[m][idx];
                    const Complex n1 = N_full.coeffs[m][idx];
                    const Complex a = -3.0 * n0 + 4.0 * nh - n1;
                    const Complex b = 2.0 * n0 - 4.0 * nh + 2.0 * n1;
                    const Complex x = v.coeffs[m][idx];
                    V_full.coeffs[m][idx] =
                        ef * x - h * (pf.phi1 * n0 + pf.phi2 * a + 2.0 * pf.phi3 * b);
                    V_half.coeffs[m][idx] =
                        eh * x - 0.5 * h * (ph.phi1 * n0 + 0.5 * ph.phi2 * a + 0.5 * ph.phi3 * b);
                }
            }
        }
        V_full.divfree = V_half.divfree = true;
        if (iter > 1) {
            const double scale = coefficient_norm(V_full);
            const double change = coefficient_norm(V_full - prev_full);
            residual = scale > 0.0 ? change / scale : change;
            if (residual <= config_.picard_tol) {
                last_iterations_ = iter;
                return V_full;
            }
        }
        prev_full = V_full;
        N_half = nonlinear(V_half);
        N_full = nonlinear(V_full);
    }
    std::ostringstream msg;
    msg << "Picard iteration did not converge within " << config_.picard_max_iters
        << " iterations at t = " << t_now << " (residual " << residual << ")";
    throw PicardError(msg.str(), residual, t_now);
}

SpectralVectorField step(const SpectralVectorField& v, double dt, const SolverConfig& config) {
    Stepper stepper(config);
    return stepper.step(v, dt);
}

SampleDiagnostics diagnose(const SpectralVectorField& v) {
    const PhysicalVectorField f = to_physical(v);
    SampleDiagnostics d;
    d.l2 = l2_norm(f);
    d.linf = linf_norm(f);
    d.energy = d.l2 * d.l2;
    return d;
}

std::optional<std::size_t> Trajectory::find_time(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
    }
    return std::nullopt;
}

std::size_t Trajectory::index_of(double t) const {
    if (auto i = find_time(t)) return *i;
    std::ostringstream msg;
    msg << "time " << t << " is not a sample time of the trajectory";
    throw std::invalid_argument(msg.str());
}

namespace {

void check_initial(const SpectralVectorField& v0, const SolverConfig& config) {
    config.validate();
    if (v0.grid.n() != config.n) {
        throw std::invalid_argument("initial data resolution does not match solver config");
    }
}

void push_sample(Trajectory& traj, double t, SpectralVectorField v) {
    traj.times.push_back(t);
    traj.diagnostics.push_back(diagnose(v));
    traj.states.push_back(std::move(v));
}

Trajectory run_steps(const SpectralVectorField& v0, double t0, const std::vector<double>& steps,
                     const SolverConfig& config) {
    Trajectory traj;
    traj.config = config;
    traj.steps = steps;
    Stepper stepper(config);
    push_sample(traj, t0, v0);
    double t = t0;
    for (double h : steps) {
        try {
            SpectralVectorField next = stepper.step(traj.states.back(), h, t);
            t += h;
            push_sample(traj, t, std::move(next));
        } catch (const PicardError&) {
            throw;
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "step failed at t = " << t << ": " << e.what();
            throw std::runtime_error(msg.str());
        }
    }
    return traj;
}

}  // namespace

Trajectory evolve(const SpectralVectorField& v0, double t_end, const SolverConfig& config,
                  double t0) {
    check_initial(v0, config);
    if (!(t_end > t0)) throw std::invalid_argument("evolve: t_end must exceed the start time");
    const double span = t_end - t0;
    const auto count = static_cast<std::size_t>(std::ceil(span / config.dt - 1e-9));
    std::vector<double> times(count + 1);
    for (std::size_t i = 0; i <= count; ++i) times[i] = t0 + static_cast<double>(i) * config.dt;
    times.back() = t_end;
    return evolve_on_grid(v0, times, config);
}

Trajectory evolve_on_grid(const SpectralVectorField& v0, const std::vector<double>& times,
                          const SolverConfig& config) {
    check_initial(v0, config);
    if (times.size() < 2) throw std::invalid_argument("evolve_on_grid: need at least two times");
    std::vector<double> steps(times.size() - 1);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        steps[i] = times[i + 1] - times[i];
        if (!(steps[i] > 0.0)) throw std::invalid_argument("evolve_on_grid: times must increase");
    }
    Trajectory traj = run_steps(v0, times.front(), steps, config);
    traj.times = times;
    return traj;
}

std::vector<double> restart_time_grid(double T0, double delta, double dt, int levels,
                                      const std::vector<double>& extra_offsets) {
    if (!(delta > 0.0) || !(dt > 0.0) || levels < 0) {
        throw std::invalid_argument("restart_time_grid: need delta > 0, dt > 0, levels >= 0");
    }
    std::vector<double> offsets;
    for (int j = 0; j <= levels; ++j) offsets.push_back(std::ldexp(delta, -j));
    const auto uniform = static_cast<std::size_t>(std::floor(delta / dt));
    for (std::size_t i = 1; i <= uniform; ++i) offsets.push_back(static_cast<double>(i) * dt);
    for (double o : extra_offsets) {
        if (o > 0.0) offsets.push_back(o);
    }
    std::sort(offsets.begin(), offsets.end());
    std::vector<double> times{T0};
    const double min_gap = 1e-9 * std::min(dt, delta);
    for (double o : offsets) {
        if (o > delta * (1.0 + 1e-12)) break;
        const double t = T0 + o;
        if (t - times.back() > min_gap) times.push_back(t);
    }
    // Land exactly on T0 + delta.
    if (std::abs(times.back() - (T0 + delta)) > 0.0) {
        if (times.back() > T0 + delta - min_gap) times.back() = T0 + delta;
        else times.push_back(T0 + delta);
    }
    return times;
}

double restart_consistency(const Trajectory& traj, double T0) {
    const std::size_t start = traj.index_of(T0);
    if (start + 1 >= traj.size()) return 0.0;
    const std::vector<double> steps(traj.steps.begin() + static_cast<std::ptrdiff_t>(start),
                                    traj.steps.end());
    Stepper stepper(traj.config);
    SpectralVectorField v = traj.states[start];
    double worst = 0.0;
    double t = traj.times[start];
    for (std::size_t s = 0; s < steps.size(); ++s) {
        v = stepper.step(v, steps[s], t);
        t += steps[s];
        const auto& ref = traj.states[start + s + 1];
        const double denom = coefficient_norm(ref);
        const double diff = coefficient_norm(v - ref);
        worst = std::max(worst, denom > 0.0 ? diff / denom : diff);
    }
    return worst;
}

SpectralVectorField taylor_green(const TorusGrid& g, double amplitude) {
    if (!std::isfinite(amplitude)) throw std::invalid_argument("taylor_green: amplitude must be finite");
    SpectralVectorField v(g);
    // cos(2 pi x) -> 1/2 at k = +-1; sin(2 pi x) -> -i/2 at k = +1, +i/2 at k = -1.
    auto cos_c = [](int k) { return Complex(0.5, 0.0) * double(std::abs(k) == 1); };
    auto sin_c = [](int k) { return k == 1 ? Complex(0.0, -0.5) : k == -1 ? Complex(0.0, 0.5) : Complex{}; };
    for (int k1 : {-1, 1}) {
        for (int k2 : {-1, 1}) {
            const auto idx = g.flat(g.index_of(k1), g.index_of(k2));
            v.coeffs[0][idx] = amplitude * cos_c(k1) * sin_c(k2);
            v.coeffs[1][idx] = -amplitude * sin_c(k1) * cos_c(k2);
        }
    }
    v.divfree = true;
    return v;
}

SpectralVectorField random_divfree(const TorusGrid& g, std::uint64_t seed, double sigma) {
    if (!(sigma > 1.0)) throw std::invalid_argument("random_divfree: sigma must exceed 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SpectralVectorField v(g);
    const int n = g.n();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (g.is_nyquist(i) || g.is_nyquist(j)) continue;
            const int k1 = g.freq(i), k2 = g.freq(j);
            // Draw on the half plane and mirror the conjugate.
            if (!(k1 > 0 || (k1 == 0 && k2 > 0))) continue;
            const double amp = std::pow(double(k1 * k1 + k2 * k2), -0.5 * sigma);
            const auto idx = g.flat(i, j);
            const auto mirror = g.conjugate_flat(i, j);
            for (int m = 0; m < 2; ++m) {
                const double re = normal(rng);
                const double im = normal(rng);
                const Complex c = amp * Complex(re, im) / std::sqrt(2.0);
                v.coeffs[m][idx] = c;
                v.coeffs[m][mirror] = std::conj(c);
            }
        }
    }
    return leray_project(v);
}

SpectralVectorField scaled_to_l2(const SpectralVectorField& v, double target) {
    const double norm = coefficient_norm(v);
    if (!(norm > 0.0)) throw std::invalid_argument("scaled_to_l2: field is zero");
    SpectralVectorField out = (target / norm) * v;
    out.divfree = v.divfree;
    return out;
}

}  // namespace nsmild
