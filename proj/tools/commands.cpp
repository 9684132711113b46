#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include "nsmild/errors.hpp"
#include "nsmild/fft.hpp"
#include "nsmild/io.hpp"
#include "nsmild/lorentz.hpp"
#include "nsmild/parallel.hpp"

namespace nsmild::cli {
namespace {

using io::format_double;
using ojson = io::json;

std::ostream& log_of(const RunContext& ctx) { return ctx.log ? *ctx.log : std::cout; }

ojson to_ordered(const json& j) { return ojson::parse(j.dump()); }

bool energy_monotone(const Trajectory& traj) {
    for (std::size_t i = 1; i < traj.size(); ++i) {
        if (traj.diagnostics[i].energy > traj.diagnostics[i - 1].energy + 1e-10) return false;
    }
    return true;
}

double worst_divergence(const Trajectory& traj) {
    double worst = 0.0;
    for (const auto& s : traj.states) {
        const double scale = coefficient_norm(s);
        if (scale > 0.0) worst = std::max(worst, divergence_residual(s) / scale);
    }
    return worst;
}

}  // namespace

int run_kernel_bounds(const KernelBoundsConfig& c, const RunContext& ctx) {
    const KernelNormProfile profile = kernel_norm_profile(c.t_values, c.policy, ctx.threads);
    const std::size_t converged = profile.converged_count();

    ojson doc;
    if (converged > 0) {
        const KernelConstant C = estimate_kernel_constant(profile);
        doc["C_hat"] = C.value;
        doc["t_at_max"] = C.t_at_max;
        doc["n_at_max"] = C.n_at_max;
        doc["C_hat_provenance"] = C.provenance;
    } else {
        doc["C_hat"] = nullptr;
        doc["C_hat_provenance"] = "none";
    }
    doc["t_range"] = {c.t_values.front(), c.t_values.back()};
    doc["rows"] = profile.entries.size();
    doc["converged_rows"] = converged;
    doc["rel_tol"] = c.policy.rel_tol;
    doc["resolutions"] = c.policy.resolutions;
    doc["convention"] = io::convention_block("estimated");

    io::write_csv(ctx.out / "kernel_profile.csv", io::kernel_profile_table(profile),
                  io::convention_block("estimated"));
    io::write_json(ctx.out / "kernel_bounds.json", doc);

    log_of(ctx) << "kernel-bounds: " << converged << "/" << profile.entries.size() << " rows converged";
    if (converged > 0) log_of(ctx) << ", C_hat = " << format_double(doc["C_hat"].get<double>());
    log_of(ctx) << "\n";
    return converged == profile.entries.size() ? kExitPass : kExitNonConvergence;
}

int run_lorentz(const LorentzConfig& c, const RunContext& ctx) {
    const TorusGrid g(c.n);

    struct FieldResult {
        std::vector<std::vector<std::string>> rows;
        std::size_t failures = 0;
        double l22_dev = 0.0;
    };
    std::vector<FieldResult> fields(static_cast<std::size_t>(c.fields));
    parallel_for(fields.size(), ctx.threads, [&](std::size_t i) {
        const std::uint64_t seed = c.first_seed + i;
        const ScalarField f = corpus_field(g, seed);
        const RearrangementProfile prof = decreasing_rearrangement(f);
        auto& out = fields[i];
        const double l2 = l2_norm(f);
        const double l22 = lorentz_norm(prof, 2.0, 2.0);
        out.l22_dev = l2 > 0.0 ? std::abs(l22 - l2) / l2 : std::abs(l22);
        const bool l22_ok = out.l22_dev <= 1e-12;
        if (!l22_ok) ++out.failures;
        out.rows.push_back({std::to_string(seed), "2", "2", format_double(l22),
                            format_double(l2 > 0.0 ? l22 / l2 : 1.0), "1", l22_ok ? "1" : "0"});
        for (double q : c.q_values) {
            const EmbeddingCheck e = embedding_ratio_check(prof, q);
            if (!e.pass) ++out.failures;
            out.rows.push_back({std::to_string(seed), "2", format_double(q),
                                format_double(lorentz_norm(prof, 2.0, q)), format_double(e.ratio),
                                format_double(e.bound), e.pass ? "1" : "0"});
        }
    });

    std::vector<ProductCheck> products(static_cast<std::size_t>(c.product_pairs));
    parallel_for(products.size(), ctx.threads, [&](std::size_t j) {
        const std::uint64_t sw = c.first_seed + 2 * j;
        products[j] = product_l1_check(corpus_field(g, sw), corpus_field(g, sw + 1));
    });

    io::Table corpus;
    corpus.header = {"field_id", "p", "r", "norm", "ratio", "bound", "pass"};
    std::size_t failures = 0;
    double worst_l22 = 0.0;
    for (auto& f : fields) {
        failures += f.failures;
        worst_l22 = std::max(worst_l22, f.l22_dev);
        for (auto& r : f.rows) corpus.add_row(std::move(r));
    }
    io::Table prod;
    prod.header = {"pair_id", "lhs", "rhs_factor", "ratio", "product_l2_sq", "linf_l2_sq", "linf_l2_holds"};
    double oneil = 0.0;
    std::size_t lemma_failures = 0;
    for (std::size_t j = 0; j < products.size(); ++j) {
        const auto& p = products[j];
        oneil = std::max(oneil, p.ratio);
        if (!p.linf_l2_holds) ++lemma_failures;
        prod.add_row({std::to_string(j), format_double(p.lhs), format_double(p.rhs_factor),
                      format_double(p.ratio), format_double(p.product_l2_sq), format_double(p.linf_l2_sq),
                      p.linf_l2_holds ? "1" : "0"});
    }

    ojson doc;
    doc["n"] = c.n;
    doc["fields"] = c.fields;
    doc["first_seed"] = c.first_seed;
    doc["q_values"] = c.q_values;
    doc["embedding_failures"] = failures;
    doc["max_l22_relative_deviation"] = worst_l22;
    doc["product_pairs"] = c.product_pairs;
    doc["max_product_ratio"] = oneil;
    doc["product_lemma_failures"] = lemma_failures;
    doc["convention"] = io::convention_block();
    io::write_csv(ctx.out / "lorentz.csv", corpus, io::convention_block());
    io::write_csv(ctx.out / "lorentz_product.csv", prod, io::convention_block());
    io::write_json(ctx.out / "lorentz.json", doc);

    log_of(ctx) << "lorentz: " << failures << " embedding failures, " << lemma_failures
                << " product failures, max product ratio " << format_double(oneil) << "\n";
    return failures == 0 && lemma_failures == 0 ? kExitPass : kExitViolation;
}

int run_simulate(const SimulateConfig& c, const RunContext& ctx) {
    const TorusGrid g(c.solver.n);
    const SpectralVectorField v0 = c.initial.build(g);
    const Trajectory traj = evolve(v0, c.t_end, c.solver);

    ojson doc;
    doc["solver"] = to_ordered(solver_json(c.solver));
    doc["initial"] = to_ordered(c.initial.to_json());
    doc["t_end"] = c.t_end;
    doc["samples"] = traj.size();
    doc["final_l2"] = traj.diagnostics.back().l2;
    doc["final_linf"] = traj.diagnostics.back().linf;
    const bool monotone = energy_monotone(traj);
    const double div = worst_divergence(traj);
    doc["energy_monotone"] = monotone;
    doc["max_relative_divergence"] = div;
    if (c.initial.type == InitialSpec::Type::TaylorGreen) {
        const SpectralVectorField exact = std::exp(-2.0 * kLaplaceScale * c.t_end) * v0;
        const double scale = coefficient_norm(exact);
        const double err = coefficient_norm(traj.states.back() - exact);
        doc["exact_relative_error"] = scale > 0.0 ? err / scale : err;
    }
    doc["convention"] = io::convention_block();

    io::write_csv(ctx.out / "trajectory.csv", io::trajectory_table(traj), io::convention_block());
    io::write_json(ctx.out / "simulate.json", doc);
    if (c.dump_state) io::write_state(ctx.out / "final_state.bin", traj.states.back(), traj.times.back());

    log_of(ctx) << "simulate: " << traj.size() << " samples, final l2 "
                << format_double(traj.diagnostics.back().l2) << "\n";
    return monotone && div <= 1e-12 ? kExitPass : kExitViolation;
}

int run_smoothing(const SmoothingConfig& c, const RunContext& ctx) {
    const TorusGrid g(c.solver.n);
    SpectralVectorField start = c.initial.build(g);
    if (c.T0 > 0.0) start = evolve(start, c.T0, c.solver).states.back();
    const double widest = c.deltas.back();
    const auto times = restart_time_grid(c.T0, widest, c.solver.dt, c.levels, c.deltas);
    const Trajectory v1 = evolve_on_grid(start, times, c.solver);
    std::optional<Trajectory> v2;
    if (c.pair_eps) {
        SpectralVectorField p = start + *c.pair_eps * seeded_perturbation(g, c.pair_seed, 3.0);
        p.divfree = true;
        v2 = evolve_on_grid(p, times, c.solver);
    }
    const SmoothingProfile prof = smoothing_profile(v1, v2 ? &*v2 : nullptr, c.T0, c.deltas);

    std::vector<double> xs, ys;
    bool monotone = true;
    double prev = 0.0;
    io::Table table;
    table.header = {"delta", "M_delta"};
    for (const auto& [d, M] : prof.M_of_delta) {
        if (M < prev) monotone = false;
        prev = M;
        if (M > 0.0) {
            xs.push_back(d);
            ys.push_back(M);
        }
        table.add_row({format_double(d), format_double(M)});
    }
    io::Table samples;
    samples.header = {"t", "linf", "weighted"};
    for (const auto& s : prof.samples) {
        samples.add_row({format_double(s.t), format_double(s.linf), format_double(s.weighted)});
    }

    ojson doc;
    doc["solver"] = to_ordered(solver_json(c.solver));
    doc["initial"] = to_ordered(c.initial.to_json());
    doc["T0"] = c.T0;
    doc["pair"] = c.pair_eps.has_value();
    doc["monotone"] = monotone;
    doc["M_smallest_delta"] = prof.M_of_delta.begin()->second;
    if (xs.size() >= 2) {
        const SlopeFit fit = loglog_fit(xs, ys);
        doc["slope"] = fit.slope;
        doc["intercept"] = fit.intercept;
    } else {
        doc["slope"] = nullptr;
        doc["intercept"] = nullptr;
    }
    doc["convention"] = io::convention_block();
    io::write_csv(ctx.out / "smoothing.csv", table, io::convention_block());
    io::write_csv(ctx.out / "smoothing_samples.csv", samples, io::convention_block());
    io::write_json(ctx.out / "smoothing.json", doc);

    log_of(ctx) << "smoothing: M monotone = " << (monotone ? "yes" : "no");
    if (xs.size() >= 2) log_of(ctx) << ", fitted slope " << format_double(doc["slope"].get<double>());
    log_of(ctx) << "\n";
    return monotone ? kExitPass : kExitViolation;
}

int run_stability(const StabilityConfig& c, const RunContext& ctx) {
    CampaignParams params = c.campaign;
    if (c.c_hat.value) {
        params.trial.C_hat = *c.c_hat.value;
        params.trial.C_hat_provenance = "user-supplied";
    } else {
        const KernelConstant C = estimate_kernel_constant(c.c_hat.t_values, c.c_hat.policy, ctx.threads);
        params.trial.C_hat = C.value;
        params.trial.C_hat_provenance = C.provenance;
    }
    const CampaignResult result = campaign(params, c.solver, ctx.threads);
    const std::size_t passed = result.passed();
    const std::size_t volterra = result.volterra_failures();

    const auto convention = io::convention_block(params.trial.C_hat_provenance);
    io::write_csv(ctx.out / "campaign.csv", io::campaign_table(result.reports), convention);
    for (const auto& r : result.reports) {
        ojson j = io::report_json(r);
        j["convention"] = convention;
        io::write_json(ctx.out / "trials" / ("trial_" + std::to_string(r.seed) + ".json"), j);
    }
    ojson doc;
    doc["solver"] = to_ordered(solver_json(c.solver));
    doc["trials"] = result.reports.size();
    doc["passed"] = passed;
    doc["volterra_failures"] = volterra;
    doc["C_hat"] = params.trial.C_hat;
    doc["C_hat_provenance"] = params.trial.C_hat_provenance;
    double min_margin = std::numeric_limits<double>::infinity();
    double max_kappa = 0.0;
    for (const auto& r : result.reports) {
        min_margin = std::min(min_margin, r.margin);
        max_kappa = std::max(max_kappa, r.kappa);
    }
    doc["min_margin"] = min_margin;
    doc["max_kappa"] = max_kappa;
    doc["convention"] = convention;
    io::write_json(ctx.out / "stability.json", doc);

    log_of(ctx) << "stability: " << passed << "/" << result.reports.size() << " trials pass, " << volterra
                << " Volterra failures, C_hat = " << format_double(params.trial.C_hat) << "\n";
    return passed == result.reports.size() && volterra == 0 ? kExitPass : kExitViolation;
}

int run_selftest(const SelftestConfig&, const RunContext& ctx) {
    std::vector<std::pair<std::string, bool>> checks;
    const TorusGrid g(32);

    checks.emplace_back("beta constant",
                        std::abs(beta_quadrature(0.3, 1.7, BetaRule::SubstitutionExact) - kPi) <= 1e-12);

    const SpectralVectorField tg = taylor_green(g, 1.0);
    checks.emplace_back("taylor-green nonlinearity vanishes", coefficient_norm(nonlinear_term(tg)) <= 1e-12);

    const SpectralVectorField r = random_divfree(g, 11, 2.0);
    const SpectralVectorField pr = leray_project(r);
    checks.emplace_back("leray projection idempotent", pr.coeffs == r.coeffs);

    ScalarField ind(g);
    for (int k = 0; k < 256; ++k) ind.values[k] = 1.0;
    const double a = 256.0 / g.size();
    const double want = std::pow(2.0 / 1.5, 1.0 / 1.5) * std::sqrt(a);
    checks.emplace_back("indicator Lorentz norm", std::abs(lorentz_norm(ind, 2.0, 1.5) - want) <= 1e-12 * want);

    ResolutionPolicy policy;
    policy.resolutions = {64, 128, 256, 512};
    const auto prof = kernel_norm_profile({0.25}, policy, 1);
    checks.emplace_back("kernel norm converges at t = 0.25", prof.converged_count() == 1);

    SolverConfig sc;
    sc.n = 32;
    sc.dt = 1e-3;
    const SpectralVectorField one = step(tg, 1e-3, sc);
    const SpectralVectorField exact = std::exp(-2.0 * kLaplaceScale * 1e-3) * tg;
    checks.emplace_back("taylor-green step exact",
                        coefficient_norm(one - exact) <= 1e-10 * coefficient_norm(exact));

    sc.dt = 2e-3;
    const Trajectory traj = evolve(scaled_to_l2(r, 1.0), 0.02, sc);
    checks.emplace_back("restart identity", restart_consistency(traj, traj.times[4]) <= 1e-12);

    ojson doc;
    bool all = true;
    for (const auto& [name, ok] : checks) {
        doc["checks"][name] = ok;
        all = all && ok;
        log_of(ctx) << (ok ? "PASS " : "FAIL ") << name << "\n";
    }
    doc["pass"] = all;
    doc["convention"] = io::convention_block();
    io::write_json(ctx.out / "selftest.json", doc);
    return all ? kExitPass : kExitViolation;
}

int dispatch(const std::string& command, const json& doc, const RunContext& ctx) {
    try {
        if (command == "kernel-bounds") return run_kernel_bounds(parse_kernel_bounds(doc), ctx);
        if (command == "lorentz") {
            auto c = parse_lorentz(doc);
            if (ctx.seed) apply_seed(c, *ctx.seed);
            return run_lorentz(c, ctx);
        }
        if (command == "simulate") {
            auto c = parse_simulate(doc);
            if (ctx.seed) apply_seed(c, *ctx.seed);
            return run_simulate(c, ctx);
        }
        if (command == "smoothing") {
            auto c = parse_smoothing(doc);
            if (ctx.seed) apply_seed(c, *ctx.seed);
            return run_smoothing(c, ctx);
        }
        if (command == "stability") {
            auto c = parse_stability(doc);
            if (ctx.seed) apply_seed(c, *ctx.seed);
            return run_stability(c, ctx);
        }
        if (command == "selftest") return run_selftest(parse_selftest(doc), ctx);
        throw ConfigError("$", "unknown command '" + command + "'");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConvergenceError& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return kExitNonConvergence;
    }
}

std::string columns_help(const std::string& command) {
    static const std::map<std::string, std::string> help{
        {"kernel-bounds",
         "kernel_profile.csv: t,n,l1,linf,sqrt_t_l1,t32_linf,rel_change,converged,truncated\n"
         "kernel_bounds.json: C_hat, t_range, convention"},
        {"lorentz",
         "lorentz.csv: field_id,p,r,norm,ratio,bound,pass\n"
         "lorentz_product.csv: pair_id,lhs,rhs_factor,ratio,product_l2_sq,linf_l2_sq,linf_l2_holds"},
        {"simulate", "trajectory.csv: t,l2,linf,energy; final_state.bin: binary state dump"},
        {"smoothing", "smoothing.csv: delta,M_delta; smoothing_samples.csv: t,linf,weighted"},
        {"stability",
         "campaign.csv: seed,T0,delta,eps,C_hat,M_delta,kappa,w0,sup_w,bound,margin,pass; "
         "trials/trial_<seed>.json"},
        {"selftest", "selftest.json"},
    };
    auto it = help.find(command);
    return it == help.end() ? std::string{} : it->second;
}

}  // namespace nsmild::cli
