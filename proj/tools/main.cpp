#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "nsmild/errors.hpp"

int main(int argc, char** argv) {
    using namespace nsmild::cli;

    CLI::App app{"Mild-solution diagnostics for 2D Navier-Stokes on the unit torus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    int threads = 0;
    std::uint64_t seed = 0;

    const char* names[] = {"kernel-bounds", "lorentz", "simulate", "smoothing", "stability", "selftest"};
    const char* about[] = {
        "Oseen kernel L1/Linf profile and the constant C_hat",
        "Lorentz norms, embedding and product checks on a seeded corpus",
        "Evolve initial data and record l2/linf/energy",
        "Smoothing functional M(delta) and its log-log slope",
        "Seeded restart-stability campaign",
        "Fast internal consistency checks",
    };
    std::vector<CLI::Option*> seed_opts;
    for (int i = 0; i < 6; ++i) {
        auto* sub = app.add_subcommand(names[i], about[i]);
        sub->footer("Output columns:\n" + columns_help(names[i]));
        sub->add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--threads", threads, "Worker threads (0 = auto)")->check(CLI::NonNegativeNumber);
        seed_opts.push_back(sub->add_option("--seed", seed, "Seed override"));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    RunContext ctx;
    ctx.out = out_dir;
    ctx.threads = threads;
    for (auto* o : seed_opts) {
        if (o->count() > 0) ctx.seed = seed;
    }

    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) {
        try {
            doc = load_document(config_path);
        } catch (const nsmild::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfig;
        }
    }
    try {
        return dispatch(command, doc, ctx);
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNonConvergence;
    }
}
