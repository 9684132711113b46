#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsmild/diagnostics.hpp"
#include "nsmild/oseen.hpp"
#include "nsmild/solver.hpp"

namespace nsmild::cli {

using json = nlohmann::json;

struct InitialSpec {
    enum class Type { TaylorGreen, Random, Zero } type = Type::TaylorGreen;
    double amplitude = 1.0;
    std::uint64_t seed = 1;
    double sigma = 3.0;
    double l2 = 1.0;

    SpectralVectorField build(const TorusGrid& g) const;
    json to_json() const;
};

struct KernelBoundsConfig {
    std::vector<double> t_values;
    ResolutionPolicy policy;
};

struct LorentzConfig {
    int n = 64;
    std::uint64_t first_seed = 1;
    int fields = 100;
    std::vector<double> q_values{1.1, 1.5, 1.9};
    int product_pairs = 100;
};

struct SimulateConfig {
    SolverConfig solver;
    InitialSpec initial;
    double t_end = 0.1;
    bool dump_state = true;
};

struct SmoothingConfig {
    SolverConfig solver;
    InitialSpec initial;
    double T0 = 0.0;
    std::vector<double> deltas;
    int levels = 24;
    /// When set, M(delta) is taken over the pair (v, v + eps p).
    std::optional<double> pair_eps;
    std::uint64_t pair_seed = 1;
};

struct CHatSpec {
    std::optional<double> value;  ///< user-supplied; otherwise estimated
    std::vector<double> t_values;
    ResolutionPolicy policy;
};

struct StabilityConfig {
    SolverConfig solver;
    CampaignParams campaign;
    CHatSpec c_hat;
};

struct SelftestConfig {};

/// Parse a JSON document; syntax errors become ConfigError at path "$".
json load_document(const std::filesystem::path& path);

// Each parser validates the whole document before returning and throws
// ConfigError with a dotted field path (e.g. "solver.dt") on the first
// problem, including unknown keys.
KernelBoundsConfig parse_kernel_bounds(const json& doc);
LorentzConfig parse_lorentz(const json& doc);
SimulateConfig parse_simulate(const json& doc);
SmoothingConfig parse_smoothing(const json& doc);
StabilityConfig parse_stability(const json& doc);
SelftestConfig parse_selftest(const json& doc);

void apply_seed(LorentzConfig& c, std::uint64_t seed);
void apply_seed(SimulateConfig& c, std::uint64_t seed);
void apply_seed(SmoothingConfig& c, std::uint64_t seed);
void apply_seed(StabilityConfig& c, std::uint64_t seed);

json solver_json(const SolverConfig& c);

}  // namespace nsmild::cli
