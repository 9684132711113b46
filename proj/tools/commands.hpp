#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace nsmild::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitNonConvergence = 2;
inline constexpr int kExitConfig = 3;

struct RunContext {
    std::filesystem::path out = "out";
    int threads = 0;
    std::optional<std::uint64_t> seed;
    std::ostream* log = nullptr;
};

int run_kernel_bounds(const KernelBoundsConfig& c, const RunContext& ctx);
int run_lorentz(const LorentzConfig& c, const RunContext& ctx);
int run_simulate(const SimulateConfig& c, const RunContext& ctx);
int run_smoothing(const SmoothingConfig& c, const RunContext& ctx);
int run_stability(const StabilityConfig& c, const RunContext& ctx);
int run_selftest(const SelftestConfig& c, const RunContext& ctx);

/// Parse `doc` for `command`, apply the seed override and run.  Maps
/// ConfigError to 3 and ConvergenceError to 2.
int dispatch(const std::string& command, const json& doc, const RunContext& ctx);

/// CSV column documentation shown in --help.
std::string columns_help(const std::string& command);

}  // namespace nsmild::cli
