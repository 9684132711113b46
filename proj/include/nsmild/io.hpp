#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsmild/diagnostics.hpp"
#include "nsmild/oseen.hpp"
#include "nsmild/solver.hpp"

namespace nsmild::io {

using json = nlohmann::ordered_json;

/// Shortest round-trip text for a double ("%.17g"); inf/nan spelled out.
std::string format_double(double x);

/// Write to `path.tmp` then rename over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Fourier normalization, tensor norm and constant provenance, embedded in
/// every output file.
json convention_block(const std::string& C_hat_provenance = "none");

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

/// "# {convention json}" line, one header line, then comma-separated rows.
std::string render_csv(const Table& table, const json& convention);
void write_csv(const std::filesystem::path& path, const Table& table, const json& convention);
void write_json(const std::filesystem::path& path, const json& doc);

Table kernel_profile_table(const KernelNormProfile& profile);
Table trajectory_table(const Trajectory& traj);
Table campaign_table(const std::vector<StabilityReport>& reports);
json report_json(const StabilityReport& r);

/// Binary state: 8-byte magic "NSMILD01", uint64 n, float64 time, then the
/// two coefficient planes as n^2 (re, im) float64 pairs each, little-endian.
void write_state(const std::filesystem::path& path, const SpectralVectorField& v, double time);
struct StateDump {
    SpectralVectorField state;
    double time;
};
StateDump read_state(const std::filesystem::path& path);

}  // namespace nsmild::io
