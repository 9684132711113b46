#include "nsmild/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nsmild::io {
namespace {

constexpr char kMagic[8] = {'N', 'S', 'M', 'I', 'L', 'D', '0', '1'};

std::uint64_t to_le(std::uint64_t x) {
    if constexpr (std::endian::native == std::endian::little) return x;
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((x >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
}

void put_u64(std::string& out, std::uint64_t x) {
    x = to_le(x);
    char buf[8];
    std::memcpy(buf, &x, 8);
    out.append(buf, 8);
}

void put_f64(std::string& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

std::uint64_t get_u64(const std::string& in, std::size_t& pos) {
    if (pos + 8 > in.size()) throw std::runtime_error("state dump truncated");
    std::uint64_t x;
    std::memcpy(&x, in.data() + pos, 8);
    pos += 8;
    return to_le(x);
}

double get_f64(const std::string& in, std::size_t& pos) { return std::bit_cast<double>(get_u64(in, pos)); }

std::string fmt_bool(bool b) { return b ? "1" : "0"; }

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

json convention_block(const std::string& C_hat_provenance) {
    json c;
    c["domain"] = "unit torus R^2/Z^2";
    c["fourier_basis"] = "exp(2 pi i k.x)";
    c["forward_normalization"] = "1/n^2 (coefficients are Fourier series coefficients)";
    c["laplacian_symbol"] = "-4 pi^2 |k|^2";
    c["nyquist_modes"] = "zeroed in derivative and projection multipliers";
    c["norm_quadrature"] = "grid sums with cell measure 1/n^2";
    c["tensor_norm"] = "Frobenius";
    c["vector_norm"] = "Euclidean";
    c["C_hat_provenance"] = C_hat_provenance;
    return c;
}

void Table::add_row(std::vector<std::string> row) {
    if (row.size() != header.size()) throw std::logic_error("Table::add_row: column count mismatch");
    rows.push_back(std::move(row));
}

std::string render_csv(const Table& table, const json& convention) {
    std::ostringstream out;
    out << "# " << convention.dump() << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    return out.str();
}

void write_csv(const std::filesystem::path& path, const Table& table, const json& convention) {
    atomic_write(path, render_csv(table, convention));
}

void write_json(const std::filesystem::path& path, const json& doc) { atomic_write(path, doc.dump(2) + "\n"); }

Table kernel_profile_table(const KernelNormProfile& profile) {
    Table t;
    t.header = {"t", "n", "l1", "linf", "sqrt_t_l1", "t32_linf", "rel_change", "converged", "truncated"};
    for (const auto& e : profile.entries) {
        t.add_row({format_double(e.t), std::to_string(e.n), format_double(e.l1), format_double(e.linf),
                   format_double(e.sqrt_t_l1), format_double(e.t32_linf), format_double(e.rel_change),
                   fmt_bool(e.converged), fmt_bool(e.truncated)});
    }
    return t;
}

Table trajectory_table(const Trajectory& traj) {
    Table t;
    t.header = {"t", "l2", "linf", "energy"};
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& d = traj.diagnostics[i];
        t.add_row({format_double(traj.times[i]), format_double(d.l2), format_double(d.linf),
                   format_double(d.energy)});
    }
    return t;
}

Table campaign_table(const std::vector<StabilityReport>& reports) {
    Table t;
    t.header = {"seed", "T0", "delta", "eps", "C_hat", "M_delta", "kappa", "w0",
                "sup_w", "bound", "margin", "pass"};
    for (const auto& r : reports) {
        t.add_row({std::to_string(r.seed), format_double(r.T0), format_double(r.delta), format_double(r.eps),
                   format_double(r.C_hat), format_double(r.M_delta), format_double(r.kappa),
                   format_double(r.w0_norm), format_double(r.sup_w), format_double(r.bound),
                   format_double(r.margin), fmt_bool(r.pass)});
    }
    return t;
}

json report_json(const StabilityReport& r) {
    json j;
    j["seed"] = r.seed;
    j["T0"] = r.T0;
    j["delta"] = r.delta;
    j["delta_requested"] = r.delta_requested;
    j["halvings"] = r.halvings;
    j["eps"] = r.eps;
    j["C_hat"] = r.C_hat;
    j["C_hat_provenance"] = r.C_hat_provenance;
    j["M_delta"] = r.M_delta;
    j["kappa"] = r.kappa;
    j["w0_norm"] = r.w0_norm;
    j["sup_w"] = r.sup_w;
    j["bound"] = r.bound;
    j["margin"] = r.margin;
    j["verdict"] = r.pass ? "pass" : "fail";
    j["volterra_points"] = r.volterra_points;
    j["volterra_failures"] = r.volterra_failures;
    j["volterra_worst_ratio"] = r.volterra_worst_ratio;
    return j;
}

void write_state(const std::filesystem::path& path, const SpectralVectorField& v, double time) {
    const auto n = static_cast<std::uint64_t>(v.grid.n());
    std::string out(kMagic, 8);
    put_u64(out, n);
    put_f64(out, time);
    for (int m = 0; m < 2; ++m) {
        for (const Complex& c : v.coeffs[m]) {
            put_f64(out, c.real());
            put_f64(out, c.imag());
        }
    }
    atomic_write(path, out);
}

StateDump read_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open state dump " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 24 || std::memcmp(data.data(), kMagic, 8) != 0) {
        throw std::runtime_error("not a state dump: " + path.string());
    }
    std::size_t pos = 8;
    const auto n = get_u64(data, pos);
    if (n < 4 || n > (1u << 16)) throw std::runtime_error("state dump has invalid resolution");
    const double time = get_f64(data, pos);
    if (data.size() != 24 + 32 * n * n) throw std::runtime_error("state dump has wrong length");
    StateDump d{SpectralVectorField(TorusGrid(static_cast<int>(n))), time};
    for (int m = 0; m < 2; ++m) {
        for (auto& c : d.state.coeffs[m]) {
            const double re = get_f64(data, pos);
            const double im = get_f64(data, pos);
            c = Complex(re, im);
        }
    }
    d.state.divfree = divergence_residual(d.state) <= 1e-12 * std::max(1.0, coefficient_norm(d.state));
    return d;
}

}  // namespace nsmild::io
