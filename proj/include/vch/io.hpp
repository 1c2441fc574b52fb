#pragma once

// File formats: field snapshots (text header + little-endian 64-bit floats in
// row-major order), per-run ledger tables and study summaries as
// comma-separated text, and plain two-column plot data.  All failures surface
// as io_error.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vch/dynamics.hpp"
#include "vch/errors.hpp"
#include "vch/grid.hpp"

namespace vch {

inline constexpr const char* kFieldFormatTag = "vch-field 1";

namespace detail {

inline void put_le_double(std::ostream& os, double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(b, 8);
}

inline double get_le_double(std::istream& is) {
    char b[8];
    is.read(b, 8);
    if (!is) throw io_error("field snapshot: truncated data block");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return std::bit_cast<double>(bits);
}

inline std::string format_full(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

} // namespace detail

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory " + dir.string() + ": " + ec.message());
}

struct FieldSnapshot {
    std::string name;
    double time = 0.0;
    Field field{Grid({3}, {1.0})};
};

inline void write_field_snapshot(const std::filesystem::path& path, const Field& f,
                                 const std::string& name, double time) {
    if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos)
        throw validation_error("field snapshot: name must be a single token");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot write field snapshot: " + path.string());
    const Grid& g = f.grid;
    os << kFieldFormatTag << "\n";
    os << "name " << name << "\n";
    os << "time " << detail::format_full(time) << "\n";
    os << "dims " << g.dims() << "\n";
    os << "extents";
    for (int a = 0; a < g.dims(); ++a) os << " " << g.extent(a);
    os << "\nspacing";
    for (int a = 0; a < g.dims(); ++a) os << " " << detail::format_full(g.spacing(a));
    os << "\norigin";
    for (int a = 0; a < g.dims(); ++a) os << " " << detail::format_full(g.origin(a));
    os << "\ndata\n";
    for (double x : f.v) detail::put_le_double(os, x);
    if (!os) throw io_error("write failed: " + path.string());
}

inline FieldSnapshot read_field_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot read field snapshot: " + path.string());
    std::string line;
    if (!std::getline(is, line) || line != kFieldFormatTag)
        throw io_error("field snapshot: bad format tag in " + path.string());

    FieldSnapshot snap;
    std::vector<std::size_t> extents;
    std::vector<double> spacing, origin;
    bool saw_data = false;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "data") {
            saw_data = true;
            break;
        } else if (key == "name") {
            ls >> snap.name;
        } else if (key == "time") {
            ls >> snap.time;
        } else if (key == "dims") {
            // informative; extents carry the authoritative rank
        } else if (key == "extents") {
            std::size_t n;
            while (ls >> n) extents.push_back(n);
        } else if (key == "spacing") {
            double h;
            while (ls >> h) spacing.push_back(h);
        } else if (key == "origin") {
            double x;
            while (ls >> x) origin.push_back(x);
        } else {
            throw io_error("field snapshot: unknown header line '" + line + "'");
        }
    }
    if (!saw_data || extents.empty() || spacing.size() != extents.size() ||
        origin.size() != extents.size() || snap.name.empty())
        throw io_error("field snapshot: incomplete header in " + path.string());

    Grid g(extents, spacing, origin);
    snap.field = Field(g);
    for (std::size_t i = 0; i < g.size(); ++i) snap.field.v[i] = detail::get_le_double(is);
    return snap;
}

inline void write_ledger_csv(const std::filesystem::path& path,
                             const std::vector<EnergyReport>& ledger) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write ledger: " + path.string());
    os << "t,energy,dissipation,mass,zeta_rate_dual,xi_residual_max\n";
    os.precision(17);
    for (const EnergyReport& row : ledger)
        os << row.t << "," << row.energy << "," << row.dissipation << "," << row.mass_total
           << "," << row.zeta_rate_dual << "," << row.xi_residual << "\n";
    if (!os) throw io_error("write failed: " + path.string());
}

// Generic comma-separated table with a header row.
inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write table: " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i)
        os << header[i] << (i + 1 < header.size() ? "," : "");
    os << "\n";
    os.precision(17);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "");
        os << "\n";
    }
    if (!os) throw io_error("write failed: " + path.string());
}

// Two bare columns (parameter, value), ready for any log-log plotting tool.
inline void write_plot_data(const std::filesystem::path& path,
                            const std::vector<std::pair<double, double>>& points) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write plot data: " + path.string());
    os.precision(17);
    for (const auto& [x, y] : points) os << x << " " << y << "\n";
    if (!os) throw io_error("write failed: " + path.string());
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot write file: " + path.string());
    os << text;
    if (!os) throw io_error("write failed: " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

// Writes the saved states of a trajectory as one snapshot file per field per
// saved step, named <prefix>_step<k>_<field>.bin.
inline void write_trajectory_snapshots(const std::filesystem::path& dir,
                                       const Trajectory& traj,
                                       const std::string& prefix = "run") {
    ensure_directory(dir);
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const State& s = traj.states[k];
        const std::string stem = prefix + "_step" + std::to_string(k);
        write_field_snapshot(dir / (stem + "_mu.bin"), s.mu, "mu", s.t);
        write_field_snapshot(dir / (stem + "_phi.bin"), s.phi, "phi", s.t);
        write_field_snapshot(dir / (stem + "_sigma.bin"), s.sigma, "sigma", s.t);
        write_field_snapshot(dir / (stem + "_xi.bin"), s.xi, "xi", s.t);
    }
}

} // namespace vch
