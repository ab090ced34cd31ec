#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pcgl/core.hpp"
#include "pcgl/field.hpp"
#include "pcgl/integrator.hpp"
#include "pcgl/monitors.hpp"

namespace pcgl {

/// Shortest-exact decimal rendering used in every CSV: 17 significant
/// digits round-trip any binary64 value.
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// Field snapshots. Binary layout (little-endian):
//   magic "PCGL" | u32 version=1 | u32 dim | u32 nodes per axis
//   | f64 h per axis | row-major f64 pairs (u1, u2).
// CSV alternative: header-free rows "ix[,iy],u1,u2".
// ---------------------------------------------------------------------------

namespace detail {
template <class T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}
} // namespace detail

inline void save_field_binary(const Field& U, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail_invalid("save_field_binary: cannot open " + path);
    os.write("PCGL", 4);
    detail::write_pod<std::uint32_t>(os, 1u);
    detail::write_pod<std::uint32_t>(os, std::uint32_t(U.grid.dim));
    for (int a = 0; a < U.grid.dim; ++a)
        detail::write_pod<std::uint32_t>(os, std::uint32_t(U.grid.nodes[a]));
    for (int a = 0; a < U.grid.dim; ++a) detail::write_pod<double>(os, U.grid.h(a));
    for (const auto& x : U.v) {
        detail::write_pod<double>(os, x.u1);
        detail::write_pod<double>(os, x.u2);
    }
}

inline Field load_field_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail_invalid("load_field_binary: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "PCGL", 4) != 0)
        fail_invalid("load_field_binary: bad magic in " + path);
    auto version = detail::read_pod<std::uint32_t>(is);
    if (version != 1u) fail_invalid("load_field_binary: unsupported version");
    auto dim = detail::read_pod<std::uint32_t>(is);
    if (dim != 1u && dim != 2u) fail_invalid("load_field_binary: bad dim");
    int nodes[2] = {1, 1};
    for (std::uint32_t a = 0; a < dim; ++a) nodes[a] = int(detail::read_pod<std::uint32_t>(is));
    double h[2] = {1.0, 1.0};
    for (std::uint32_t a = 0; a < dim; ++a) h[a] = detail::read_pod<double>(is);

    Grid g = dim == 1 ? Grid::line(nodes[0], h[0] * (nodes[0] + 1))
                      : Grid::box(nodes[0], nodes[1], h[0] * (nodes[0] + 1), h[1] * (nodes[1] + 1));
    Field U(g);
    for (auto& x : U.v) {
        x.u1 = detail::read_pod<double>(is);
        x.u2 = detail::read_pod<double>(is);
    }
    if (!is) fail_invalid("load_field_binary: truncated file " + path);
    return U;
}

inline void save_field_csv(const Field& U, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail_invalid("save_field_csv: cannot open " + path);
    const int ny = U.grid.dim == 2 ? U.grid.nodes[1] : 1;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < U.grid.nodes[0]; ++ix) {
            Vec2 x = U.at(ix, U.grid.dim == 2 ? iy : 0);
            os << ix;
            if (U.grid.dim == 2) os << ',' << iy;
            os << ',' << format_g17(x.u1) << ',' << format_g17(x.u2) << '\n';
        }
}

/// Reads "ix[,iy],u1,u2" rows onto an existing grid (the CSV form carries
/// no geometry of its own).
inline Field load_field_csv(const std::string& path, const Grid& g) {
    std::ifstream is(path);
    if (!is) fail_invalid("load_field_csv: cannot open " + path);
    Field U(g);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        int ix = 0, iy = 0;
        double u1 = 0.0, u2 = 0.0;
        bool ok = g.dim == 2 ? bool(ss >> ix >> iy >> u1 >> u2) : bool(ss >> ix >> u1 >> u2);
        if (!ok || ix < 0 || ix >= g.nodes[0] || (g.dim == 2 && (iy < 0 || iy >= g.nodes[1])))
            fail_invalid("load_field_csv: bad row at line " + std::to_string(lineno));
        U.at(ix, g.dim == 2 ? iy : 0) = {u1, u2};
    }
    return U;
}

// ---------------------------------------------------------------------------
// CSV reports
// ---------------------------------------------------------------------------

inline void write_trace_csv(const EnergyTrace& tr, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail_invalid("write_trace_csv: cannot open " + path);
    os << "step,t,l2sq,phi,psi,pairing,key_ratio,residual\n";
    for (const auto& e : tr.entries)
        os << e.step << ',' << format_g17(e.t) << ',' << format_g17(e.l2sq) << ','
           << format_g17(e.phi) << ',' << format_g17(e.psi) << ',' << format_g17(e.pairing) << ','
           << format_g17(e.key_ratio) << ',' << format_g17(e.residual) << '\n';
}

inline void write_reports_csv(const std::vector<CheckReport>& reports, const std::string& path) {
    std::ofstream os(path);
    if (!os) fail_invalid("write_reports_csv: cannot open " + path);
    os << "name,lhs,rhs,margin,passed\n";
    for (const auto& r : reports)
        os << r.name << ',' << format_g17(r.lhs) << ',' << format_g17(r.rhs) << ','
           << format_g17(r.margin) << ',' << (r.passed ? 1 : 0) << '\n';
}

} // namespace pcgl
