#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pcgl/core.hpp"
#include "pcgl/field.hpp"
#include "pcgl/integrator.hpp"
#include "pcgl/io.hpp"
#include "pcgl/params.hpp"

namespace pcgl {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Deterministic normal deviates (xorshift-free: mt19937_64 + Box-Muller
/// on explicit 53-bit uniforms, so output is pinned across library
/// implementations).
class NoiseSource {
  public:
    explicit NoiseSource(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    double uniform() { // [0, 1)
        return double(next() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_) {
            have_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(6.283185307179586477 * u2);
        have_ = true;
        return r * std::cos(6.283185307179586477 * u2);
    }

  private:
    std::uint64_t next() { // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_ = false;
};

struct GridSpec {
    int dim = 1;
    int nx = 31, ny = 31;
    double extent_x = 1.0, extent_y = 1.0;

    Grid build() const {
        return dim == 1 ? Grid::line(nx, extent_x) : Grid::box(nx, ny, extent_x, extent_y);
    }
};

struct InitialSpec {
    std::string kind = "zero"; // zero | bump | noise | mode | file
    double center_x = 0.5, center_y = 0.5;
    double width = 0.5;
    double amplitude = 1.0;
    int winding = 0;           // bump phase turns across the x-extent
    int mode_k = 1;            // sine index for kind=mode
    std::uint64_t seed = 1;
    int noise_blocks = 0;      // > 0: piecewise-constant noise on that many
                               // blocks per axis, independent of the grid
    std::string path;
};

struct ForcingSpec {
    std::string kind = "zero"; // zero | constant | file
    double f1 = 0.0, f2 = 0.0;
    std::string path;
};

struct OutputSpec {
    std::string dir = "out";
    int stride = 0; // snapshot stride; 0 = initial and final only
};

struct ExhaustionSpec {
    std::vector<double> widths = {4.0, 8.0, 16.0};
    double h = 0.125;
};

struct RunConfig {
    ParamSet params;
    GridSpec grid;
    SchemeConfig scheme;
    InitialSpec initial;
    ForcingSpec forcing;
    OutputSpec output;
    ExhaustionSpec exhaustion;

    bool operator==(const RunConfig&) const = default;
};

inline bool operator==(const ParamSet& a, const ParamSet& b) {
    return a.lambda == b.lambda && a.kappa == b.kappa && a.alpha == b.alpha && a.beta == b.beta
        && a.gamma == b.gamma && a.p == b.p && a.q == b.q && a.N == b.N;
}
inline bool operator==(const GridSpec& a, const GridSpec& b) {
    return a.dim == b.dim && a.nx == b.nx && a.ny == b.ny && a.extent_x == b.extent_x
        && a.extent_y == b.extent_y;
}
inline bool operator==(const SchemeConfig& a, const SchemeConfig& b) {
    return a.scheme == b.scheme && a.dt == b.dt && a.T == b.T && a.mu == b.mu && a.nu == b.nu
        && a.prox.tol_abs == b.prox.tol_abs && a.prox.tol_rel == b.prox.tol_rel
        && a.prox.max_iter == b.prox.max_iter && a.prox.sigma_reg == b.prox.sigma_reg
        && a.step_tol == b.step_tol && a.step_max_iter == b.step_max_iter
        && a.step_relax == b.step_relax;
}
inline bool operator==(const InitialSpec& a, const InitialSpec& b) {
    return a.kind == b.kind && a.center_x == b.center_x && a.center_y == b.center_y
        && a.width == b.width && a.amplitude == b.amplitude && a.winding == b.winding
        && a.mode_k == b.mode_k && a.seed == b.seed && a.noise_blocks == b.noise_blocks
        && a.path == b.path;
}
inline bool operator==(const ForcingSpec& a, const ForcingSpec& b) {
    return a.kind == b.kind && a.f1 == b.f1 && a.f2 == b.f2 && a.path == b.path;
}
inline bool operator==(const OutputSpec& a, const OutputSpec& b) {
    return a.dir == b.dir && a.stride == b.stride;
}
inline bool operator==(const ExhaustionSpec& a, const ExhaustionSpec& b) {
    return a.widths == b.widths && a.h == b.h;
}

namespace detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

struct KeyValue {
    std::string section, key, value;
    int line = 0;
};

inline std::vector<KeyValue> tokenize_config(std::istream& is) {
    std::vector<KeyValue> out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        out.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
    }
    return out;
}

inline double parse_double(const KeyValue& kv) {
    try {
        std::size_t pos = 0;
        double v = std::stod(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(kv.line) + ": key '" + kv.key
                          + "' needs a numeric value, got '" + kv.value + "'");
    }
}

inline long long parse_int(const KeyValue& kv) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(kv.value, &pos);
        if (pos != kv.value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(kv.line) + ": key '" + kv.key
                          + "' needs an integer value, got '" + kv.value + "'");
    }
}

inline std::vector<double> parse_list(const KeyValue& kv) {
    std::vector<double> out;
    std::stringstream ss(kv.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        KeyValue sub = kv;
        sub.value = trim(item);
        out.push_back(parse_double(sub));
    }
    if (out.empty())
        throw ConfigError("line " + std::to_string(kv.line) + ": key '" + kv.key + "' needs a list");
    return out;
}

} // namespace detail

inline RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    for (const auto& kv : detail::tokenize_config(is)) {
        const std::string id = kv.section + "." + kv.key;
        auto bad_key = [&]() {
            throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + id + "'");
        };
        if (kv.section == "params") {
            if (kv.key == "lambda") cfg.params.lambda = detail::parse_double(kv);
            else if (kv.key == "kappa") cfg.params.kappa = detail::parse_double(kv);
            else if (kv.key == "alpha") cfg.params.alpha = detail::parse_double(kv);
            else if (kv.key == "beta") cfg.params.beta = detail::parse_double(kv);
            else if (kv.key == "gamma") cfg.params.gamma = detail::parse_double(kv);
            else if (kv.key == "p") cfg.params.p = detail::parse_double(kv);
            else if (kv.key == "q") cfg.params.q = detail::parse_double(kv);
            else bad_key();
        } else if (kv.section == "grid") {
            if (kv.key == "dim") cfg.grid.dim = int(detail::parse_int(kv));
            else if (kv.key == "nx") cfg.grid.nx = int(detail::parse_int(kv));
            else if (kv.key == "ny") cfg.grid.ny = int(detail::parse_int(kv));
            else if (kv.key == "extent_x") cfg.grid.extent_x = detail::parse_double(kv);
            else if (kv.key == "extent_y") cfg.grid.extent_y = detail::parse_double(kv);
            else bad_key();
        } else if (kv.section == "scheme") {
            if (kv.key == "scheme") {
                if (kv.value == "imex") cfg.scheme.scheme = Scheme::ImexSplit;
                else if (kv.value == "implicit") cfg.scheme.scheme = Scheme::FullyImplicit;
                else throw ConfigError("line " + std::to_string(kv.line)
                                       + ": scheme must be 'imex' or 'implicit'");
            }
            else if (kv.key == "dt") cfg.scheme.dt = detail::parse_double(kv);
            else if (kv.key == "T") cfg.scheme.T = detail::parse_double(kv);
            else if (kv.key == "mu") cfg.scheme.mu = detail::parse_double(kv);
            else if (kv.key == "nu") cfg.scheme.nu = detail::parse_double(kv);
            else if (kv.key == "prox_tol") cfg.scheme.prox.tol_abs = detail::parse_double(kv);
            else if (kv.key == "prox_tol_rel") cfg.scheme.prox.tol_rel = detail::parse_double(kv);
            else if (kv.key == "prox_max_iter") cfg.scheme.prox.max_iter = int(detail::parse_int(kv));
            else if (kv.key == "sigma_reg") cfg.scheme.prox.sigma_reg = detail::parse_double(kv);
            else if (kv.key == "step_tol") cfg.scheme.step_tol = detail::parse_double(kv);
            else if (kv.key == "step_max_iter") cfg.scheme.step_max_iter = int(detail::parse_int(kv));
            else if (kv.key == "step_relax") cfg.scheme.step_relax = detail::parse_double(kv);
            else bad_key();
        } else if (kv.section == "initial") {
            if (kv.key == "kind") cfg.initial.kind = kv.value;
            else if (kv.key == "center_x") cfg.initial.center_x = detail::parse_double(kv);
            else if (kv.key == "center_y") cfg.initial.center_y = detail::parse_double(kv);
            else if (kv.key == "width") cfg.initial.width = detail::parse_double(kv);
            else if (kv.key == "amplitude") cfg.initial.amplitude = detail::parse_double(kv);
            else if (kv.key == "winding") cfg.initial.winding = int(detail::parse_int(kv));
            else if (kv.key == "mode_k") cfg.initial.mode_k = int(detail::parse_int(kv));
            else if (kv.key == "seed") cfg.initial.seed = std::uint64_t(detail::parse_int(kv));
            else if (kv.key == "noise_blocks") cfg.initial.noise_blocks = int(detail::parse_int(kv));
            else if (kv.key == "path") cfg.initial.path = kv.value;
            else bad_key();
        } else if (kv.section == "forcing") {
            if (kv.key == "kind") cfg.forcing.kind = kv.value;
            else if (kv.key == "f1") cfg.forcing.f1 = detail::parse_double(kv);
            else if (kv.key == "f2") cfg.forcing.f2 = detail::parse_double(kv);
            else if (kv.key == "path") cfg.forcing.path = kv.value;
            else bad_key();
        } else if (kv.section == "output") {
            if (kv.key == "dir") cfg.output.dir = kv.value;
            else if (kv.key == "stride") cfg.output.stride = int(detail::parse_int(kv));
            else bad_key();
        } else if (kv.section == "exhaustion") {
            if (kv.key == "widths") cfg.exhaustion.widths = detail::parse_list(kv);
            else if (kv.key == "h") cfg.exhaustion.h = detail::parse_double(kv);
            else bad_key();
        } else {
            bad_key();
        }
    }
    cfg.params.N = cfg.grid.dim;
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(is);
}

/// Materializes the configured initial state on the grid.
inline Field build_initial(const InitialSpec& spec, const Grid& g) {
    Field U(g);
    if (spec.kind == "zero") return U;
    if (spec.kind == "file") {
        if (!std::filesystem::exists(spec.path))
            throw ConfigError("initial.path does not exist: " + spec.path);
        if (spec.path.size() > 4 && spec.path.substr(spec.path.size() - 4) == ".csv")
            return load_field_csv(spec.path, g);
        Field loaded = load_field_binary(spec.path);
        if (!loaded.grid.same_layout(g)) throw ConfigError("initial.path grid does not match config");
        return loaded;
    }
    if (spec.kind == "noise") {
        NoiseSource rng(spec.seed);
        if (spec.noise_blocks <= 0) {
            for (auto& x : U.v) {
                x.u1 = spec.amplitude * rng.normal();
                x.u2 = spec.amplitude * rng.normal();
            }
            return U;
        }
        // grid-independent roughness: one draw per block, nodes sample it
        const int nb = spec.noise_blocks;
        std::vector<Vec2> table(std::size_t(nb) * (g.dim == 2 ? nb : 1));
        for (auto& x : table) {
            x.u1 = spec.amplitude * rng.normal();
            x.u2 = spec.amplitude * rng.normal();
        }
        const int ny = g.dim == 2 ? g.nodes[1] : 1;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < g.nodes[0]; ++ix) {
                auto block = [&](int axis, int i) {
                    double frac = (g.node_coord(axis, i) - g.offset[axis]) / g.extent[axis];
                    return std::min(nb - 1, int(frac * nb));
                };
                int bx = block(0, ix);
                int by = g.dim == 2 ? block(1, iy) : 0;
                U.at(ix, g.dim == 2 ? iy : 0) = table[std::size_t(by) * nb + bx];
            }
        return U;
    }
    if (spec.kind == "mode") {
        const double pi = 3.14159265358979323846;
        const int ny = g.dim == 2 ? g.nodes[1] : 1;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < g.nodes[0]; ++ix) {
                double sx = std::sin(spec.mode_k * pi * (ix + 1) / (g.nodes[0] + 1));
                double sy = g.dim == 2 ? std::sin(spec.mode_k * pi * (iy + 1) / (g.nodes[1] + 1))
                                       : 1.0;
                U.at(ix, g.dim == 2 ? iy : 0) = Vec2{spec.amplitude * sx * sy, 0.0};
            }
        return U;
    }
    if (spec.kind == "bump") {
        auto profile = [&](double s, double center, double width) {
            double z = (s - center) / width;
            if (std::abs(z) >= 0.5) return 0.0;
            double c = std::cos(3.14159265358979323846 * z);
            return c * c;
        };
        const int ny = g.dim == 2 ? g.nodes[1] : 1;
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < g.nodes[0]; ++ix) {
                double x = g.node_coord(0, ix);
                double b = profile(x, spec.center_x, spec.width);
                if (g.dim == 2) b *= profile(g.node_coord(1, iy), spec.center_y, spec.width);
                double theta = spec.winding == 0
                                   ? 0.0
                                   : 2.0 * 3.14159265358979323846 * spec.winding * x / g.extent[0];
                U.at(ix, g.dim == 2 ? iy : 0) =
                    Vec2{spec.amplitude * b * std::cos(theta), spec.amplitude * b * std::sin(theta)};
            }
        return U;
    }
    throw ConfigError("initial.kind must be zero|bump|noise|mode|file, got '" + spec.kind + "'");
}

inline Forcing build_forcing(const ForcingSpec& spec, const Grid& g) {
    if (spec.kind == "zero") return Forcing::zero();
    if (spec.kind == "constant") {
        Field f(g);
        for (auto& x : f.v) x = Vec2{spec.f1, spec.f2};
        return Forcing::steady(std::move(f));
    }
    if (spec.kind == "file") {
        if (!std::filesystem::exists(spec.path))
            throw ConfigError("forcing.path does not exist: " + spec.path);
        if (spec.path.size() > 4 && spec.path.substr(spec.path.size() - 4) == ".csv")
            return Forcing::steady(load_field_csv(spec.path, g));
        Field f = load_field_binary(spec.path);
        if (!f.grid.same_layout(g)) throw ConfigError("forcing.path grid does not match config");
        return Forcing::steady(std::move(f));
    }
    throw ConfigError("forcing.kind must be zero|constant|file, got '" + spec.kind + "'");
}

/// Echo of the effective configuration; re-parsing it reproduces the
/// RunConfig exactly (doubles are rendered with 17 significant digits).
inline std::string render_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[params]\n";
    os << "lambda = " << format_g17(c.params.lambda) << "\n";
    os << "kappa = " << format_g17(c.params.kappa) << "\n";
    os << "alpha = " << format_g17(c.params.alpha) << "\n";
    os << "beta = " << format_g17(c.params.beta) << "\n";
    os << "gamma = " << format_g17(c.params.gamma) << "\n";
    os << "p = " << format_g17(c.params.p) << "\n";
    os << "q = " << format_g17(c.params.q) << "\n";
    os << "[grid]\n";
    os << "dim = " << c.grid.dim << "\n";
    os << "nx = " << c.grid.nx << "\n";
    os << "ny = " << c.grid.ny << "\n";
    os << "extent_x = " << format_g17(c.grid.extent_x) << "\n";
    os << "extent_y = " << format_g17(c.grid.extent_y) << "\n";
    os << "[scheme]\n";
    os << "scheme = " << (c.scheme.scheme == Scheme::ImexSplit ? "imex" : "implicit") << "\n";
    os << "dt = " << format_g17(c.scheme.dt) << "\n";
    os << "T = " << format_g17(c.scheme.T) << "\n";
    os << "mu = " << format_g17(c.scheme.mu) << "\n";
    os << "nu = " << format_g17(c.scheme.nu) << "\n";
    os << "prox_tol = " << format_g17(c.scheme.prox.tol_abs) << "\n";
    os << "prox_tol_rel = " << format_g17(c.scheme.prox.tol_rel) << "\n";
    os << "prox_max_iter = " << c.scheme.prox.max_iter << "\n";
    os << "sigma_reg = " << format_g17(c.scheme.prox.sigma_reg) << "\n";
    os << "step_tol = " << format_g17(c.scheme.step_tol) << "\n";
    os << "step_max_iter = " << c.scheme.step_max_iter << "\n";
    os << "step_relax = " << format_g17(c.scheme.step_relax) << "\n";
    os << "[initial]\n";
    os << "kind = " << c.initial.kind << "\n";
    os << "center_x = " << format_g17(c.initial.center_x) << "\n";
    os << "center_y = " << format_g17(c.initial.center_y) << "\n";
    os << "width = " << format_g17(c.initial.width) << "\n";
    os << "amplitude = " << format_g17(c.initial.amplitude) << "\n";
    os << "winding = " << c.initial.winding << "\n";
    os << "mode_k = " << c.initial.mode_k << "\n";
    os << "seed = " << c.initial.seed << "\n";
    os << "noise_blocks = " << c.initial.noise_blocks << "\n";
    if (!c.initial.path.empty()) os << "path = " << c.initial.path << "\n";
    os << "[forcing]\n";
    os << "kind = " << c.forcing.kind << "\n";
    os << "f1 = " << format_g17(c.forcing.f1) << "\n";
    os << "f2 = " << format_g17(c.forcing.f2) << "\n";
    if (!c.forcing.path.empty()) os << "path = " << c.forcing.path << "\n";
    os << "[output]\n";
    os << "dir = " << c.output.dir << "\n";
    os << "stride = " << c.output.stride << "\n";
    os << "[exhaustion]\n";
    os << "widths = ";
    for (std::size_t i = 0; i < c.exhaustion.widths.size(); ++i)
        os << (i ? "," : "") << format_g17(c.exhaustion.widths[i]);
    os << "\n";
    os << "h = " << format_g17(c.exhaustion.h) << "\n";
    return os.str();
}

} // namespace pcgl
