// Command-line laboratory driver: simulate the planar Ginzburg-Landau
// flow, test parameter-region membership, and run the verification
// suites. See README.md for the config format.

#include <CLI11.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pcgl/pcgl.hpp"

namespace fs = std::filesystem;
using namespace pcgl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolverFailure = 2;
constexpr int kExitOutsideRegion = 3;

struct SweepRow {
    std::string check;
    double p = 0.0, q = 0.0;
    long samples = 0;
    long failures = 0;
    double min_margin = std::numeric_limits<double>::infinity();

    void absorb(const CheckReport& r) {
        ++samples;
        if (!r.passed) ++failures;
        min_margin = std::min(min_margin, r.margin);
    }
};

void write_sweep_csv(const std::vector<SweepRow>& rows, const fs::path& path) {
    std::ofstream os(path);
    os << "check,p,q,samples,failures,min_margin\n";
    for (const auto& r : rows)
        os << r.check << ',' << format_g17(r.p) << ',' << format_g17(r.q) << ',' << r.samples << ','
           << r.failures << ',' << format_g17(r.min_margin) << '\n';
}

fs::path prepare_output_dir(const RunConfig& cfg) {
    fs::path dir(cfg.output.dir);
    fs::create_directories(dir);
    std::ofstream echo(dir / "effective_config.cfg");
    echo << render_config(cfg);
    return dir;
}

int cmd_simulate(const std::string& config_path) {
    RunConfig cfg = parse_config_file(config_path);
    fs::path dir = prepare_output_dir(cfg);
    Grid g = cfg.grid.build();
    Field U0 = build_initial(cfg.initial, g);
    Forcing F = build_forcing(cfg.forcing, g);

    Trajectory traj = simulate(U0, cfg.scheme, cfg.params, F, cfg.output.stride);
    write_trace_csv(traj.trace, (dir / "trace.csv").string());
    int idx = 0;
    for (const auto& [t, field] : traj.snapshots) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%04d.pcgl", idx++);
        save_field_binary(field, (dir / name).string());
    }
    if (!traj.completed) {
        std::cerr << "simulate: aborted (" << traj.failure << "); partial outputs in " << dir
                  << "\n";
        return kExitSolverFailure;
    }
    std::cout << "simulate: " << traj.trace.entries.size() - 1 << " steps, final |U|^2 = "
              << format_g17(traj.trace.entries.back().l2sq) << ", outputs in " << dir << "\n";
    return kExitOk;
}

int cmd_check_region(double lambda, double kappa, double alpha, double beta, double q,
                     const std::string& raster_path, double raster_range, int raster_n) {
    ParamSet ps;
    ps.lambda = lambda;
    ps.kappa = kappa;
    ps.alpha = alpha;
    ps.beta = beta;
    ps.q = q;
    auto v = find_witness(ps);

    std::cout << (v.inside ? "inside" : "outside");
    std::cout << " sets=";
    bool first = true;
    for (auto s : v.matched_sets) {
        std::cout << (first ? "" : "+") << region_set_name(s);
        first = false;
    }
    if (v.matched_sets.empty()) std::cout << "none";
    std::cout << " discriminant=" << format_g17(v.discriminant);
    if (v.witness)
        std::cout << " witness_delta=" << format_g17(v.witness->delta)
                  << " witness_epsilon=" << format_g17(v.witness->epsilon)
                  << " J=" << format_g17(v.witness->J);
    std::cout << "\n";

    if (!raster_path.empty()) {
        const double r = q > 2.0 ? 1.0 / strength_constant(q)
                                 : std::numeric_limits<double>::infinity();
        std::ofstream os(raster_path);
        os << "x,y,inside,discriminant\n";
        for (int iy = 0; iy < raster_n; ++iy)
            for (int ix = 0; ix < raster_n; ++ix) {
                double x = -raster_range + 2.0 * raster_range * ix / (raster_n - 1);
                double y = -raster_range + 2.0 * raster_range * iy / (raster_n - 1);
                auto cell = cgl_region_test(x, y, r);
                double d4 = (1.0 + (std::isinf(r) ? 0.0 : r * r)) * lambda * kappa;
                if (!std::isinf(r))
                    d4 -= (r * kappa - std::abs(y * kappa)) * (r * lambda - std::abs(x * lambda));
                os << format_g17(x) << ',' << format_g17(y) << ',' << (cell.inside ? 1 : 0) << ','
                   << format_g17(d4) << '\n';
            }
    }
    return v.inside ? kExitOk : kExitOutsideRegion;
}

int run_identities_suite(const RunConfig& cfg, const fs::path& dir) {
    std::vector<CheckReport> reports;
    Grid g = cfg.grid.build();
    NoiseSource rng(cfg.initial.seed);
    ParamSet ps = cfg.params;

    for (int trial = 0; trial < 200; ++trial) {
        Field U(g);
        for (auto& x : U.v) {
            x.u1 = 2.0 * rng.uniform() - 1.0;
            x.u2 = 2.0 * rng.uniform() - 1.0;
        }
        double mu = 0.05 + rng.uniform();
        double nu = 0.005 + 0.02 * rng.uniform();
        ProxOpts prox;
        prox.tol_abs = 1e-12;
        auto orth = check_orthogonality_suite(U, mu, nu, ps, prox);
        reports.insert(reports.end(), orth.begin(), orth.end());

        // Yosida identity for the potential part: (U - J U)/mu = dpsi(J U)
        Field J = resolvent_psi(U, mu, ps.q);
        Field lhs = yosida_psi(U, mu, ps.q);
        Field rhs = dpsi(J, ps.q);
        lhs -= rhs;
        double scale = std::max(field_norm_l2(rhs), 1e-30);
        reports.push_back(CheckReport::identity("yosida_identity", field_norm_l2(lhs), 0.0,
                                                1e-10 * scale));

        std::array<double, 4> G;
        for (auto& x : G) x = 2.0 * rng.uniform() - 1.0;
        Vec2 V{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
        reports.push_back(check_projection_identity(V, std::span<const double>(G.data(), 4)));

        reports.push_back(check_key_inequality(U, trial % 2 == 0 ? 0.0 : mu, ps));
        reports.push_back(check_resolvent_comparisons(U, mu, ps.q));
    }

    write_reports_csv(reports, (dir / "identities_report.csv").string());
    long fails = 0;
    for (const auto& r : reports)
        if (!r.passed) ++fails;
    std::cout << "identities: " << reports.size() << " checks, " << fails << " failures\n";
    return fails == 0 ? kExitOk : kExitUsage;
}

int run_energies_suite(const RunConfig& cfg, const fs::path& dir) {
    Grid g = cfg.grid.build();
    Field U0 = build_initial(cfg.initial, g);
    Forcing F = build_forcing(cfg.forcing, g);
    Trajectory traj = simulate(U0, cfg.scheme, cfg.params, F, 0);
    if (!traj.completed) {
        std::cerr << "energies: simulation failed (" << traj.failure << ")\n";
        return kExitSolverFailure;
    }
    std::vector<CheckReport> reports;
    reports.push_back(check_first_energy(traj.trace, cfg.params));
    reports.push_back(check_gronwall(traj.trace, cfg.params));
    reports.push_back(check_second_energy(traj.trace, cfg.params, find_witness(cfg.params)));
    write_reports_csv(reports, (dir / "energies_report.csv").string());
    long fails = 0;
    for (const auto& r : reports) {
        std::cout << r.name << (r.passed ? " pass" : " FAIL") << " margin=" << format_g17(r.margin)
                  << "\n";
        if (!r.passed) ++fails;
    }
    return fails == 0 ? kExitOk : kExitUsage;
}

int run_smoothing_suite(const RunConfig& cfg, const fs::path& dir) {
    RunConfig coarse = cfg;
    coarse.initial.kind = "noise";
    if (coarse.initial.noise_blocks <= 0) coarse.initial.noise_blocks = 16;
    if (coarse.scheme.nu == 0.0) coarse.scheme.nu = 0.05; // Lipschitz couplings for rough data
    if (coarse.scheme.mu == 0.0) coarse.scheme.mu = 0.05;
    Grid gc = coarse.grid.build();
    Field U0c = build_initial(coarse.initial, gc);

    RunConfig fine = coarse;
    fine.grid.nx = 2 * coarse.grid.nx + 1;
    fine.grid.ny = 2 * coarse.grid.ny + 1;
    fine.scheme.dt = 0.5 * coarse.scheme.dt;
    Grid gf = fine.grid.build();
    Field U0f = build_initial(fine.initial, gf);

    Forcing F = Forcing::zero();
    Trajectory tc = simulate(U0c, coarse.scheme, coarse.params, F, 0);
    Trajectory tf = simulate(U0f, fine.scheme, fine.params, F, 0);
    if (!tc.completed || !tf.completed) {
        std::cerr << "smoothing: simulation failed\n";
        return kExitSolverFailure;
    }
    std::vector<CheckReport> reports;
    reports.push_back(check_smoothing(tc.trace, coarse.params));
    reports.push_back(check_smoothing(tf.trace, fine.params));
    reports.push_back(check_smoothing_refinement(tc.trace, tf.trace));
    write_reports_csv(reports, (dir / "smoothing_report.csv").string());
    long fails = 0;
    for (const auto& r : reports) {
        std::cout << r.name << (r.passed ? " pass" : " FAIL") << "\n";
        if (!r.passed) ++fails;
    }
    return fails == 0 ? kExitOk : kExitUsage;
}

int run_clarkson_suite(const RunConfig& cfg, const fs::path& dir) {
    NoiseSource rng(cfg.initial.seed + 17);
    Grid g = Grid::box(4, 4, 1.0, 1.0);
    std::vector<SweepRow> rows;
    auto random_field = [&](double amp) {
        Field U(g);
        for (auto& x : U.v) {
            x.u1 = amp * (2.0 * rng.uniform() - 1.0);
            x.u2 = amp * (2.0 * rng.uniform() - 1.0);
        }
        return U;
    };

    const long n = 20000;
    for (double p : {2.0, 3.0, 4.0}) {
        SweepRow row{"clarkson_first", p, 0.0};
        for (long i = 0; i < n; ++i)
            row.absorb(clarkson_first(random_field(2.0), random_field(2.0), p));
        rows.push_back(row);
    }
    for (double p : {1.2, 1.5, 1.8}) {
        SweepRow row{"clarkson_second", p, 0.0};
        for (long i = 0; i < n; ++i)
            row.absorb(clarkson_second(random_field(2.0), random_field(2.0), p));
        rows.push_back(row);
    }
    for (double p : {2.0, 2.5, 4.0}) {
        SweepRow row{"local_clarkson", p, 0.0};
        for (long i = 0; i < n; ++i) {
            std::vector<double> a(6), b(6);
            for (auto& x : a) x = 4.0 * (rng.uniform() - 0.5);
            for (auto& x : b) x = 4.0 * (rng.uniform() - 0.5);
            row.absorb(local_clarkson(a, b, p));
        }
        rows.push_back(row);
    }
    {
        SweepRow row{"helper_inequalities", 0.0, 0.0};
        for (long i = 0; i < n; ++i) {
            double b = 3.0 * rng.uniform();
            double a = b + 3.0 * rng.uniform();
            row.absorb(helper_inequalities(a, b, 1.0 + 4.0 * rng.uniform()));
        }
        rows.push_back(row);
    }
    for (auto [p, q] : std::vector<std::pair<double, double>>{{3, 2}, {4, 2}, {2, 1}}) {
        SweepRow row{"minkowski_counting", double(p), double(q)};
        for (long i = 0; i < n; ++i)
            row.absorb(minkowski_counting(random_field(2.0), random_field(2.0), p, q));
        rows.push_back(row);
    }
    for (double p : {1.5, 2.0, 3.0}) {
        SweepRow row{"uniform_convexity", p, 0.0};
        for (long i = 0; i < n; ++i)
            row.absorb(uniform_convexity_suite(random_field(2.0), random_field(2.0), p));
        rows.push_back(row);
    }

    write_sweep_csv(rows, dir / "clarkson_report.csv");
    long fails = 0;
    for (const auto& r : rows) {
        std::cout << r.check << " p=" << r.p << " q=" << r.q << " failures=" << r.failures << "/"
                  << r.samples << "\n";
        fails += r.failures;
    }
    return fails == 0 ? kExitOk : kExitUsage;
}

int run_exhaustion_suite(const RunConfig& cfg, const fs::path& dir) {
    ExhaustionSpec ex = cfg.exhaustion;
    Grid parent = Grid::line(int(std::llround(ex.widths.back() / ex.h)) - 1, ex.widths.back());
    InitialSpec init = cfg.initial;
    if (init.kind != "bump") init.kind = "bump";
    init.center_x = 0.5 * ex.widths.back();
    init.width = std::min(init.width, 0.5 * ex.widths.front());
    Field U0 = build_initial(init, parent);

    ExhaustionPlan plan = concentric_plan_1d(ex.widths, ex.h, U0);
    Forcing F = build_forcing(cfg.forcing, parent);
    ExhaustionResult res = run_exhaustion(plan, cfg.scheme, cfg.params, F, 1);
    if (!res.completed) {
        std::cerr << "exhaustion: a child run failed\n";
        return kExitSolverFailure;
    }

    std::ofstream os(dir / "exhaustion.csv");
    os << "k,box_width,sup_diff,decay_ratio\n";
    for (const auto& s : res.steps)
        os << s.k << ',' << format_g17(s.box_width) << ',' << format_g17(s.sup_diff) << ','
           << format_g17(s.decay_ratio) << '\n';

    bool decreasing = true;
    for (std::size_t i = 1; i < res.steps.size(); ++i)
        decreasing &= res.steps[i].sup_diff < res.steps[i - 1].sup_diff;
    bool energy_ok = true;
    for (const auto& run : res.runs)
        energy_ok &= check_first_energy(run.trace, cfg.params).passed;
    for (const auto& s : res.steps)
        std::cout << "k=" << s.k << " width=" << s.box_width
                  << " sup_diff=" << format_g17(s.sup_diff) << "\n";
    std::cout << "exhaustion: " << (decreasing ? "decreasing" : "NOT decreasing")
              << ", first-energy " << (energy_ok ? "pass" : "FAIL") << "\n";
    return (decreasing && energy_ok) ? kExitOk : kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"planar Ginzburg-Landau laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    auto* sim = app.add_subcommand("simulate", "integrate a configured run and write trace/snapshots");
    sim->add_option("config", config_path, "config file")->required();

    double lambda = 1.0, kappa = 1.0, alpha = 0.0, beta = 0.0, q = 2.0;
    std::string raster_path;
    double raster_range = 5.0;
    int raster_n = 101;
    auto* reg = app.add_subcommand("check-region", "test parameter-region membership");
    reg->add_option("--lambda", lambda, "diffusion strength")->check(CLI::PositiveNumber);
    reg->add_option("--kappa", kappa, "potential strength")->check(CLI::PositiveNumber);
    reg->add_option("--alpha", alpha, "dispersion");
    reg->add_option("--beta", beta, "potential rotation");
    reg->add_option("--q", q, "potential exponent")->check(CLI::Range(2.0, 1e9));
    reg->add_option("--raster", raster_path, "emit an x,y,inside,discriminant raster CSV");
    reg->add_option("--raster-range", raster_range, "raster half-width");
    reg->add_option("--raster-n", raster_n, "raster points per axis");

    std::string suite;
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("config", config_path, "config file")->required();
    ver->add_option("suite", suite, "identities|energies|smoothing|clarkson|exhaustion")->required();

    auto* exh = app.add_subcommand("exhaustion", "nested-box convergence experiment");
    exh->add_option("config", config_path, "config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path);
        if (reg->parsed())
            return cmd_check_region(lambda, kappa, alpha, beta, q, raster_path, raster_range,
                                    raster_n);
        if (exh->parsed()) {
            RunConfig cfg = parse_config_file(config_path);
            return run_exhaustion_suite(cfg, prepare_output_dir(cfg));
        }
        if (ver->parsed()) {
            RunConfig cfg = parse_config_file(config_path);
            fs::path dir = prepare_output_dir(cfg);
            if (suite == "identities") return run_identities_suite(cfg, dir);
            if (suite == "energies") return run_energies_suite(cfg, dir);
            if (suite == "smoothing") return run_smoothing_suite(cfg, dir);
            if (suite == "clarkson") return run_clarkson_suite(cfg, dir);
            if (suite == "exhaustion") return run_exhaustion_suite(cfg, dir);
            std::cerr << "unknown suite '" << suite << "'\n";
            return kExitUsage;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
