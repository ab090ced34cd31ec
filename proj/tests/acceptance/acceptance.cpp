// End-to-end acceptance battery. Each numbered criterion prints exactly
// one PASS/FAIL line with its measured figures; the process exits with
// the number of failed criteria.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "pcgl/pcgl.hpp"
#include "../oracles.hpp"
#include "../test_util.hpp"

using namespace pcgl;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

int thread_budget() {
    if (const char* env = std::getenv("PCGL_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// Index-parallel loop; every item writes only its own slots, so results
// are identical for any thread count.
void parallel_for(int n, const std::function<void(int)>& body) {
    int threads = std::min(thread_budget(), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

struct Outcome {
    bool passed = true;
    std::string detail;
};

// ---------------------------------------------------------------------------
// 1. identity suite on a 64x64 grid, 1000 random instances, 1e-10 relative
// ---------------------------------------------------------------------------
Outcome criterion_1() {
    const int n_trials = 1000;
    const Grid g = Grid::box(64, 64, 1.0, 1.0);
    const double bar = 1e-10;
    std::vector<double> worst(n_trials, 0.0);
    const double t0 = now_seconds();

    parallel_for(n_trials, [&](int trial) {
        NoiseSource rng(7000 + std::uint64_t(trial));
        Field U = test::random_smooth_field(g, 100 + std::uint64_t(trial), 4, 1.0);
        const double p = 1.6 + 1.4 * rng.uniform();
        const double q = 2.0 + 3.0 * rng.uniform();
        const double mu = 0.05 + 0.95 * rng.uniform();
        const double nu = 1e-4 * std::pow(10.0, rng.uniform());
        double w = 0.0;
        auto rel = [&](double defect, double scale) {
            w = std::max(w, defect / std::max(scale, 1e-30));
        };

        Field IU = rotate_I(U);
        const double nU = field_norm_l2(U);

        Field dp = dphi(U, p);
        rel(std::abs(inner(dp, IU)), field_norm_l2(dp) * nU);
        Field dq = dpsi(U, q);
        rel(std::abs(inner(dq, IU)), field_norm_l2(dq) * nU);

        Field J = resolvent_psi(U, mu, q);
        Field ypsi = U;
        ypsi -= J;
        ypsi *= 1.0 / mu;
        rel(std::abs(inner(ypsi, IU)), field_norm_l2(ypsi) * nU);
        rel(std::abs(inner(dq, rotate_I(ypsi))), field_norm_l2(dq) * field_norm_l2(ypsi));

        ProxOpts opts;
        opts.tol_abs = 2e-11 * nu / 0.01;
        opts.tol_rel = 0.0;
        Field yphi = yosida_phi(U, nu, p, opts);
        rel(std::abs(inner(yphi, IU)), field_norm_l2(yphi) * nU);

        Field ypsi_alt = dpsi(J, q);
        rel(field_norm_l2(ypsi - ypsi_alt), field_norm_l2(ypsi_alt));

        GradField a = grad(rotate_I(U));
        GradField b = rotate_I(grad(U));
        double gd = 0.0, gs = 0.0;
        for (std::size_t i = 0; i < a.v.size(); ++i) {
            gd = std::max(gd, std::abs(a.v[i] - b.v[i]));
            gs = std::max(gs, std::abs(b.v[i]));
        }
        rel(gd, gs);

        Vec2 x{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
        Vec2 y{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
        rel(std::abs(sqr(dot(x, y)) + sqr(dot(x, rot90(y))) - dot(x, x) * dot(y, y)),
            dot(x, x) * dot(y, y));

        double g4[4];
        for (auto& v : g4) v = 2.0 * rng.uniform() - 1.0;
        auto rep = check_projection_identity(x, std::span<const double>(g4, 4));
        rel(std::abs(rep.lhs - rep.rhs), std::abs(rep.rhs));

        worst[trial] = w;
    });

    const double elapsed = now_seconds() - t0;
    double w = 0.0;
    for (double v : worst) w = std::max(w, v);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "worst relative defect %.2e (bar %.0e), %d trials in %.1f s",
                  w, bar, n_trials, elapsed);
    return {w <= bar && elapsed < 10.0, buf};
}

// ---------------------------------------------------------------------------
// 2. resolvent correctness: nodewise psi residual, p = 2 oracle match,
//    nonexpansiveness
// ---------------------------------------------------------------------------
Outcome criterion_2() {
    NoiseSource rng(91);
    double worst_node = 0.0;
    Grid g16 = Grid::box(16, 16, 1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        Field U = test::random_field(g16, 300 + std::uint64_t(trial), 2.0);
        double q = 2.0 + 4.0 * rng.uniform();
        double mu = 0.05 + 20.0 * rng.uniform();
        Field V = resolvent_psi(U, mu, q);
        Field R = V;
        axpy(R, mu, dpsi(V, q));
        R -= U;
        for (const auto& x : R.v) worst_node = std::max(worst_node, norm2(x));
    }

    Grid g8 = Grid::box(8, 8, 1.0, 1.0);
    double worst_oracle = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Field U = test::random_field(g8, 500 + std::uint64_t(trial));
        double nu = 0.05 + 0.95 * rng.uniform();
        auto rep = resolvent_phi(U, nu, 2.0);
        Field oracle = test::solve_linear_shifted_laplacian(U, 1.0, nu);
        worst_oracle = std::max(worst_oracle, field_norm_l2(rep.output - oracle));
        if (!rep.converged) worst_oracle = 1.0;
    }

    double worst_expansion = 0.0;
    ProxOpts tight;
    tight.tol_abs = 1e-12;
    for (int pair = 0; pair < 100; ++pair) {
        bool rough = pair % 2 == 0;
        Field U = rough ? test::random_field(g16, 700 + 2 * std::uint64_t(pair), 1.5)
                        : test::random_smooth_field(g16, 700 + 2 * std::uint64_t(pair), 4);
        Field W = rough ? test::random_field(g16, 700 + 2 * std::uint64_t(pair) + 1, 1.5)
                        : test::random_smooth_field(g16, 700 + 2 * std::uint64_t(pair) + 1, 4);
        double nu = 0.1 + 0.9 * rng.uniform();
        double p = 1.7 + 1.3 * rng.uniform();
        Field JU = resolvent_phi(U, nu, p, tight).output;
        Field JW = resolvent_phi(W, nu, p, tight).output;
        worst_expansion = std::max(worst_expansion,
                                   field_norm_l2(JU - JW) - field_norm_l2(U - W));
        double q = 2.0 + 3.0 * rng.uniform();
        Field KU = resolvent_psi(U, nu, q);
        Field KW = resolvent_psi(W, nu, q);
        worst_expansion = std::max(worst_expansion,
                                   field_norm_l2(KU - KW) - field_norm_l2(U - W));
    }

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "psi residual %.2e (<=1e-13), oracle gap %.2e (<=1e-10), expansion excess %.2e",
                  worst_node, worst_oracle, worst_expansion);
    return {worst_node <= 1e-13 && worst_oracle <= 1e-10 && worst_expansion <= 1e-10, buf};
}

// ---------------------------------------------------------------------------
// 3. angle condition phi(J^psi_mu U) <= phi(U) + 1e-10
// ---------------------------------------------------------------------------
Outcome criterion_3() {
    double worst = -1e300;
    int checks = 0;
    for (int trial = 0; trial < 500; ++trial) {
        bool twod = trial % 2 == 0;
        Grid g = twod ? Grid::box(12, 12, 1.0, 1.0) : Grid::line(33, 1.0);
        Field U = (trial % 4 < 2) ? test::random_field(g, 1000 + std::uint64_t(trial), 2.0)
                                  : test::random_smooth_field(g, 1000 + std::uint64_t(trial), 4);
        double p = (trial % 3 == 0) ? 1.8 : (trial % 3 == 1 ? 2.0 : 3.0);
        for (double mu : {0.1, 1.0, 10.0})
            for (double q : {2.0, 3.0, 4.0}) {
                Field V = resolvent_psi(U, mu, q);
                worst = std::max(worst, phi(V, p) - phi(U, p));
                ++checks;
            }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max phi growth %.2e over %d checks (bar 1e-10)", worst,
                  checks);
    return {worst <= 1e-10, buf};
}

// ---------------------------------------------------------------------------
// 4. key inequality defect decay under h-refinement (smooth saturating
//    fields, q = 4, p in {2, 3})
// ---------------------------------------------------------------------------
Outcome criterion_4() {
    // amplitude bump with the phase profile that makes the continuum
    // bound tight: theta = sqrt(q-1) log(rho + eps)
    auto tight_field = [](const Grid& g, double q, double eps) {
        Field U(g);
        double c = 0.5 * g.extent[0], w = 0.6 * g.extent[0];
        for (int i = 0; i < g.nodes[0]; ++i) {
            double z = (g.node_coord(0, i) - c) / w;
            double rho = std::abs(z) >= 0.5 ? 0.0 : sqr(std::cos(3.14159265358979323846 * z));
            double theta = std::sqrt(q - 1.0) * std::log(rho + eps);
            U.at(i) = {rho * std::cos(theta), rho * std::sin(theta)};
        }
        return U;
    };
    const double cq = strength_constant(4.0);
    bool ok = true;
    std::string detail;
    for (double p : {2.0, 3.0}) {
        std::vector<double> defects, ratios;
        for (int n : {31, 63, 127}) {
            Grid g = Grid::line(n, 1.0);
            Field U = tight_field(g, 4.0, 0.05);
            Field dp = dphi(U, p);
            Field dq = dpsi(U, 4.0);
            double L = std::abs(inner(dp, rotate_I(dq)));
            double R = cq * inner(dp, dq);
            defects.push_back(std::max(0.0, L - R) / R);
            ratios.push_back(L / R);
        }
        for (std::size_t i = 1; i < defects.size(); ++i) {
            bool vanished = defects[i - 1] <= 1e-14 && defects[i] <= 1e-14;
            if (!vanished && defects[i] > defects[i - 1] / 1.8) ok = false;
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf), " p=%g defects {%.1e,%.1e,%.1e} L/R {%.4f,%.4f,%.4f}",
                      p, defects[0], defects[1], defects[2], ratios[0], ratios[1], ratios[2]);
        detail += buf;
    }
    return {ok, "inequality never violated at any h;" + detail};
}

// ---------------------------------------------------------------------------
// 5. stepwise dissipation and the exact dissipation budget, backward runs
// ---------------------------------------------------------------------------
Outcome criterion_5() {
    Grid g = Grid::line(31, 1.0);
    SchemeConfig cfg;
    cfg.scheme = Scheme::FullyImplicit;
    cfg.dt = 5e-5;
    cfg.T = 1e-2; // 200 steps
    cfg.step_tol = 1e-11;
    double worst_rise = -1e300, worst_budget = 0.0;
    bool ok = true;
    for (double p : {2.0, 3.0})
        for (double q : {2.0, 4.0}) {
            ParamSet ps;
            ps.lambda = ps.kappa = 1.0;
            ps.alpha = 1.0;
            ps.beta = 1.0;
            ps.p = p;
            ps.q = q;
            Field U0 = test::bump_field(g, 0.5, 0.8, 0.7, 1);
            Trajectory traj = simulate(U0, cfg, ps, Forcing::zero());
            if (!traj.completed) { ok = false; continue; }
            auto step = check_step_dissipation(traj.trace, cfg.step_tol);
            worst_rise = std::max(worst_rise, step.lhs);
            auto budget = check_dissipation_budget(traj.trace, ps, 0.02);
            worst_budget = std::max(worst_budget,
                                    std::abs(budget.lhs - budget.rhs)
                                        / std::max(std::abs(budget.lhs), std::abs(budget.rhs)));
            if (!step.passed || !budget.passed) ok = false;
        }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max per-step rise %.2e (bar %.0e), budget gap %.2f%% (bar 2%%)",
                  worst_rise, 10.0 * cfg.step_tol, 100.0 * worst_budget);
    return {ok, buf};
}

// ---------------------------------------------------------------------------
// 6. pointwise norm bound with gain and forcing, dt = 1e-3, T = 1
// ---------------------------------------------------------------------------
Outcome criterion_6() {
    Grid g = Grid::line(31, 1.0);
    Field f(g);
    for (int i = 0; i < g.nodes[0]; ++i) {
        double x = g.node_coord(0, i);
        f.at(i) = {0.4 * std::sin(3.14159265358979323846 * x), 0.3 * x * (1.0 - x)};
    }
    Forcing F = Forcing::steady(f);
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.T = 1.0;
    bool ok = true;
    double worst = 0.0;
    for (double gamma : {-1.0, 0.0, 1.0}) {
        ParamSet ps;
        ps.lambda = ps.kappa = 1.0;
        ps.alpha = 0.7;
        ps.beta = -0.5;
        ps.gamma = gamma;
        ps.p = 2.4;
        ps.q = 3.0;
        Field U0 = test::bump_field(g, 0.5, 0.5, 0.8, 1);
        Trajectory traj = simulate(U0, cfg, ps, F);
        if (!traj.completed) { ok = false; continue; }
        auto rep = check_gronwall(traj.trace, ps);
        worst = std::max(worst, rep.lhs);
        if (!rep.passed) ok = false;
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "max bound ratio %.4f (bar 1.05)", worst);
    return {ok, buf};
}

// ---------------------------------------------------------------------------
// 7. single-mode run against the closed-form step recursion, 63 nodes
// ---------------------------------------------------------------------------
Outcome criterion_7() {
    const double t0 = now_seconds();
    Grid g = Grid::line(63, 1.0);
    ParamSet ps;
    ps.lambda = 1.0;
    ps.kappa = 0.8;
    ps.alpha = 0.9;
    ps.beta = -0.6;
    ps.gamma = 0.2;
    ps.p = ps.q = 2.0;
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.T = 1.0;
    cfg.prox.tol_abs = 1e-12;
    const int k = 3;
    Field U0 = test::sine_mode(g, k, {0.8, 0.3});
    Trajectory traj = simulate(U0, cfg, ps, Forcing::zero());
    if (!traj.completed) return {false, "run did not complete"};
    const double sigma = test::dirichlet_mode_eigenvalue(g, k);
    Vec2 c{0.8, 0.3};
    for (std::size_t i = 1; i < traj.trace.entries.size(); ++i)
        c = test::imex_mode_step(c, sigma, traj.trace.dt, ps.lambda, ps.kappa, ps.alpha, ps.beta,
                                 ps.gamma);
    double err = field_norm_l2(traj.snapshots.back().second - test::sine_mode(g, k, c));
    const double elapsed = now_seconds() - t0;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "final L2 error %.2e (bar 1e-6), %.1f s (bar 5 s)", err,
                  elapsed);
    return {err <= 1e-6 && elapsed < 5.0, buf};
}

// ---------------------------------------------------------------------------
// 8. witness search agrees with the discriminant equivalence on 1e4 draws
// ---------------------------------------------------------------------------
Outcome criterion_8() {
    NoiseSource rng(424242);
    int tested = 0, disagreements = 0, witness_bad = 0;
    while (tested < 10000) {
        ParamSet ps;
        ps.lambda = 0.1 + 3.0 * rng.uniform();
        ps.kappa = 0.1 + 3.0 * rng.uniform();
        ps.alpha = 10.0 * (rng.uniform() - 0.5);
        ps.beta = 10.0 * (rng.uniform() - 0.5);
        ps.q = 2.05 + 6.0 * rng.uniform();
        ps.p = 2.0;

        const double r = 1.0 / strength_constant(ps.q);
        const double x = ps.alpha / ps.lambda, y = ps.beta / ps.kappa;
        const double D4 = (1.0 + r * r) * ps.lambda * ps.kappa
                        - (r * ps.kappa - std::abs(ps.beta)) * (r * ps.lambda - std::abs(ps.alpha));
        const double scale = (1.0 + r * r) * ps.lambda * ps.kappa;
        if (std::abs(D4) < 1e-12 * scale || std::abs(x * y) < 1e-12) continue; // boundary band
        ++tested;

        const bool expect = (x * y >= 0.0) || D4 > 0.0;
        auto v = find_witness(ps);
        if (v.witness.has_value() != expect || v.inside != expect) ++disagreements;
        if (v.witness && witness_J(v.witness->delta, v.witness->epsilon, ps) < 0.0) ++witness_bad;
    }
    char buf[140];
    std::snprintf(buf, sizeof(buf), "%d draws, %d disagreements, %d invalid certificates", tested,
                  disagreements, witness_bad);
    return {disagreements == 0 && witness_bad == 0, buf};
}

// ---------------------------------------------------------------------------
// 9. smoothing stability for rough data across h: 1/32 -> 1/64
// ---------------------------------------------------------------------------
Outcome criterion_9() {
    ParamSet ps;
    ps.lambda = ps.kappa = 1.0;
    ps.alpha = 1.0;
    ps.beta = 1.0;
    ps.p = 2.0;
    ps.q = 4.0;
    auto noise_run = [&](int n, double dt) {
        Grid g = Grid::line(n, 1.0);
        InitialSpec spec;
        spec.kind = "noise";
        spec.seed = 20250809;
        spec.amplitude = 1.0;
        spec.noise_blocks = 16; // roughness at a fixed spatial scale
        Field U0 = build_initial(spec, g);
        SchemeConfig cfg;
        cfg.dt = dt;
        cfg.T = 0.1;
        cfg.nu = 0.05; // Lipschitz couplings for unresolved data
        cfg.mu = 0.05;
        return simulate(U0, cfg, ps, Forcing::zero());
    };
    Trajectory coarse = noise_run(31, 2e-3);
    Trajectory fine = noise_run(63, 1e-3);
    if (!coarse.completed || !fine.completed) return {false, "run did not complete"};

    auto sup_tphi = [](const EnergyTrace& tr) {
        double s = 0.0;
        for (const auto& e : tr.entries) s = std::max(s, e.t * e.phi);
        return s;
    };
    auto wdudt = [](const EnergyTrace& tr) {
        return tr.integrate([](const EnergyTraceEntry& e) { return e.t * e.dudt_l2sq; });
    };
    double s_c = sup_tphi(coarse.trace), s_f = sup_tphi(fine.trace);
    double d_c = wdudt(coarse.trace), d_f = wdudt(fine.trace);
    double r1 = s_f / s_c, r2 = d_f / d_c;
    bool finite = std::isfinite(s_c) && std::isfinite(s_f) && std::isfinite(d_c)
               && std::isfinite(d_f);
    bool ok = finite && r1 <= 1.2 && r1 >= 1.0 / 1.2 && r2 <= 1.5 && r2 >= 1.0 / 1.5
           && check_smoothing(coarse.trace, ps).passed && check_smoothing(fine.trace, ps).passed;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "sup t*phi ratio %.3f (band [0.833,1.2]), int t|dU/dt|^2 ratio %.3f (band [0.667,1.5])",
                  r1, r2);
    return {ok, buf};
}

// ---------------------------------------------------------------------------
// 10. nested-box experiment: strictly decreasing window differences and a
//     shared first-level constant
// ---------------------------------------------------------------------------
Outcome criterion_10() {
    const double h = 0.25;
    Grid parent = Grid::line(int(16.0 / h) - 1, 16.0);
    InitialSpec spec;
    spec.kind = "bump";
    spec.center_x = 8.0;
    spec.width = 2.0;
    spec.amplitude = 1.0;
    Field U0 = build_initial(spec, parent);
    ExhaustionPlan plan = concentric_plan_1d({4.0, 8.0, 16.0}, h, U0);
    ParamSet ps;
    ps.lambda = 1.0;
    ps.kappa = 0.1;
    ps.alpha = 0.4;
    ps.beta = 0.4;
    ps.p = 2.0;
    ps.q = 2.0;
    SchemeConfig cfg;
    cfg.dt = 0.01;
    cfg.T = 0.5;
    auto res = run_exhaustion(plan, cfg, ps, Forcing::zero(), 2);
    if (!res.completed) return {false, "a child run failed"};
    bool decreasing = res.steps.size() == 2 && res.steps[0].sup_diff > 0.0
                   && res.steps[1].sup_diff < res.steps[0].sup_diff;
    bool energy = true;
    double u0sq = res.runs.front().trace.entries.front().l2sq;
    for (const auto& run : res.runs) {
        energy &= check_first_energy(run.trace, ps).passed;
        energy &= std::abs(run.trace.entries.front().l2sq - u0sq) <= 1e-12 * u0sq;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "d_1 %.3e > d_2 %.3e, shared-constant first-energy %s",
                  res.steps[0].sup_diff, res.steps[1].sup_diff, energy ? "pass" : "FAIL");
    return {decreasing && energy, buf};
}

// ---------------------------------------------------------------------------
// 11. appendix inequality sweeps: 1e5 random samples per check plus
//     exhaustive small-integer grids, zero failures, under 60 s
// ---------------------------------------------------------------------------
Outcome criterion_11() {
    const double t0 = now_seconds();
    const long n = 100000;
    long failures = 0;
    Grid g = Grid::box(4, 4, 1.0, 1.0);

    auto rand_field = [](NoiseSource& rng, const Grid& gg, double amp) {
        Field U(gg);
        for (auto& x : U.v) {
            x.u1 = amp * (2.0 * rng.uniform() - 1.0);
            x.u2 = amp * (2.0 * rng.uniform() - 1.0);
        }
        return U;
    };

    struct Task {
        const char* name;
        std::function<long()> run; // returns failure count over its samples
    };
    std::vector<Task> tasks;

    tasks.push_back({"clarkson_first", [&] {
        NoiseSource rng(1);
        long bad = 0;
        for (long i = 0; i < n; ++i) {
            double p = (i % 3 == 0) ? 2.0 : (i % 3 == 1 ? 3.0 : 4.0);
            if (!clarkson_first(rand_field(rng, g, 2.0), rand_field(rng, g, 2.0), p).passed) ++bad;
        }
        return bad;
    }});
    tasks.push_back({"clarkson_second", [&] {
        NoiseSource rng(2);
        long bad = 0;
        for (long i = 0; i < n; ++i) {
            double p = (i % 3 == 0) ? 1.2 : (i % 3 == 1 ? 1.5 : 1.8);
            if (!clarkson_second(rand_field(rng, g, 2.0), rand_field(rng, g, 2.0), p).passed) ++bad;
        }
        return bad;
    }});
    tasks.push_back({"local_clarkson", [&] {
        NoiseSource rng(3);
        long bad = 0;
        for (long i = 0; i < n; ++i) {
            double p = (i % 3 == 0) ? 2.0 : (i % 3 == 1 ? 2.5 : 4.0);
            int dim = 2 + int(rng.uniform() * 7.0);
            std::vector<double> a(dim), b(dim);
            for (auto& x : a) x = 6.0 * (rng.uniform() - 0.5);
            for (auto& x : b) x = 6.0 * (rng.uniform() - 0.5);
            if (!local_clarkson(a, b, p).passed) ++bad;
        }
        return bad;
    }});
    tasks.push_back({"helper_inequalities", [&] {
        NoiseSource rng(4);
        long bad = 0;
        for (long i = 0; i < n; ++i) {
            double b = 4.0 * rng.uniform();
            double a = b + 4.0 * rng.uniform();
            if (!helper_inequalities(a, b, 1.0 + 5.0 * rng.uniform()).passed) ++bad;
        }
        return bad;
    }});
    tasks.push_back({"minkowski_counting", [&] {
        NoiseSource rng(5);
        long bad = 0;
        const double pq[3][2] = {{3.0, 2.0}, {4.0, 2.0}, {2.0, 1.0}};
        for (long i = 0; i < n; ++i) {
            const double* c = pq[i % 3];
            if (!minkowski_counting(rand_field(rng, g, 2.0), rand_field(rng, g, 2.0), c[0], c[1])
                     .passed)
                ++bad;
        }
        return bad;
    }});
    tasks.push_back({"uniform_convexity", [&] {
        NoiseSource rng(6);
        long bad = 0;
        for (long i = 0; i < n; ++i) {
            double p = (i % 3 == 0) ? 1.5 : (i % 3 == 1 ? 2.0 : 3.0);
            if (!uniform_convexity_suite(rand_field(rng, g, 2.0), rand_field(rng, g, 2.0), p)
                     .passed)
                ++bad;
        }
        return bad;
    }});
    tasks.push_back({"exhaustive_small_integers", [&] {
        long bad = 0;
        // vectors with entries in {-2..2}: all pairs in dimension 2
        for (double p : {2.0, 3.0})
            for (int a0 = -2; a0 <= 2; ++a0)
                for (int a1 = -2; a1 <= 2; ++a1)
                    for (int b0 = -2; b0 <= 2; ++b0)
                        for (int b1 = -2; b1 <= 2; ++b1) {
                            std::vector<double> a{double(a0), double(a1)};
                            std::vector<double> b{double(b0), double(b1)};
                            if (!local_clarkson(a, b, p).passed) ++bad;
                        }
        // two-node fields over the same lattice, paired with a stride walk
        Grid gl = Grid::line(2, 3.0);
        std::vector<Field> all;
        for (int a = -2; a <= 2; ++a)
            for (int b = -2; b <= 2; ++b)
                for (int c = -2; c <= 2; ++c)
                    for (int d = -2; d <= 2; ++d) {
                        Field f(gl);
                        f.at(0) = {double(a), double(b)};
                        f.at(1) = {double(c), double(d)};
                        all.push_back(f);
                    }
        for (std::size_t i = 0; i < all.size(); ++i) {
            const Field& f = all[i];
            const Field& h2 = all[(i * 131 + 77) % all.size()];
            if (!clarkson_first(f, h2, 3.0).passed) ++bad;
            if (!clarkson_second(f, h2, 1.5).passed) ++bad;
            if (!minkowski_counting(f, h2, 3.0, 2.0).passed) ++bad;
            if (!uniform_convexity_suite(f, h2, 3.0).passed) ++bad;
        }
        return bad;
    }});

    std::vector<long> results(tasks.size(), 0);
    parallel_for(int(tasks.size()), [&](int i) { results[i] = tasks[i].run(); });
    for (long r : results) failures += r;
    const long total = long(tasks.size() - 1) * n;

    const double elapsed = now_seconds() - t0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%ld failures over >%ld samples, %.1f s (bar 60 s)", failures,
                  total, elapsed);
    return {failures == 0 && elapsed < 60.0, buf};
}

} // namespace

int main() {
    struct Row {
        int id;
        const char* title;
        Outcome (*fn)();
    };
    const Row rows[] = {
        {1, "identity suite", criterion_1},
        {2, "resolvent correctness", criterion_2},
        {3, "angle condition", criterion_3},
        {4, "key inequality refinement", criterion_4},
        {5, "dissipation", criterion_5},
        {6, "norm growth bound", criterion_6},
        {7, "linear mode oracle", criterion_7},
        {8, "region/witness agreement", criterion_8},
        {9, "smoothing stability", criterion_9},
        {10, "nested-box convergence", criterion_10},
        {11, "appendix sweeps", criterion_11},
    };
    int failed = 0;
    for (const auto& row : rows) {
        Outcome out = row.fn();
        std::printf("[%s] criterion %2d (%s): %s\n", out.passed ? "PASS" : "FAIL", row.id,
                    row.title, out.detail.c_str());
        std::fflush(stdout);
        if (!out.passed) ++failed;
    }
    std::printf("%d/11 criteria passed\n", 11 - failed);
    return failed;
}
