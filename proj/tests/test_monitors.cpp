#include <catch2/catch_amalgamated.hpp>

#include <array>

#include "pcgl/monitors.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace pcgl;
using Catch::Approx;

TEST_CASE("pointwise vector identity") {
    std::array<double, 2> G{2.0, 3.0};
    auto r = check_projection_identity({1.0, 0.0}, G);
    CHECK(r.passed);
    CHECK(r.lhs == Approx(13.0));
    CHECK(r.rhs == Approx(13.0));

    std::array<double, 4> Z{};
    CHECK(check_projection_identity({0.0, 0.0}, Z).passed);

    NoiseSource rng(9);
    for (int i = 0; i < 2000; ++i) {
        std::array<double, 4> g4; // N = 2
        for (auto& x : g4) x = 4.0 * (rng.uniform() - 0.5);
        Vec2 v{4.0 * (rng.uniform() - 0.5), 4.0 * (rng.uniform() - 0.5)};
        CHECK(check_projection_identity(v, g4).passed);
    }
}

TEST_CASE("orthogonality suite on random and rotated fields") {
    Grid g = Grid::box(8, 8, 1.0, 1.0);
    ParamSet ps;
    ps.p = 2.6;
    ps.q = 3.5;
    ps.N = 2;
    ProxOpts prox;
    prox.tol_abs = 1e-12;
    for (std::uint64_t s = 0; s < 15; ++s) {
        Field U = test::random_field(g, 50 + s);
        for (auto& r : check_orthogonality_suite(U, 0.7, 0.2, ps, prox)) {
            INFO(r.name);
            CHECK(r.passed);
        }
        // rotation covariance: the suite is insensitive to a global quarter turn
        for (auto& r : check_orthogonality_suite(rotate_I(U), 0.7, 0.2, ps, prox)) {
            INFO(r.name);
            CHECK(r.passed);
        }
    }
    Field Z(g);
    for (auto& r : check_orthogonality_suite(Z, 1.0, 1.0, ps, prox)) {
        CHECK(r.passed);
        CHECK(r.lhs == 0.0);
    }

    // the potential/Yosida pairing is collinear nodewise, so it clears a
    // tighter bar than the solver-limited gradient rows
    for (std::uint64_t s = 0; s < 20; ++s) {
        Field U = test::random_field(g, 4000 + s, 2.0);
        Field dq = dpsi(U, ps.q);
        Field ypsi = yosida_psi(U, 0.7, ps.q);
        double defect = std::abs(inner(dq, rotate_I(ypsi)));
        CHECK(defect <= 1e-12 * field_norm_l2(dq) * field_norm_l2(ypsi));
    }
}

TEST_CASE("key inequality: trivial, structural, and refinement behaviour") {
    ParamSet ps;
    ps.p = 2.0;
    ps.q = 2.0;
    Grid g = Grid::line(31, 1.0);
    Field U = test::random_field(g, 3);
    auto triv = check_key_inequality(U, 0.0, ps);
    CHECK(triv.passed);
    CHECK(triv.lhs == 0.0);

    // real-valued field: the rotational pairing vanishes identically
    ps.q = 4.0;
    Field R(g);
    for (int i = 0; i < g.nodes[0]; ++i) {
        double x = g.node_coord(0, i);
        R.at(i) = {x * (1.0 - x), 0.0};
    }
    Field dp = dphi(R, ps.p);
    Field iS = rotate_I(dpsi(R, ps.q));
    CHECK(std::abs(inner(dp, iS)) <= 1e-14);
    CHECK(check_key_inequality(R, 0.0, ps).passed);

    // smooth winding bump: inequality holds with shrinking O(h) allowance
    for (double p : {2.0, 3.0}) {
        ps.p = p;
        double prev_excess = std::numeric_limits<double>::infinity();
        for (int n : {31, 63, 127}) {
            Grid gh = Grid::line(n, 1.0);
            Field B = test::bump_field(gh, 0.5, 0.6, 1.0, 2);
            auto r = check_key_inequality(B, 0.0, ps);
            CHECK(r.passed);
            double excess = std::max(0.0, r.lhs - r.rhs); // defect beyond the exact inequality
            if (std::isfinite(prev_excess) && prev_excess > 0.0)
                CHECK(excess <= prev_excess / 1.5);
            prev_excess = excess;
        }
    }

    // Yosida chain variant
    ps.p = 2.0;
    Field B = test::bump_field(g, 0.5, 0.6, 1.0, 2);
    for (double mu : {0.1, 1.0}) CHECK(check_key_inequality(B, mu, ps).passed);
}

TEST_CASE("resolvent comparisons") {
    Grid g = Grid::box(9, 9, 1.0, 1.0);
    Field U = test::random_field(g, 21, 2.0);
    for (double q : {2.0, 4.0})
        for (double mu : {0.5, 2.0}) {
            auto r = check_resolvent_comparisons(U, mu, q);
            CHECK(r.passed);
        }
    // q = 2: exact magnitude scaling 1/(1+mu)
    Field V = resolvent_psi(U, 1.0, 2.0);
    for (std::size_t i = 0; i < U.v.size(); ++i)
        CHECK(norm2(V.v[i]) == Approx(norm2(U.v[i]) / 2.0).margin(1e-14));

    Field Z(g);
    CHECK(check_resolvent_comparisons(Z, 1.0, 3.0).passed);
}

TEST_CASE("first-energy and norm bounds on runs in and out of the region") {
    // modest stiffness so the explicit rotational stage stays stable even
    // for the out-of-region dispersion ratios
    Grid g = Grid::line(15, 1.0);
    SchemeConfig cfg;
    cfg.dt = 1e-4;
    cfg.T = 0.02;

    ParamSet inside;
    inside.lambda = inside.kappa = 1.0;
    inside.alpha = 1.0;
    inside.beta = 1.0;
    inside.p = 2.0;
    inside.q = 4.0;

    ParamSet outside = inside;
    outside.alpha = 2.7;
    outside.beta = -13.6;
    outside.q = 6.0;

    for (const ParamSet& ps : {inside, outside}) {
        Field U0 = test::bump_field(g, 0.5, 0.6, 1.0, 1);
        Trajectory traj = simulate(U0, cfg, ps, Forcing::zero());
        REQUIRE(traj.completed);
        CHECK(check_first_energy(traj.trace, ps).passed);
        CHECK(check_gronwall(traj.trace, ps).passed);

        auto verdict = find_witness(ps);
        auto second = check_second_energy(traj.trace, ps, verdict);
        if (verdict.witness) {
            CHECK(second.passed);
            CHECK(second.name == "second_energy");
        } else {
            CHECK(second.name == "second_energy:not_claimed");
            CHECK(second.passed);
        }
    }

    // zero data: every bound is trivially met
    Field Z(g);
    Trajectory zt = simulate(Z, cfg, inside, Forcing::zero());
    CHECK(check_first_energy(zt.trace, inside).passed);
    CHECK(check_second_energy(zt.trace, inside, find_witness(inside)).passed);
}

TEST_CASE("forced linear run stays within the first-energy constant") {
    Grid g = Grid::line(31, 1.0);
    ParamSet ps;
    ps.lambda = ps.kappa = 1.0;
    ps.alpha = 0.5;
    ps.beta = 0.5;
    ps.gamma = 0.5;
    ps.p = ps.q = 2.0;
    Field f = test::sine_mode(g, 1, {0.3, 0.1});
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.T = 0.5;
    Trajectory traj = simulate(test::sine_mode(g, 2, {0.5, 0.0}), cfg, ps, Forcing::steady(f));
    REQUIRE(traj.completed);
    CHECK(check_first_energy(traj.trace, ps).passed);
    CHECK(check_second_energy(traj.trace, ps, find_witness(ps)).passed);
}

TEST_CASE("smoothing bounds for noise data and refinement stability") {
    ParamSet ps;
    ps.lambda = ps.kappa = 1.0;
    ps.alpha = 1.0;
    ps.beta = 1.0;
    ps.p = 2.0;
    ps.q = 4.0;

    auto noise_run = [&](int n, double dt) {
        Grid g = Grid::line(n, 1.0);
        // roughness pinned at a fixed spatial scale so the data converges
        // in L2 under refinement while staying outside the gradient space
        InitialSpec spec;
        spec.kind = "noise";
        spec.seed = 12345;
        spec.amplitude = 1.0;
        spec.noise_blocks = 16;
        Field U0 = build_initial(spec, g);
        SchemeConfig cfg;
        cfg.dt = dt;
        cfg.T = 0.1;
        // rough data: drive the rotational couplings through their
        // Lipschitz regularizations, as the approximating flows do
        cfg.nu = 0.05;
        cfg.mu = 0.05;
        Trajectory t = simulate(U0, cfg, ps, Forcing::zero());
        REQUIRE(t.completed);
        return t;
    };

    Trajectory coarse = noise_run(31, 2e-3);
    Trajectory fine = noise_run(63, 1e-3);
    CHECK(check_smoothing(coarse.trace, ps).passed);
    CHECK(check_smoothing(fine.trace, ps).passed);
    CHECK(check_smoothing_refinement(coarse.trace, fine.trace).passed);

    // smooth data: t*phi -> 0 as t -> 0 because phi stays bounded
    Grid g = Grid::line(31, 1.0);
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.T = 0.05;
    Trajectory sm = simulate(test::bump_field(g, 0.5, 0.5, 1.0, 0), cfg, ps, Forcing::zero());
    double early = sm.trace.entries[1].t * sm.trace.entries[1].phi;
    CHECK(early <= 2e-3 * sm.trace.entries[0].phi / sm.trace.dt * sm.trace.dt + 1e-6);
    CHECK(check_smoothing(sm.trace, ps).passed);
}
