#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pcgl/core.hpp"
#include "pcgl/field.hpp"
#include "pcgl/functionals.hpp"
#include "pcgl/integrator.hpp"
#include "pcgl/params.hpp"

namespace pcgl {

/// One verified statement: an inequality lhs <= rhs (margin = rhs - lhs)
/// or an identity (margin = -|defect|). passed <=> margin >= -tolerance.
struct CheckReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool passed = true;
    double tolerance = 0.0;

    static CheckReport inequality(std::string name, double lhs, double rhs, double tol) {
        CheckReport r;
        r.name = std::move(name);
        r.lhs = lhs;
        r.rhs = rhs;
        r.margin = rhs - lhs;
        r.tolerance = tol;
        r.passed = r.margin >= -tol;
        return r;
    }

    static CheckReport identity(std::string name, double lhs, double rhs, double tol) {
        CheckReport r;
        r.name = std::move(name);
        r.lhs = lhs;
        r.rhs = rhs;
        r.margin = -std::abs(lhs - rhs);
        r.tolerance = tol;
        r.passed = r.margin >= -tol;
        return r;
    }
};

/// Pointwise algebra |(V.G)|^2 + |(IV.G)|^2 = |V|^2 |G|^2 for a plane
/// vector V and any 2N-vector G = (g1, g2).
inline CheckReport check_projection_identity(Vec2 V, std::span<const double> G) {
    if (G.size() % 2 != 0) fail_invalid("check_projection_identity: G must have 2N entries");
    const std::size_t N = G.size() / 2;
    double vg = 0.0, ivg = 0.0, gg = 0.0;
    for (std::size_t a = 0; a < N; ++a) {
        double c1 = V.u1 * G[a] + V.u2 * G[N + a];
        double c2 = -V.u2 * G[a] + V.u1 * G[N + a];
        vg += c1 * c1;
        ivg += c2 * c2;
        gg += G[a] * G[a] + G[N + a] * G[N + a];
    }
    double lhs = vg + ivg;
    double rhs = dot(V, V) * gg;
    return CheckReport::identity("pointwise_identity", lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
}

/// Rotational cross pairing against the aligned pairing:
///   |(dphi(U), I S)| <= c_q (dphi(U), S),   S = dpsi or its Yosida map.
/// The discrete product rule carries an O(h) commutator, absorbed by
/// tol_h = 2 c_q h |dphi| |S|.
inline CheckReport check_key_inequality(const Field& U, double mu, const ParamSet& ps) {
    const double cq = strength_constant(ps.q);
    if (cq == 0.0)
        return CheckReport::inequality("key_inequality", 0.0, 0.0, 1e-15);

    Field dp = dphi(U, ps.p);
    Field S = (mu > 0.0) ? yosida_psi(U, mu, ps.q) : dpsi(U, ps.q);
    const double L = std::abs(inner(dp, rotate_I(S)));
    const double G = inner(dp, S);
    const double h = std::max(U.grid.h(0), U.grid.dim == 2 ? U.grid.h(1) : 0.0);
    const double tol_h = 2.0 * cq * h * field_norm_l2(dp) * field_norm_l2(S);

    CheckReport r = CheckReport::inequality("key_inequality", L, cq * G, tol_h);
    if (mu > 0.0) {
        // chain: (dphi, dpsi_mu) <= (dphi, dpsi), same O(h) allowance
        Field dq = dpsi(U, ps.q);
        double chain_tol = 2.0 * cq * h * field_norm_l2(dp) * field_norm_l2(dq);
        if (G > inner(dp, dq) + chain_tol) r.passed = false;
    }
    return r;
}

/// All rotational-orthogonality pairings; each vanishes exactly for the
/// discrete energies, so the bar is pure arithmetic noise.
inline std::vector<CheckReport> check_orthogonality_suite(const Field& U, double mu, double nu,
                                                          const ParamSet& ps,
                                                          const ProxOpts& prox = {},
                                                          double rel_tol = 1e-10) {
    std::vector<CheckReport> out;
    Field IU = rotate_I(U);
    auto pair_check = [&](const std::string& name, const Field& A, const Field& B) {
        double v = inner(A, B);
        double scale = field_norm_l2(A) * field_norm_l2(B);
        out.push_back(CheckReport::identity(name, v, 0.0, rel_tol * std::max(scale, 1e-30)));
    };

    Field dp = dphi(U, ps.p, prox.sigma_reg);
    pair_check("orth_dphi_IU", dp, IU);
    Field dq = dpsi(U, ps.q);
    pair_check("orth_dpsi_IU", dq, IU);
    Field yphi = yosida_phi(U, nu > 0.0 ? nu : 1.0, ps.p, prox);
    pair_check("orth_yosida_phi_IU", yphi, IU);
    Field ypsi = yosida_psi(U, mu > 0.0 ? mu : 1.0, ps.q);
    pair_check("orth_yosida_psi_IU", ypsi, IU);
    pair_check("orth_dpsi_I_yosida_psi", dq, rotate_I(ypsi));
    return out;
}

/// Magnitude comparisons across the psi-resolvent: nodewise contraction
/// (exact) and the cellwise gradient comparison with an O(h) allowance.
inline CheckReport check_resolvent_comparisons(const Field& U, double mu, double q) {
    Field V = resolvent_psi(U, mu, q);
    double worst_node = 0.0;
    for (std::size_t i = 0; i < U.v.size(); ++i)
        worst_node = std::max(worst_node, norm2(V.v[i]) - norm2(U.v[i]));

    GradField GU = grad(U), GV = grad(V);
    double worst_cell = 0.0, gmax = 0.0;
    for (std::int64_t c = 0; c < GU.cell_count(); ++c) {
        worst_cell = std::max(worst_cell, GV.magnitude(c) - GU.magnitude(c));
        gmax = std::max(gmax, GU.magnitude(c));
    }
    const double h = std::max(U.grid.h(0), U.grid.dim == 2 ? U.grid.h(1) : 0.0);

    CheckReport r = CheckReport::inequality("resolvent_comparisons", worst_cell, 0.0, 2.0 * h * gmax);
    if (worst_node > 1e-14 * field_norm_linf(U)) r.passed = false;
    return r;
}

namespace detail {

struct GronwallData {
    double U0sq = 0.0;
    double intF = 0.0; // quadrature of |F|^2 over (0, T]
    double T = 0.0;
    double M = 0.0;    // e^{(2 gamma_+ + 1)T} (|U0|^2 + intF)
};

inline GronwallData gronwall_data(const EnergyTrace& tr, const ParamSet& ps) {
    GronwallData g;
    if (tr.entries.empty()) fail_invalid("monitor: empty trace");
    g.U0sq = tr.entries.front().l2sq;
    g.intF = tr.integrate([](const EnergyTraceEntry& e) { return e.f_l2sq; });
    g.T = tr.final_time();
    g.M = std::exp((2.0 * std::max(ps.gamma, 0.0) + 1.0) * g.T) * (g.U0sq + g.intF);
    return g;
}

} // namespace detail

/// sup |U|^2 + int phi + int psi against the constant produced by the
/// pairing-with-U chain (Gronwall in |U|^2, then the dissipation budget
/// divided by min{p lambda, q kappa}); 5% slack.
inline CheckReport check_first_energy(const EnergyTrace& tr, const ParamSet& ps) {
    auto g = detail::gronwall_data(tr, ps);
    const double gp = std::max(ps.gamma, 0.0);
    const double m = std::min(ps.p * ps.lambda, ps.q * ps.kappa);
    const double C1 =
        g.M + (0.5 * g.U0sq + (gp + 0.5) * g.T * g.M + 0.5 * g.intF) / m;

    double supU = 0.0;
    for (const auto& e : tr.entries) supU = std::max(supU, e.l2sq);
    const double intphi = tr.integrate([](const EnergyTraceEntry& e) { return e.phi; });
    const double intpsi = tr.integrate([](const EnergyTraceEntry& e) { return e.psi; });
    const double lhs = supU + intphi + intpsi;
    return CheckReport::inequality("first_energy", lhs, 1.05 * C1, 1e-12 * std::max(1.0, C1));
}

/// Pointwise-in-time Gronwall bound
///   |U(t)|^2 <= e^{(2 gamma_+ + 1) t} (|U0|^2 + int_0^t |F|^2), 5% slack.
inline CheckReport check_gronwall(const EnergyTrace& tr, const ParamSet& ps) {
    if (tr.entries.empty()) fail_invalid("monitor: empty trace");
    const double rate = 2.0 * std::max(ps.gamma, 0.0) + 1.0;
    const double U0sq = tr.entries.front().l2sq;
    double cumF = 0.0;
    double worst = 0.0; // max of lhs/rhs over the trace
    for (std::size_t i = 1; i < tr.entries.size(); ++i) {
        cumF += tr.dt * tr.entries[i].f_l2sq;
        const auto& e = tr.entries[i];
        double bound = std::exp(rate * e.t) * (U0sq + cumF);
        if (bound > 0.0) worst = std::max(worst, e.l2sq / bound);
    }
    return CheckReport::inequality("gronwall", worst, 1.05, 1e-12);
}

/// Second-level bounds (sup phi, sup psi and the squared-dissipation
/// integrals) from the delta/epsilon-weighted chain; claimable only with
/// a region certificate. epsilon = 0 certificates support the sup bounds
/// for unforced runs only.
inline CheckReport check_second_energy(const EnergyTrace& tr, const ParamSet& ps,
                                       const RegionVerdict& verdict) {
    if (!verdict.inside || !verdict.witness)
        return CheckReport::inequality("second_energy:not_claimed", 0.0, 0.0, 1.0);
    auto g = detail::gronwall_data(tr, ps);
    const double d2 = sqr(verdict.witness->delta);
    const double eps = verdict.witness->epsilon;
    const double K = std::max(ps.p, ps.q);
    const double gp = std::max(ps.gamma, 0.0);
    const double E0 = d2 * tr.entries.front().phi + tr.entries.front().psi;

    if (eps <= 0.0 && g.intF > 0.0)
        return CheckReport::inequality("second_energy:not_claimed", 0.0, 0.0, 1.0);

    const double growth = std::exp(K * gp * g.T);
    const double C2c = growth * (E0 + (eps > 0.0 ? (d2 + 1.0) / (2.0 * eps) * g.intF : 0.0));

    double sup_phi = 0.0, sup_psi = 0.0;
    for (const auto& e : tr.entries) {
        sup_phi = std::max(sup_phi, e.phi);
        sup_psi = std::max(sup_psi, e.psi);
    }
    double worst = 0.0;
    auto ratio = [&](double val, double bound) {
        if (bound <= 0.0) return val <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
        return val / bound;
    };
    worst = std::max(worst, ratio(sup_phi, C2c / std::max(d2, 1e-300)));
    worst = std::max(worst, ratio(sup_psi, C2c));

    if (eps > 0.0) {
        const double C2int =
            (2.0 / eps) * (E0 + K * gp * g.T * C2c + (d2 + 1.0) / (2.0 * eps) * g.intF);
        const double int_dphi = tr.integrate([](const EnergyTraceEntry& e) { return e.dphi_l2sq; });
        const double int_dpsi = tr.integrate([](const EnergyTraceEntry& e) { return e.dpsi_l2sq; });
        const double int_dudt = tr.integrate([](const EnergyTraceEntry& e) { return e.dudt_l2sq; });
        worst = std::max(worst, ratio(int_dphi, C2int / std::max(d2, 1e-300)));
        worst = std::max(worst, ratio(int_dpsi, C2int));
        const double C2dt = 4.0 * (g.intF + sqr(ps.gamma) * g.T * g.M
                                   + (sqr(ps.lambda) + sqr(ps.alpha)) * C2int / std::max(d2, 1e-300)
                                   + (sqr(ps.kappa) + sqr(ps.beta)) * C2int);
        worst = std::max(worst, ratio(int_dudt, C2dt));
    }
    return CheckReport::inequality("second_energy", worst, 1.05, 1e-12);
}

/// Instant-regularization bounds for merely square-integrable data:
/// sup_t t*(d^2 phi + psi) and int t |dU/dt|^2 against constants built
/// from |U0|^2 and the forcing budget alone.
inline CheckReport check_smoothing(const EnergyTrace& tr, const ParamSet& ps) {
    RegionVerdict verdict = find_witness(ps);
    if (!verdict.inside || !verdict.witness || verdict.witness->epsilon <= 0.0)
        return CheckReport::inequality("smoothing:not_claimed", 0.0, 0.0, 1.0);
    auto g = detail::gronwall_data(tr, ps);
    const double d2 = sqr(verdict.witness->delta);
    const double eps = verdict.witness->epsilon;
    const double K = std::max(ps.p, ps.q);
    const double gp = std::max(ps.gamma, 0.0);
    const double m = std::min(ps.p * ps.lambda, ps.q * ps.kappa);

    // int (d^2 phi + psi) from the first-level chain, data-only
    const double intE_bound =
        std::max(d2, 1.0) * (0.5 * g.U0sq + (gp + 0.5) * g.T * g.M + 0.5 * g.intF) / m;
    const double growth = std::exp(K * gp * g.T);
    const double C2s = growth * (intE_bound + (d2 + 1.0) / (2.0 * eps) * g.T * g.intF);

    double sup_tE = 0.0;
    for (const auto& e : tr.entries) sup_tE = std::max(sup_tE, e.t * (d2 * e.phi + e.psi));

    const double wint_dphi = tr.integrate([](const EnergyTraceEntry& e) { return e.t * e.dphi_l2sq; });
    const double wint_dpsi = tr.integrate([](const EnergyTraceEntry& e) { return e.t * e.dpsi_l2sq; });
    const double wint_dudt = tr.integrate([](const EnergyTraceEntry& e) { return e.t * e.dudt_l2sq; });
    const double C2i = (2.0 / eps) * (intE_bound + K * gp * g.T * C2s + (d2 + 1.0) / (2.0 * eps) * g.T * g.intF);
    const double C2dt = 4.0 * (g.T * g.intF + sqr(ps.gamma) * sqr(g.T) * g.M
                               + (sqr(ps.lambda) + sqr(ps.alpha)) * C2i / std::max(d2, 1e-300)
                               + (sqr(ps.kappa) + sqr(ps.beta)) * C2i);

    double worst = 0.0;
    auto ratio = [&](double val, double bound) {
        if (bound <= 0.0) return val <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
        return val / bound;
    };
    worst = std::max(worst, ratio(sup_tE, C2s));
    worst = std::max(worst, ratio(wint_dphi, C2i / std::max(d2, 1e-300)));
    worst = std::max(worst, ratio(wint_dpsi, C2i));
    worst = std::max(worst, ratio(wint_dudt, C2dt));
    return CheckReport::inequality("smoothing", worst, 1.05, 1e-12);
}

/// Stability of the smoothing quantities under one grid/step refinement:
/// sup_t t*phi within factor phi_factor, int t|dU/dt|^2 within dudt_factor.
inline CheckReport check_smoothing_refinement(const EnergyTrace& coarse, const EnergyTrace& fine,
                                              double phi_factor = 1.2, double dudt_factor = 1.5) {
    auto sup_tphi = [](const EnergyTrace& tr) {
        double s = 0.0;
        for (const auto& e : tr.entries) s = std::max(s, e.t * e.phi);
        return s;
    };
    auto wdudt = [](const EnergyTrace& tr) {
        return tr.integrate([](const EnergyTraceEntry& e) { return e.t * e.dudt_l2sq; });
    };
    double r1 = sup_tphi(fine) / std::max(sup_tphi(coarse), 1e-300);
    double r2 = wdudt(fine) / std::max(wdudt(coarse), 1e-300);
    bool ok = std::isfinite(r1) && std::isfinite(r2)
           && r1 <= phi_factor && r1 >= 1.0 / phi_factor
           && r2 <= dudt_factor && r2 >= 1.0 / dudt_factor;
    CheckReport r = CheckReport::inequality("smoothing_refinement",
                                            std::max(r1, 1.0 / std::max(r1, 1e-300)), phi_factor, 0.0);
    r.passed = ok;
    return r;
}

/// Per-step contraction of |U| for unforced gamma = 0 implicit runs:
/// |U^{n+1}| <= |U^n| + 10 * inner_tol.
inline CheckReport check_step_dissipation(const EnergyTrace& tr, double inner_tol) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < tr.entries.size(); ++i)
        worst = std::max(worst, std::sqrt(tr.entries[i].l2sq) - std::sqrt(tr.entries[i - 1].l2sq));
    return CheckReport::inequality("step_dissipation", worst, 0.0, 10.0 * inner_tol);
}

/// Exactness of the dissipation budget over a full unforced gamma = 0 run:
///   1/2|U0|^2 - 1/2|U(T)|^2 against int (p lambda phi + q kappa psi) dt,
/// matching to the stated relative tolerance (time-quadrature error).
inline CheckReport check_dissipation_budget(const EnergyTrace& tr, const ParamSet& ps,
                                            double rel_tol = 0.02) {
    const double lost = 0.5 * (tr.entries.front().l2sq - tr.entries.back().l2sq);
    const double burned = tr.integrate([&](const EnergyTraceEntry& e) {
        return ps.p * ps.lambda * e.phi + ps.q * ps.kappa * e.psi;
    });
    return CheckReport::identity("dissipation_budget", lost, burned,
                                 rel_tol * std::max(std::abs(lost), std::abs(burned)));
}

} // namespace pcgl
