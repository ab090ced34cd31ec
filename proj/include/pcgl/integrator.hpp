#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "pcgl/core.hpp"
#include "pcgl/field.hpp"
#include "pcgl/functionals.hpp"
#include "pcgl/params.hpp"

namespace pcgl {

/// External force F(t): zero, a steady field, or a left-piecewise
/// time-sampled sequence.
class Forcing {
  public:
    Forcing() = default;

    static Forcing zero() { return Forcing(); }

    static Forcing steady(Field f) {
        Forcing F;
        F.kind_ = Kind::Steady;
        F.steady_ = std::move(f);
        return F;
    }

    static Forcing sampled(std::vector<std::pair<double, Field>> samples) {
        if (samples.empty()) fail_invalid("Forcing: empty sample list");
        Forcing F;
        F.kind_ = Kind::Sampled;
        F.samples_ = std::move(samples);
        return F;
    }

    bool is_zero() const { return kind_ == Kind::Zero; }

    /// F evaluated at time t on grid g (zero forcing materializes lazily).
    Field eval(double t, const Grid& g) const {
        switch (kind_) {
            case Kind::Zero: return Field(g);
            case Kind::Steady: return steady_;
            default: {
                std::size_t k = 0;
                while (k + 1 < samples_.size() && samples_[k + 1].first <= t) ++k;
                return samples_[k].second;
            }
        }
    }

    double l2sq(double t, const Grid& g) const {
        if (kind_ == Kind::Zero) return 0.0;
        return field_norm_l2_sq(eval(t, g));
    }

  private:
    enum class Kind { Zero, Steady, Sampled };
    Kind kind_ = Kind::Zero;
    Field steady_;
    std::vector<std::pair<double, Field>> samples_;
};

enum class Scheme { ImexSplit, FullyImplicit };

/// Time-stepping configuration. mu/nu > 0 swap the rotational couplings
/// to their Lipschitz (Yosida) regularizations.
struct SchemeConfig {
    Scheme scheme = Scheme::ImexSplit;
    double dt = 1e-3;
    double T = 1.0;
    double mu = 0.0;           // psi-regularization (0 = off)
    double nu = 0.0;           // phi-regularization (0 = off)
    ProxOpts prox;             // inner proximal solve
    double step_tol = 1e-10;   // implicit fixed-point residual target
    int step_max_iter = 500;
    double step_relax = 0.5;   // implicit fixed-point damping

    void validate() const {
        if (!(dt > 0.0) || !(T > 0.0) || dt > T) fail_domain("SchemeConfig: need 0 < dt <= T");
        if (mu < 0.0 || nu < 0.0) fail_domain("SchemeConfig: regularizations must be >= 0");
    }
};

/// One per-step record of the conserved/dissipated quantities and the
/// inequality diagnostics monitors feed on.
struct EnergyTraceEntry {
    int step = 0;
    double t = 0.0;
    double l2sq = 0.0;       // |U|^2
    double phi = 0.0;
    double psi = 0.0;
    double pairing = 0.0;    // (dphi(U), dpsi(U))
    double key_ratio = 0.0;  // |(dphi, I dpsi)| / (c_q (dphi, dpsi)), 0 when undefined
    double residual = 0.0;   // inner-solver defect of the step that produced U
    double dphi_l2sq = 0.0;
    double dpsi_l2sq = 0.0;
    double dudt_l2sq = 0.0;  // |(U^n - U^{n-1})/dt|^2, 0 at step 0
    double f_l2sq = 0.0;     // |F|^2 sampled at the step's left endpoint
};

struct EnergyTrace {
    std::vector<EnergyTraceEntry> entries;
    double dt = 0.0;

    double final_time() const { return entries.empty() ? 0.0 : entries.back().t; }
    /// Right-endpoint quadrature of a per-entry quantity over (0, T].
    template <class Get>
    double integrate(Get get) const {
        KahanSum s;
        for (std::size_t i = 1; i < entries.size(); ++i) s.add(get(entries[i]));
        return s.value() * dt;
    }
};

struct Trajectory {
    std::vector<std::pair<double, Field>> snapshots;
    EnergyTrace trace;
    bool completed = true;
    std::string failure = {};
};

namespace detail {

inline Field skew_drive(const Field& U, const SchemeConfig& cfg, const ParamSet& ps) {
    Field A = (cfg.nu > 0.0) ? yosida_phi(U, cfg.nu, ps.p, cfg.prox) : dphi(U, ps.p, cfg.prox.sigma_reg);
    Field B = (cfg.mu > 0.0) ? yosida_psi(U, cfg.mu, ps.q) : dpsi(U, ps.q);
    Field S = rotate_I(A);
    S *= ps.alpha;
    axpy(S, ps.beta, rotate_I(B));
    return S;
}

} // namespace detail

/// Lie split: the rotational and gain/forcing parts advance explicitly,
/// then the monotone core contracts through its proximal map. The
/// explicit stage is energy-neutral to leading order because the
/// rotational fields are pointwise orthogonal to U.
inline ResolventReport step_imex(const Field& U, double t, const SchemeConfig& cfg,
                                 const ParamSet& ps, const Forcing& F) {
    Field W = U;
    Field drive = U;
    drive *= ps.gamma;
    if (!F.is_zero()) drive += F.eval(t, U.grid);
    axpy(drive, -1.0, detail::skew_drive(U, cfg, ps));
    axpy(W, cfg.dt, drive);
    return combined_monotone_step(W, cfg.dt, ps, cfg.prox);
}

/// Backward step on the full operator, as a damped fixed point around the
/// monotone proximal core. Non-convergence within the cap is reported,
/// not thrown; it is the expected failure mode for dt too large.
inline ResolventReport step_implicit(const Field& U, double t, const SchemeConfig& cfg,
                                     const ParamSet& ps, const Forcing& F) {
    Field rhs = U;
    if (!F.is_zero()) axpy(rhs, cfg.dt, F.eval(t, U.grid));

    // the outer residual cannot undercut the inner solves, so drive the
    // proximal core an order of magnitude below the step target
    SchemeConfig c = cfg;
    c.prox.tol_abs = std::min(cfg.prox.tol_abs, 0.1 * cfg.step_tol);
    c.prox.tol_rel = std::min(cfg.prox.tol_rel, 1e-14);

    Field X = U;
    ResolventReport inner_rep;
    double res = 0.0;
    int it = 0;
    for (; it < cfg.step_max_iter; ++it) {
        Field skew = detail::skew_drive(X, c, ps);
        Field S = rhs;
        axpy(S, cfg.dt * ps.gamma, X);
        axpy(S, -cfg.dt, skew);
        inner_rep = combined_monotone_step(S, cfg.dt, ps, c.prox);

        // defect of X as a solution of the implicit equation
        Field R = X;
        axpy(R, cfg.dt * ps.lambda, dphi(X, ps.p, cfg.prox.sigma_reg));
        axpy(R, cfg.dt * ps.kappa, dpsi(X, ps.q));
        axpy(R, -cfg.dt * ps.gamma, X);
        axpy(R, cfg.dt, skew);
        R -= rhs;
        res = field_norm_l2(R);
        if (res <= cfg.step_tol) break;

        X *= (1.0 - cfg.step_relax);
        axpy(X, cfg.step_relax, inner_rep.output);
    }

    ResolventReport rep;
    rep.output = std::move(X);
    rep.iterations = it;
    rep.residual = res;
    rep.mu_or_nu = cfg.dt;
    rep.converged = res <= cfg.step_tol;
    return rep;
}

namespace detail {

inline EnergyTraceEntry trace_entry(const Field& U, int step, double t, const ParamSet& ps,
                                    double residual, double dudt_l2sq, double f_l2sq) {
    EnergyTraceEntry e;
    e.step = step;
    e.t = t;
    e.l2sq = field_norm_l2_sq(U);
    e.phi = phi(U, ps.p);
    e.psi = psi(U, ps.q);
    Field dp = dphi(U, ps.p);
    Field dq = dpsi(U, ps.q);
    e.pairing = inner(dp, dq);
    double cq = strength_constant(ps.q);
    if (cq > 0.0 && e.pairing > 0.0)
        e.key_ratio = std::abs(inner(dp, rotate_I(dq))) / (cq * e.pairing);
    e.residual = residual;
    e.dphi_l2sq = field_norm_l2_sq(dp);
    e.dpsi_l2sq = field_norm_l2_sq(dq);
    e.dudt_l2sq = dudt_l2sq;
    e.f_l2sq = f_l2sq;
    return e;
}

} // namespace detail

/// Advances U0 to T with fixed dt, recording the energy trace each step
/// and snapshots at the given stride (0 = initial and final only).
/// Membership of the parameters in the admissible region is not required;
/// monitors decide which estimates are claimable afterwards.
inline Trajectory simulate(const Field& U0, const SchemeConfig& cfg, const ParamSet& ps,
                           const Forcing& F, int snapshot_stride = 0) {
    cfg.validate();
    ps.validate();

    const int n_steps = std::max(1, int(std::llround(cfg.T / cfg.dt)));
    SchemeConfig c = cfg;
    c.dt = cfg.T / n_steps; // land exactly on T

    Trajectory traj;
    traj.trace.dt = c.dt;
    traj.trace.entries.reserve(n_steps + 1);
    traj.trace.entries.push_back(detail::trace_entry(U0, 0, 0.0, ps, 0.0, 0.0, 0.0));
    traj.snapshots.emplace_back(0.0, U0);

    Field U = U0;
    for (int n = 0; n < n_steps; ++n) {
        const double t = n * c.dt;
        ResolventReport rep = (c.scheme == Scheme::ImexSplit)
                                  ? step_imex(U, t, c, ps, F)
                                  : step_implicit(U, t, c, ps, F);
        if (!rep.converged) {
            traj.completed = false;
            traj.failure = "step " + std::to_string(n + 1) + " residual " + std::to_string(rep.residual);
            break;
        }
        Field Unew = std::move(rep.output);
        Field diff = Unew;
        diff -= U;
        double dudt = field_norm_l2_sq(diff) / sqr(c.dt);
        U = std::move(Unew);
        traj.trace.entries.push_back(
            detail::trace_entry(U, n + 1, (n + 1) * c.dt, ps, rep.residual, dudt, F.l2sq(t, U.grid)));
        bool last = n + 1 == n_steps;
        if (last || (snapshot_stride > 0 && (n + 1) % snapshot_stride == 0))
            traj.snapshots.emplace_back((n + 1) * c.dt, U);
    }
    return traj;
}

} // namespace pcgl
