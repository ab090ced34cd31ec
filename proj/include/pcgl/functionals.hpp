#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pcgl/core.hpp"
#include "pcgl/field.hpp"
#include "pcgl/params.hpp"

namespace pcgl {

/// Tolerances and caps of the inner proximal solver.
struct ProxOpts {
    double tol_abs = 1e-10;      // stop when |residual|_L2 <= max(tol_abs, tol_rel*|U|_L2)
    double tol_rel = 1e-12;
    int max_iter = 200;          // outer (linearization) iterations
    double sigma_reg = 1e-10;    // floor for the p < 2 gradient weight, relative to |grad|_inf
};

struct EnergyPair {
    double phi = 0.0;
    double psi = 0.0;
};

/// Outcome of an implicit (proximal) solve.
struct ResolventReport {
    Field output;
    int iterations = 0;
    double residual = 0.0;
    double mu_or_nu = 0.0;
    bool converged = true;
};

/// phi(U) = (1/p) sum_cells |grad U|^p h^N  (gradient energy).
inline double phi(const Field& U, double p) {
    GradField G = grad(U);
    KahanSum s;
    for (std::int64_t c = 0; c < G.cell_count(); ++c) s.add(std::pow(G.magnitude(c), p));
    return s.value() * U.grid.cell_measure() / p;
}

/// psi(U) = (1/q) sum_nodes |U|^q h^N  (potential energy).
inline double psi(const Field& U, double q) {
    KahanSum s;
    for (const auto& x : U.v) s.add(std::pow(norm2(x), q));
    return s.value() * U.grid.cell_measure() / q;
}

inline EnergyPair energies(const Field& U, const ParamSet& ps) {
    return {phi(U, ps.p), psi(U, ps.q)};
}

namespace detail {

// |g|^{p-2} cellwise; for p < 2 flat cells get the mollified weight
// (|g|^2 + sigma^2)^{(p-2)/2} so the product weight*g stays finite.
inline std::vector<double> plap_weights(const GradField& G, double p, double sigma_reg) {
    std::vector<double> w(G.cell_count());
    if (p == 2.0) {
        std::fill(w.begin(), w.end(), 1.0);
        return w;
    }
    double gmax = 0.0;
    for (std::int64_t c = 0; c < G.cell_count(); ++c) gmax = std::max(gmax, G.magnitude(c));
    const double sigma = sigma_reg * std::max(1.0, gmax);
    for (std::int64_t c = 0; c < G.cell_count(); ++c) {
        double m = G.magnitude(c);
        if (p > 2.0)
            w[c] = std::pow(m, p - 2.0);
        else
            w[c] = (m < sigma) ? std::pow(m * m + sigma * sigma, 0.5 * (p - 2.0))
                               : std::pow(m, p - 2.0);
    }
    return w;
}

} // namespace detail

/// Exact gradient of the discrete phi: (dphi(U), V)_L2 = d/ds phi(U+sV)|_0.
/// Reduces to the componentwise 3/5-point Dirichlet Laplacian at p = 2.
inline Field dphi(const Field& U, double p, double sigma_reg = 1e-10) {
    GradField G = grad(U);
    std::vector<double> w = detail::plap_weights(G, p, sigma_reg);
    Field R = div_weighted(G, w);
    R *= -1.0;
    return R;
}

/// dpsi(U) = |U|^{q-2} U nodewise, with value 0 at U = 0.
inline Field dpsi(const Field& U, double q) {
    if (q < 2.0) fail_domain("dpsi: q must be >= 2");
    Field R(U.grid);
    for (std::size_t i = 0; i < U.v.size(); ++i) {
        double m = norm2(U.v[i]);
        R.v[i] = (m == 0.0) ? Vec2{0.0, 0.0} : std::pow(m, q - 2.0) * U.v[i];
    }
    return R;
}

namespace detail {

// Solves r + mu r^{q-1} = R on [0, R] by Newton with a bisection
// safeguard; the left side is strictly increasing so the root is unique.
inline double shrink_magnitude(double R, double mu, double q) {
    if (R <= 0.0) return 0.0;
    if (q == 2.0) return R / (1.0 + mu);
    double lo = 0.0, hi = R;
    double r = R / (1.0 + mu * std::pow(R, q - 2.0)); // secant-style start
    for (int it = 0; it < 100; ++it) {
        double t = std::pow(r, q - 2.0); // r^{q-1} = r * t
        double f = r + mu * r * t - R;
        if (std::abs(f) <= 5e-16 * R) break;
        if (f > 0.0) hi = r; else lo = r;
        double df = 1.0 + mu * (q - 1.0) * t;
        double step = r - f / df;
        r = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
    }
    return r;
}

} // namespace detail

/// Proximal map of mu*psi: the unique V with V + mu |V|^{q-2} V = U,
/// computed nodewise (V keeps the direction of U, the magnitude solves a
/// scalar monotone equation).
inline Field resolvent_psi(const Field& U, double mu, double q) {
    if (!(mu > 0.0)) fail_domain("resolvent_psi: mu must be > 0");
    if (q < 2.0) fail_domain("resolvent_psi: q must be >= 2");
    Field V(U.grid);
    for (std::size_t i = 0; i < U.v.size(); ++i) {
        double R = norm2(U.v[i]);
        if (R == 0.0) continue;
        double r = detail::shrink_magnitude(R, mu, q);
        V.v[i] = (r / R) * U.v[i];
    }
    return V;
}

/// Yosida regularization of dpsi: (U - resolvent_psi(U))/mu, which agrees
/// with dpsi(resolvent_psi(U)) up to the scalar-root tolerance.
inline Field yosida_psi(const Field& U, double mu, double q) {
    Field J = resolvent_psi(U, mu, q);
    Field R = U;
    R -= J;
    R *= 1.0 / mu;
    return R;
}

/// Moreau envelope of psi: psi(J_mu U) + (mu/2)|dpsi(J_mu U)|^2 <= psi(U).
inline double moreau_psi(const Field& U, double mu, double q) {
    if (!(mu > 0.0)) fail_domain("moreau_psi: mu must be > 0");
    Field J = resolvent_psi(U, mu, q);
    Field D = dpsi(J, q);
    return psi(J, q) + 0.5 * mu * field_norm_l2_sq(D);
}

namespace detail {

// Inexact Newton for the strongly convex objective
//   E(V) = cphi*phi(V) + cpsi*psi(V) + 1/2 |V - U|^2.
// Each outer iteration freezes the curvature data at the current point,
// solves the exact second-order model (SPD for every p > 1, q >= 2) by
// Jacobi-preconditioned CG with pow-free matvecs, and applies a
// backtracking line search. Starting from V = U keeps every iterate a
// descent point, so E(V) <= E(U) holds for the returned iterate.
struct ProxProblem {
    const Field& U;
    double cphi, cpsi, p, q, sigma_reg;
};

// Everything the outer iteration needs at one point, produced by a single
// sweep: objective value, exact gradient, and the curvature data the
// model reuses (cell weights, radial factors).
struct ProxPoint {
    double energy = 0.0;
    Field g;
    GradField G;
    std::vector<double> w; // |G|^{p-2} per cell
    std::vector<double> m; // |V|^{q-2} per node

    void eval(const ProxProblem& prob, const Field& V) {
        const double measure = V.grid.cell_measure();
        energy = 0.0;
        g = V;
        g -= prob.U;
        energy += 0.5 * norm_sq(g);
        if (prob.cphi != 0.0) {
            G = grad(V);
            w = plap_weights(G, prob.p, prob.sigma_reg);
            double acc = 0.0;
            for (std::int64_t c = 0; c < G.cell_count(); ++c)
                acc += w[c] * sqr(G.magnitude(c));
            energy += prob.cphi * acc * measure / prob.p;
            // dphi = -div(w grad V)
            GradField wG = G;
            for (std::int64_t c = 0; c < wG.cell_count(); ++c)
                for (int k = 0; k < wG.stride(); ++k) wG.cell(c)[k] *= w[c];
            Field lap = div_weighted(wG, ones(wG.cell_count()));
            axpy(g, -prob.cphi, lap);
        }
        if (prob.cpsi != 0.0) {
            m.resize(V.size());
            double acc = 0.0;
            for (std::size_t i = 0; i < V.size(); ++i) {
                double r2 = dot(V.v[i], V.v[i]);
                m[i] = r2 == 0.0 ? (prob.q == 2.0 ? 1.0 : 0.0)
                                 : std::pow(r2, 0.5 * prob.q - 1.0);
                acc += m[i] * r2;
                g.v[i] += prob.cpsi * m[i] * V.v[i];
            }
            energy += prob.cpsi * acc * measure / prob.q;
        }
    }

  private:
    static double norm_sq(const Field& f) { return detail::norm_l2_sq_plain(f); }
    static const std::vector<double>& ones(std::int64_t n) {
        static thread_local std::vector<double> buf;
        if (std::int64_t(buf.size()) != n) buf.assign(n, 1.0);
        return buf;
    }
};

// Exact second-order model at V. The gradient part of the Hessian acts
// cellwise as  w*y + s2*(G.y)G  with w = |G|^{p-2}, s2 = (p-2)|G|^{p-4};
// eigenvalues w and (p-1)w keep it positive for every p > 1, and the
// identity from the quadratic term makes the whole model uniformly SPD.
struct ProxModel {
    const Grid* grid = nullptr;
    double cphi = 0.0, cpsi = 0.0;
    GradField G;              // gradient of the expansion point
    std::vector<double> w;    // |G|^{p-2} per cell
    std::vector<double> s2;   // (p-2)|G|^{p-4} per cell
    std::vector<double> m;    // |V|^{q-2} per node
    std::vector<double> mq;   // (q-2)|V|^{q-4} per node
    std::vector<Vec2> vdir;   // V at the expansion point
    std::vector<double> diag; // Jacobi diagonal
    mutable std::vector<Vec2> pad_in, pad_out; // padded matvec scratch

    void build(const ProxProblem& prob, const Field& V, const ProxPoint& pt) {
        grid = &V.grid;
        cphi = prob.cphi;
        cpsi = prob.cpsi;
        diag.assign(V.size(), 1.0);
        if (cphi != 0.0) {
            G = pt.G;
            w = pt.w;
            s2.resize(w.size());
            for (std::int64_t c = 0; c < G.cell_count(); ++c) {
                double mag2 = sqr(G.magnitude(c));
                s2[c] = mag2 > 0.0 ? (prob.p - 2.0) * w[c] / mag2 : 0.0;
            }
            accumulate_stencil_diag(V.grid);
        }
        if (cpsi != 0.0) {
            m = pt.m;
            mq.resize(V.size());
            vdir = V.v;
            for (std::size_t i = 0; i < V.size(); ++i) {
                double r2 = dot(V.v[i], V.v[i]);
                mq[i] = r2 == 0.0 ? 0.0 : (prob.q - 2.0) * m[i] / r2;
                diag[i] += cpsi * (m[i] + mq[i] * 0.5 * r2);
            }
        }
    }

    // y = x + cphi * G^T[(w + s2 G G^T) G x] + cpsi * (m x + mq (V.x)V),
    // one sweep over cells plus one over nodes. Input and accumulator live
    // in zero-padded scratch planes so the sweep is branch-free.
    void apply(const Field& x, Field& y) const {
        const Grid& g = *grid;
        const int nx = g.nodes[0];
        const int ny = g.dim == 2 ? g.nodes[1] : 1;
        y.grid = g;
        y.v.assign(x.v.size(), Vec2{});
        if (cphi != 0.0) {
            const int px = nx + 2;
            const int py = ny + 2;
            pad_in.assign(std::size_t(px) * py, Vec2{});
            pad_out.assign(std::size_t(px) * py, Vec2{});
            for (int iy = 0; iy < ny; ++iy)
                for (int ix = 0; ix < nx; ++ix)
                    pad_in[std::size_t(iy + 1) * px + (ix + 1)] = x.v[std::size_t(iy) * nx + ix];

            const double inv_hx = 1.0 / g.h(0);
            const double inv_hy = g.dim == 2 ? 1.0 / g.h(1) : 0.0;
            const int ncx = nx + 1;
            const int ncy = g.dim == 2 ? ny + 1 : 1;
            if (g.dim == 1) {
                const Vec2* row = pad_in.data() + px;  // interior lives in plane 1
                Vec2* out = pad_out.data() + px;
                for (int cx = 0; cx < ncx; ++cx) {
                    const Vec2 p0 = row[cx];
                    const Vec2 p1 = row[cx + 1];
                    double g0 = (p1.u1 - p0.u1) * inv_hx;
                    double g1 = (p1.u2 - p0.u2) * inv_hx;
                    const double* gc = G.cell(cx);
                    const double proj = gc[0] * g0 + gc[1] * g1;
                    const double wc = cphi * w[cx], sc = cphi * s2[cx];
                    double f0 = (wc * g0 + sc * proj * gc[0]) * inv_hx;
                    double f1 = (wc * g1 + sc * proj * gc[1]) * inv_hx;
                    out[cx + 1].u1 += f0;
                    out[cx + 1].u2 += f1;
                    out[cx].u1 -= f0;
                    out[cx].u2 -= f1;
                }
            } else {
                for (int cy = 0; cy < ncy; ++cy) {
                    const Vec2* row0 = pad_in.data() + std::size_t(cy) * px;
                    const Vec2* row1 = row0 + px;
                    Vec2* out0 = pad_out.data() + std::size_t(cy) * px;
                    Vec2* out1 = out0 + px;
                    const double* wrow = w.data() + std::size_t(cy) * ncx;
                    const double* srow = s2.data() + std::size_t(cy) * ncx;
                    const double* grow = G.v.data() + std::size_t(cy) * ncx * 4;
                    for (int cx = 0; cx < ncx; ++cx) {
                        const Vec2 p0 = row0[cx];
                        double gx0 = (row0[cx + 1].u1 - p0.u1) * inv_hx;
                        double gy0 = (row1[cx].u1 - p0.u1) * inv_hy;
                        double gx1 = (row0[cx + 1].u2 - p0.u2) * inv_hx;
                        double gy1 = (row1[cx].u2 - p0.u2) * inv_hy;
                        const double* gc = grow + 4 * cx;
                        const double proj = gc[0] * gx0 + gc[1] * gy0 + gc[2] * gx1 + gc[3] * gy1;
                        const double wc = cphi * wrow[cx], sc = cphi * srow[cx];
                        const double fx0 = (wc * gx0 + sc * proj * gc[0]) * inv_hx;
                        const double fy0 = (wc * gy0 + sc * proj * gc[1]) * inv_hy;
                        const double fx1 = (wc * gx1 + sc * proj * gc[2]) * inv_hx;
                        const double fy1 = (wc * gy1 + sc * proj * gc[3]) * inv_hy;
                        out0[cx + 1].u1 += fx0;
                        out0[cx + 1].u2 += fx1;
                        out0[cx].u1 -= fx0 + fy0;
                        out0[cx].u2 -= fx1 + fy1;
                        out1[cx].u1 += fy0;
                        out1[cx].u2 += fy1;
                    }
                }
            }
            // harvest: interior lattice node (j,k) = padded (j,k), j,k >= 1
            for (int iy = 0; iy < ny; ++iy)
                for (int ix = 0; ix < nx; ++ix)
                    y.v[std::size_t(iy) * nx + ix] = pad_out[std::size_t(iy + 1) * px + (ix + 1)];
        }
        if (cpsi != 0.0) {
            for (std::size_t i = 0; i < y.v.size(); ++i) {
                Vec2 v = vdir[i];
                y.v[i] += cpsi * (m[i] * x.v[i] + mq[i] * dot(v, x.v[i]) * v);
            }
        }
        for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += x.v[i];
    }

    Field precondition(const Field& g) const {
        Field z = g;
        for (std::size_t i = 0; i < z.v.size(); ++i) z.v[i] = (1.0 / diag[i]) * z.v[i];
        return z;
    }

  private:
    void accumulate_stencil_diag(const Grid& g) {
        // per-node diagonal of G^T(w + s2 G G^T)G, assembled cell by cell
        const int stride = 2 * g.dim;
        auto bump = [&](int j, int k, double val) {
            const int nx = g.nodes[0];
            const int ny = g.dim == 2 ? g.nodes[1] : 1;
            if (j < 1 || j > nx) return;
            if (g.dim == 2 && (k < 1 || k > ny)) return;
            diag[std::size_t(g.dim == 2 ? k - 1 : 0) * nx + (j - 1)] += val;
        };
        const int ncx = g.nodes[0] + 1;
        const int ncy = g.dim == 2 ? g.nodes[1] + 1 : 1;
        for (int cy = 0; cy < ncy; ++cy)
            for (int cx = 0; cx < ncx; ++cx) {
                std::int64_t c = std::int64_t(cy) * ncx + cx;
                const double* gc = G.cell(c);
                for (int a = 0; a < g.dim; ++a) {
                    const double inv_h2 = 1.0 / sqr(g.h(a));
                    for (int mcomp = 0; mcomp < 2; ++mcomp) {
                        int k = mcomp * g.dim + a;
                        double val = cphi * (w[c] + s2[c] * sqr(gc[k])) * inv_h2;
                        if (a == 0) {
                            bump(cx, cy, val);
                            bump(cx + 1, cy, val);
                        } else {
                            bump(cx, cy, val);
                            bump(cx, cy + 1, val);
                        }
                    }
                }
            }
    }
};

// Jacobi-preconditioned CG for the frozen model; solves A d = b to the
// given relative residual.
inline Field model_cg(const ProxModel& A, const Field& b, double rel_tol, int max_iter) {
    Field d(b.grid);
    Field r = b;
    Field z = A.precondition(r);
    Field pdir = z;
    Field Ap(b.grid);
    double rz = detail::inner_plain(r, z);
    const double b2 = detail::norm_l2_sq_plain(b);
    if (b2 == 0.0) return d;
    for (int it = 0; it < max_iter; ++it) {
        A.apply(pdir, Ap);
        double alpha = rz / detail::inner_plain(pdir, Ap);
        axpy(d, alpha, pdir);
        axpy(r, -alpha, Ap);
        if (detail::norm_l2_sq_plain(r) <= rel_tol * rel_tol * b2) break;
        z = A.precondition(r);
        double rz_new = detail::inner_plain(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        pdir *= beta;
        pdir += z;
    }
    return d;
}

inline ResolventReport prox_solve(const Field& U, double cphi, double cpsi,
                                  double p, double q, const ProxOpts& opts) {
    ProxProblem prob{U, cphi, cpsi, p, q, opts.sigma_reg};
    const double tol = std::max(opts.tol_abs, opts.tol_rel * field_norm_l2(U));

    Field V = U;
    ProxPoint pt;
    pt.eval(prob, V);
    double res = field_norm_l2(pt.g);
    const double res0 = res;
    ProxModel model;
    int it = 0;
    // energy differences cancel below this level; the sufficient-decrease
    // test must not demand what double arithmetic cannot represent
    const double energy_noise = 1e-14 * (1.0 + std::abs(pt.energy));

    while (res > tol && it < opts.max_iter) {
        model.build(prob, V, pt);
        double forcing = std::clamp(std::sqrt(res / res0), 1e-2, 0.1);
        Field d = model_cg(model, -1.0 * pt.g, forcing, 400);
        double gd = inner(pt.g, d);
        if (!(gd < 0.0)) { // model solve failed to produce descent
            d = model.precondition(-1.0 * pt.g);
            gd = inner(pt.g, d);
        }

        double s = 1.0;
        const double e_prev = pt.energy;
        Field Vt = V;
        axpy(Vt, s, d);
        ProxPoint trial;
        trial.eval(prob, Vt);
        for (int ls = 0; ls < 30 && trial.energy > e_prev + 1e-4 * s * gd + energy_noise; ++ls) {
            s *= 0.5;
            Vt = V;
            axpy(Vt, s, d);
            trial.eval(prob, Vt);
        }
        V = std::move(Vt);
        pt = std::move(trial);
        res = field_norm_l2(pt.g);
        ++it;
    }

    ResolventReport rep;
    rep.output = std::move(V);
    rep.iterations = it;
    rep.residual = res;
    rep.converged = res <= tol;
    return rep;
}

} // namespace detail

/// Proximal map of nu*phi: minimizes nu*phi(V) + 1/2 |V - U|^2, i.e.
/// solves V + nu*dphi(V) = U. The report carries the fixed-point defect.
inline ResolventReport resolvent_phi(const Field& U, double nu, double p,
                                     const ProxOpts& opts = {}) {
    if (!(nu > 0.0)) fail_domain("resolvent_phi: nu must be > 0");
    ResolventReport rep = detail::prox_solve(U, nu, 0.0, p, 2.0, opts);
    rep.mu_or_nu = nu;
    return rep;
}

/// Yosida regularization of dphi: (U - resolvent_phi(U))/nu.
inline Field yosida_phi(const Field& U, double nu, double p,
                        const ProxOpts& opts = {}) {
    ResolventReport rep = resolvent_phi(U, nu, p, opts);
    Field R = U;
    R -= rep.output;
    R *= 1.0 / nu;
    return R;
}

/// Proximal map of tau*(lambda*phi + kappa*psi): the two monotone parts
/// act as one subdifferential, so a single strongly convex solve gives
/// V + tau*lambda*dphi(V) + tau*kappa*dpsi(V) = U.
inline ResolventReport combined_monotone_step(const Field& U, double tau,
                                              const ParamSet& ps,
                                              const ProxOpts& opts = {}) {
    if (!(tau > 0.0)) fail_domain("combined_monotone_step: tau must be > 0");
    ResolventReport rep = detail::prox_solve(U, tau * ps.lambda, tau * ps.kappa, ps.p, ps.q, opts);
    rep.mu_or_nu = tau;
    return rep;
}

} // namespace pcgl
