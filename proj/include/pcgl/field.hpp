#pragma once

#include <cmath>
#include <vector>

#include "pcgl/core.hpp"
#include "pcgl/grid.hpp"

namespace pcgl {

/// Two-component nodal state on the interior of a Dirichlet grid;
/// boundary values are implicitly zero. Storage is row-major (x fastest).
struct Field {
    Grid grid;
    std::vector<Vec2> v;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), v(g.node_count()) {}

    Vec2& at(int ix, int iy = 0) { return v[std::size_t(iy) * grid.nodes[0] + ix]; }
    Vec2 at(int ix, int iy = 0) const { return v[std::size_t(iy) * grid.nodes[0] + ix]; }

    std::size_t size() const { return v.size(); }

    Field& operator+=(const Field& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
        return *this;
    }
    Field& operator*=(double s) {
        for (auto& x : v) x = s * x;
        return *this;
    }
    friend Field operator+(Field a, const Field& b) { a += b; return a; }
    friend Field operator-(Field a, const Field& b) { a -= b; return a; }
    friend Field operator*(double s, Field a) { a *= s; return a; }
};

/// y += s*x
inline void axpy(Field& y, double s, const Field& x) {
    for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += s * x.v[i];
}

/// Staggered forward-difference gradient. One cell per lattice interval
/// along each axis ((nodes+1)^dim cells); a cell stores the 2N entries
/// (grad u1, grad u2) taken from its low lattice corner.
struct GradField {
    Grid grid;
    std::vector<double> v; // cell-major, stride 2*dim

    GradField() = default;
    explicit GradField(const Grid& g) : grid(g), v(std::size_t(g.cell_count()) * 2 * g.dim) {}

    int stride() const { return 2 * grid.dim; }
    double* cell(std::int64_t c) { return v.data() + c * stride(); }
    const double* cell(std::int64_t c) const { return v.data() + c * stride(); }
    std::int64_t cell_count() const { return grid.cell_count(); }

    /// Euclidean magnitude of the full 2N-vector stored in cell c.
    double magnitude(std::int64_t c) const {
        const double* g = cell(c);
        double s = 0.0;
        for (int k = 0; k < stride(); ++k) s += g[k] * g[k];
        return std::sqrt(s);
    }

    GradField& operator+=(const GradField& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
        return *this;
    }
    GradField& operator-=(const GradField& o) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
        return *this;
    }
    GradField& operator*=(double s) {
        for (auto& x : v) x *= s;
        return *this;
    }
    friend GradField operator+(GradField a, const GradField& b) { a += b; return a; }
    friend GradField operator-(GradField a, const GradField& b) { a -= b; return a; }
    friend GradField operator*(double s, GradField a) { a *= s; return a; }
};

/// Nodewise quarter-turn rotation: (u1,u2) -> (-u2,u1). An exact isometry
/// in every norm below.
inline Field rotate_I(const Field& U) {
    Field R(U.grid);
    for (std::size_t i = 0; i < U.v.size(); ++i) R.v[i] = rot90(U.v[i]);
    return R;
}

/// Cellwise rotation of a gradient: (grad u1, grad u2) -> (-grad u2, grad u1).
inline GradField rotate_I(const GradField& G) {
    GradField R(G.grid);
    const int n = G.grid.dim;
    for (std::int64_t c = 0; c < G.cell_count(); ++c) {
        const double* g = G.cell(c);
        double* r = R.cell(c);
        for (int a = 0; a < n; ++a) {
            r[a] = -g[n + a];
            r[n + a] = g[a];
        }
    }
    return R;
}

namespace detail {
// Lattice accessor with the implicit zero Dirichlet ring.
inline Vec2 lattice(const Field& U, int j, int k) {
    const int nx = U.grid.nodes[0];
    const int ny = U.grid.dim == 2 ? U.grid.nodes[1] : 1;
    if (j < 1 || j > nx) return {0.0, 0.0};
    if (U.grid.dim == 2 && (k < 1 || k > ny)) return {0.0, 0.0};
    return U.at(j - 1, U.grid.dim == 2 ? k - 1 : 0);
}
} // namespace detail

/// Forward-difference gradient with zero Dirichlet ghost values.
inline GradField grad(const Field& U) {
    GradField G(U.grid);
    const Grid& g = U.grid;
    const double hx = g.h(0);
    if (g.dim == 1) {
        const int n = g.nodes[0];
        for (int c = 0; c <= n; ++c) {
            Vec2 lo = detail::lattice(U, c, 1);
            Vec2 hi = detail::lattice(U, c + 1, 1);
            double* out = G.cell(c);
            out[0] = (hi.u1 - lo.u1) / hx;
            out[1] = (hi.u2 - lo.u2) / hx;
        }
        return G;
    }
    const double hy = g.h(1);
    const int ncx = g.nodes[0] + 1;
    for (int cy = 0; cy <= g.nodes[1]; ++cy) {
        for (int cx = 0; cx <= g.nodes[0]; ++cx) {
            Vec2 p = detail::lattice(U, cx, cy);
            Vec2 px = detail::lattice(U, cx + 1, cy);
            Vec2 py = detail::lattice(U, cx, cy + 1);
            double* out = G.cell(std::int64_t(cy) * ncx + cx);
            out[0] = (px.u1 - p.u1) / hx;
            out[1] = (py.u1 - p.u1) / hy;
            out[2] = (px.u2 - p.u2) / hx;
            out[3] = (py.u2 - p.u2) / hy;
        }
    }
    return G;
}

/// Exact negative adjoint of `grad` applied to the cellwise-weighted
/// gradient: (div_weighted(G,w), V)_L2 = -(w G, grad V) for every V.
/// `w` holds one nonnegative weight per cell.
inline Field div_weighted(const GradField& G, const std::vector<double>& w) {
    const Grid& g = G.grid;
    if (std::int64_t(w.size()) != g.cell_count())
        fail_invalid("div_weighted: weight/cell count mismatch");
    Field R(g);
    const double hx = g.h(0);
    auto scatter = [&](int j, int k, Vec2 val) {
        const int nx = g.nodes[0];
        const int ny = g.dim == 2 ? g.nodes[1] : 1;
        if (j < 1 || j > nx) return;
        if (g.dim == 2 && (k < 1 || k > ny)) return;
        R.at(j - 1, g.dim == 2 ? k - 1 : 0) += val;
    };
    if (g.dim == 1) {
        for (int c = 0; c <= g.nodes[0]; ++c) {
            const double* gc = G.cell(c);
            Vec2 f = {w[c] * gc[0] / hx, w[c] * gc[1] / hx};
            scatter(c + 1, 1, {-f.u1, -f.u2});
            scatter(c, 1, f);
        }
        return R;
    }
    const double hy = g.h(1);
    const int ncx = g.nodes[0] + 1;
    for (int cy = 0; cy <= g.nodes[1]; ++cy) {
        for (int cx = 0; cx <= g.nodes[0]; ++cx) {
            std::int64_t c = std::int64_t(cy) * ncx + cx;
            const double* gc = G.cell(c);
            Vec2 fx = {w[c] * gc[0] / hx, w[c] * gc[2] / hx};
            Vec2 fy = {w[c] * gc[1] / hy, w[c] * gc[3] / hy};
            scatter(cx + 1, cy, {-fx.u1, -fx.u2});
            scatter(cx, cy, fx);
            scatter(cx, cy + 1, {-fy.u1, -fy.u2});
            scatter(cx, cy, fy);
        }
    }
    return R;
}

namespace detail {
// plain-sum reductions for solver-internal use; the compensated versions
// below are for reported quantities
inline double inner_plain(const Field& U, const Field& V) {
    double s = 0.0;
    for (std::size_t i = 0; i < U.v.size(); ++i) s += dot(U.v[i], V.v[i]);
    return s * U.grid.cell_measure();
}
inline double norm_l2_sq_plain(const Field& U) {
    double s = 0.0;
    for (const auto& x : U.v) s += dot(x, x);
    return s * U.grid.cell_measure();
}
} // namespace detail

/// L2 pairing with the h^N quadrature weight.
inline double inner(const Field& U, const Field& V) {
    KahanSum s;
    for (std::size_t i = 0; i < U.v.size(); ++i) s.add(dot(U.v[i], V.v[i]));
    return s.value() * U.grid.cell_measure();
}

/// Cellwise pairing of gradients, h^N-weighted.
inline double inner(const GradField& A, const GradField& B) {
    KahanSum s;
    for (std::size_t i = 0; i < A.v.size(); ++i) s.add(A.v[i] * B.v[i]);
    return s.value() * A.grid.cell_measure();
}

/// Nodal Lp norm of the pointwise two-component magnitude:
/// (sum |U_i|^s h^N)^(1/s).
inline double field_norm(const Field& U, double exponent) {
    if (exponent < 1.0) fail_domain("field_norm: exponent must be >= 1");
    KahanSum s;
    for (const auto& x : U.v) s.add(std::pow(norm2(x), exponent));
    return std::pow(s.value() * U.grid.cell_measure(), 1.0 / exponent);
}

inline double field_norm_l2(const Field& U) {
    KahanSum s;
    for (const auto& x : U.v) s.add(dot(x, x));
    return std::sqrt(s.value() * U.grid.cell_measure());
}

inline double field_norm_l2_sq(const Field& U) {
    KahanSum s;
    for (const auto& x : U.v) s.add(dot(x, x));
    return s.value() * U.grid.cell_measure();
}

inline double field_norm_linf(const Field& U) {
    double m = 0.0;
    for (const auto& x : U.v) m = std::max(m, norm2(x));
    return m;
}

/// Cell Lp norm of the pointwise 2N-Euclidean gradient magnitude.
inline double grad_norm(const GradField& G, double p) {
    if (p < 1.0) fail_domain("grad_norm: exponent must be >= 1");
    KahanSum s;
    for (std::int64_t c = 0; c < G.cell_count(); ++c) s.add(std::pow(G.magnitude(c), p));
    return std::pow(s.value() * G.grid.cell_measure(), 1.0 / p);
}

/// Places child values at the coinciding parent nodes, zero elsewhere.
inline Field zero_extend(const Field& U, const Grid& parent) {
    if (!is_nested_in(U.grid, parent))
        fail_invalid("zero_extend: child grid is not nested in parent");
    Field R(parent);
    const int sx = nesting_shift(U.grid, parent, 0);
    const int sy = U.grid.dim == 2 ? nesting_shift(U.grid, parent, 1) : 0;
    const int ny = U.grid.dim == 2 ? U.grid.nodes[1] : 1;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < U.grid.nodes[0]; ++ix)
            R.at(ix + sx, U.grid.dim == 2 ? iy + sy : 0) = U.at(ix, iy);
    return R;
}

/// Reads parent values at the child's nodes; left inverse of zero_extend.
inline Field restrict_to(const Field& U, const Grid& child) {
    if (!is_nested_in(child, U.grid))
        fail_invalid("restrict_to: child grid is not nested in parent");
    Field R(child);
    const int sx = nesting_shift(child, U.grid, 0);
    const int sy = child.dim == 2 ? nesting_shift(child, U.grid, 1) : 0;
    const int ny = child.dim == 2 ? child.nodes[1] : 1;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < child.nodes[0]; ++ix)
            R.at(ix, iy) = U.at(ix + sx, child.dim == 2 ? iy + sy : 0);
    return R;
}

} // namespace pcgl
