#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "pcgl/core.hpp"

namespace pcgl {

/// Axis-aligned rectangular Dirichlet box, 1D or 2D.
///
/// Only interior nodes carry unknowns; the boundary is an implicit
/// homogeneous Dirichlet layer. Along axis a the interior nodes sit at
/// offset[a] + (i+1)*h(a), i = 0..nodes[a]-1, so h(a) = extent[a]/(nodes[a]+1).
/// `offset` locates the box inside a parent box when grids are nested.
struct Grid {
    int dim = 1;
    std::array<int, 2> nodes = {1, 1};
    std::array<double, 2> extent = {1.0, 1.0};
    std::array<double, 2> offset = {0.0, 0.0};

    static Grid line(int n, double length, double off = 0.0) {
        Grid g;
        g.dim = 1;
        g.nodes = {n, 1};
        g.extent = {length, 0.0};
        g.offset = {off, 0.0};
        g.validate();
        return g;
    }

    static Grid box(int nx, int ny, double lx, double ly,
                    double offx = 0.0, double offy = 0.0) {
        Grid g;
        g.dim = 2;
        g.nodes = {nx, ny};
        g.extent = {lx, ly};
        g.offset = {offx, offy};
        g.validate();
        return g;
    }

    double h(int axis) const { return extent[axis] / (nodes[axis] + 1); }

    std::int64_t node_count() const {
        return dim == 1 ? nodes[0] : std::int64_t(nodes[0]) * nodes[1];
    }

    /// Quadrature weight of one node/cell: h^N.
    double cell_measure() const {
        return dim == 1 ? h(0) : h(0) * h(1);
    }

    /// Per-axis cell counts of the staggered gradient layout (nodes+1
    /// cells per axis, counting the boundary-adjacent ones).
    std::array<int, 2> cells() const {
        return {nodes[0] + 1, dim == 2 ? nodes[1] + 1 : 1};
    }

    std::int64_t cell_count() const {
        auto c = cells();
        return std::int64_t(c[0]) * c[1];
    }

    double node_coord(int axis, int i) const {
        return offset[axis] + (i + 1) * h(axis);
    }

    void validate() const {
        if (dim != 1 && dim != 2) fail_invalid("Grid: dim must be 1 or 2");
        for (int a = 0; a < dim; ++a) {
            if (nodes[a] < 1) fail_invalid("Grid: need at least one interior node per axis");
            if (!(extent[a] > 0.0) || !std::isfinite(extent[a]))
                fail_invalid("Grid: extent must be positive and finite");
        }
    }

    bool same_layout(const Grid& o) const {
        return dim == o.dim && nodes == o.nodes;
    }
};

namespace detail {
inline bool near_integer(double x, double tol) {
    return std::abs(x - std::llround(x)) <= tol;
}
} // namespace detail

/// True when `child` sits inside `parent` with the same spacing and every
/// child node falling exactly on a parent node (offsets and extents are
/// integer multiples of the parent spacing).
inline bool is_nested_in(const Grid& child, const Grid& parent) {
    if (child.dim != parent.dim) return false;
    for (int a = 0; a < child.dim; ++a) {
        double hp = parent.h(a);
        if (std::abs(child.h(a) - hp) > 1e-12 * hp) return false;
        double shift = child.offset[a] - parent.offset[a];
        if (shift < -1e-12 * hp) return false;
        if (shift + child.extent[a] > parent.extent[a] + 1e-12 * hp) return false;
        if (!detail::near_integer(shift / hp, 1e-9)) return false;
        if (!detail::near_integer(child.extent[a] / hp, 1e-9)) return false;
    }
    return true;
}

/// Index shift of the child's node lattice inside the parent's along `axis`.
inline int nesting_shift(const Grid& child, const Grid& parent, int axis) {
    return int(std::llround((child.offset[axis] - parent.offset[axis]) / parent.h(axis)));
}

} // namespace pcgl
