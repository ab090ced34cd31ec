#pragma once

#include <string>
#include <vector>

#include "pcgl/core.hpp"
#include "pcgl/field.hpp"
#include "pcgl/integrator.hpp"
#include "pcgl/monitors.hpp"

namespace pcgl {

/// Nested-box convergence experiment: the same flow is solved on a chain
/// of boxes Omega_1 c Omega_2 c ... with data supported in the smallest
/// one, and the zero-extended solutions are compared on a fixed window.
struct ExhaustionPlan {
    Grid parent;
    std::vector<Grid> children; // strictly growing, all nested in parent
    Field U0;                   // on parent, supported inside children.front()
    Grid window;                // comparison window (defaults to children.front())

    void validate() const {
        if (children.size() < 2) fail_invalid("ExhaustionPlan: need at least two children");
        for (const auto& c : children)
            if (!is_nested_in(c, parent)) fail_invalid("ExhaustionPlan: child not nested in parent");
        for (std::size_t k = 1; k < children.size(); ++k)
            if (!is_nested_in(children[k - 1], children[k]))
                fail_invalid("ExhaustionPlan: children must be increasing");
        if (!is_nested_in(window, parent)) fail_invalid("ExhaustionPlan: window not nested");
        if (!U0.grid.same_layout(parent)) fail_invalid("ExhaustionPlan: U0 must live on the parent grid");
    }
};

/// Restrictions of U0 to each child. Every nonzero node of U0 must be
/// covered by the child (restriction would otherwise drop mass).
inline std::vector<Field> initial_data_family(const Field& U0, const std::vector<Grid>& children) {
    std::vector<Field> out;
    out.reserve(children.size());
    for (const auto& child : children) {
        Field r = restrict_to(U0, child);
        if (std::abs(field_norm_l2_sq(r) - field_norm_l2_sq(U0)) >
            1e-12 * std::max(1.0, field_norm_l2_sq(U0)))
            fail_invalid("initial_data_family: U0 has support outside a child box");
        out.push_back(std::move(r));
    }
    return out;
}

struct ExhaustionStep {
    int k = 0;
    double box_width = 0.0;
    double sup_diff = 0.0;   // max_t | ext(U^k) - ext(U^{k+1}) |_L2 on the window
    double decay_ratio = 0.0; // sup_diff(k) / sup_diff(k-1), 0 for the first
};

struct ExhaustionResult {
    std::vector<ExhaustionStep> steps;
    std::vector<Trajectory> runs; // one per child, in order
    bool completed = true;
};

/// Runs every child with the restricted data and the same clock, then
/// measures stabilization of consecutive zero-extended solutions on the
/// window. Operator-level comparisons across grids are deliberately
/// avoided; only whole-field L2 differences of extensions are taken.
inline ExhaustionResult run_exhaustion(const ExhaustionPlan& plan, const SchemeConfig& cfg,
                                       const ParamSet& ps, const Forcing& F,
                                       int snapshot_stride = 1) {
    plan.validate();
    ExhaustionResult res;
    std::vector<Field> data = initial_data_family(plan.U0, plan.children);

    for (std::size_t k = 0; k < plan.children.size(); ++k) {
        Trajectory t = simulate(data[k], cfg, ps, F, snapshot_stride);
        if (!t.completed) {
            res.completed = false;
            res.runs.push_back(std::move(t));
            return res;
        }
        res.runs.push_back(std::move(t));
    }

    for (std::size_t k = 0; k + 1 < plan.children.size(); ++k) {
        const auto& a = res.runs[k].snapshots;
        const auto& b = res.runs[k + 1].snapshots;
        const std::size_t n = std::min(a.size(), b.size());
        double sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Field ea = zero_extend(a[i].second, plan.parent);
            Field eb = zero_extend(b[i].second, plan.parent);
            ea -= eb;
            sup = std::max(sup, field_norm_l2(restrict_to(ea, plan.window)));
        }
        ExhaustionStep step;
        step.k = int(k) + 1;
        step.box_width = plan.children[k].extent[0];
        step.sup_diff = sup;
        step.decay_ratio = res.steps.empty() ? 0.0
                                             : sup / std::max(res.steps.back().sup_diff, 1e-300);
        res.steps.push_back(step);
    }
    return res;
}

/// Concentric 1D plan: boxes of the given widths sharing a center, all
/// aligned to the spacing h of the largest box.
inline ExhaustionPlan concentric_plan_1d(const std::vector<double>& widths, double h,
                                         const Field& bump_on_parent) {
    if (widths.size() < 2) fail_invalid("concentric_plan_1d: need at least two widths");
    ExhaustionPlan plan;
    const double big = widths.back();
    plan.parent = Grid::line(int(std::llround(big / h)) - 1, big);
    for (double w : widths) {
        int n = int(std::llround(w / h)) - 1;
        if (n < 1) fail_invalid("concentric_plan_1d: width too small for spacing");
        double off = 0.5 * (big - w);
        plan.children.push_back(Grid::line(n, w, off));
    }
    plan.window = plan.children.front();
    plan.U0 = bump_on_parent;
    plan.validate();
    return plan;
}

} // namespace pcgl
