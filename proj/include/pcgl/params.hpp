#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>

#include "pcgl/core.hpp"

namespace pcgl {

/// Physical parameters of the planar Ginzburg-Landau flow
///   dU/dt + (lambda + alpha*I)(-Lap_p U) + (kappa + beta*I)|U|^(q-2)U - gamma U = F.
struct ParamSet {
    double lambda = 1.0; // diffusion strength, > 0
    double kappa = 1.0;  // potential strength, > 0
    double alpha = 0.0;  // dispersion
    double beta = 0.0;   // potential rotation
    double gamma = 0.0;  // linear gain
    double p = 2.0;      // diffusion exponent, > max{1, 2N/(N+2)}
    double q = 2.0;      // potential exponent, >= 2
    int N = 1;           // spatial dimension, 1 or 2

    void validate() const {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) fail_domain("ParamSet: lambda must be > 0");
        if (!(kappa > 0.0) || !std::isfinite(kappa)) fail_domain("ParamSet: kappa must be > 0");
        if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma))
            fail_domain("ParamSet: alpha, beta, gamma must be finite");
        if (!(q >= 2.0)) fail_domain("ParamSet: q must be >= 2");
        if (N != 1 && N != 2) fail_domain("ParamSet: N must be 1 or 2");
        double p_min = std::max(1.0, 2.0 * N / (N + 2.0));
        if (!(p > p_min)) fail_domain("ParamSet: p must exceed max{1, 2N/(N+2)}");
        if (!std::isfinite(p)) fail_domain("ParamSet: p must be finite");
    }
};

/// c_q = (q-2) / (2 sqrt(q-1)), the strength of the potential nonlinearity.
/// Zero at q = 2 and nondecreasing in q.
inline double strength_constant(double q) {
    if (q < 2.0) fail_domain("strength_constant: q must be >= 2");
    return (q - 2.0) / (2.0 * std::sqrt(q - 1.0));
}

enum class RegionSet { S1, S2, S3, S4 };

/// Membership verdict for the admissible parameter region, together with
/// the certificate (delta, epsilon) produced by the energy-balance search
/// when membership holds.
struct RegionVerdict {
    bool inside = false;
    std::set<RegionSet> matched_sets;
    struct Witness {
        double delta = 0.0;
        double epsilon = 0.0;
        double J = 0.0;
    };
    std::optional<Witness> witness;
    double discriminant = 0.0; // value of D/4 (infinite when q = 2)
};

/// Raw membership test for the region
///   { (x,y) : xy >= 0  or  (|xy| - 1) / (|x| + |y|) < r },
/// with boundary points (equality) classified outside. The matched sets
/// record which of the four covering pieces contain the point:
///   S1: |x| <= r, S2: |y| <= r, S3: xy > 0,
///   S4: the mixed-sign part of the defining inequality.
inline RegionVerdict cgl_region_test(double x, double y, double r) {
    RegionVerdict v;
    bool r_inf = std::isinf(r);
    if (!(r > 0.0)) fail_domain("cgl_region_test: r must be positive");

    const double xy = x * y;
    if (xy >= 0.0) {
        v.inside = true;
    } else {
        // both x and y are nonzero here, so the ratio is well defined
        v.inside = r_inf || (std::abs(xy) - 1.0) / (std::abs(x) + std::abs(y)) < r;
    }
    if (std::abs(x) <= r) v.matched_sets.insert(RegionSet::S1);
    if (std::abs(y) <= r) v.matched_sets.insert(RegionSet::S2);
    if (xy > 0.0) v.matched_sets.insert(RegionSet::S3);
    if (xy < 0.0 && (r_inf || std::abs(xy) - 1.0 < r * (std::abs(x) + std::abs(y))))
        v.matched_sets.insert(RegionSet::S4);
    return v;
}

/// J(delta, epsilon) = 2 delta sqrt((1 + c_q^-2)(lambda-eps)(kappa-eps))
///                     + c_q^-1 (delta^2 kappa + lambda) - |delta^2 beta - alpha|.
/// Nonnegativity certifies that the weighted sum of the two energy
/// identities absorbs the rotational cross term.
inline double witness_J(double delta, double epsilon, const ParamSet& ps) {
    ps.validate();
    if (!(ps.q > 2.0)) fail_domain("witness_J: requires q > 2 (c_q > 0)");
    if (epsilon < 0.0 || epsilon >= std::min(ps.lambda, ps.kappa))
        fail_domain("witness_J: epsilon must lie in [0, min{lambda, kappa})");
    const double rinv = 1.0 / strength_constant(ps.q); // c_q^{-1}
    return 2.0 * delta * std::sqrt((1.0 + rinv * rinv) * (ps.lambda - epsilon) * (ps.kappa - epsilon))
         + rinv * (delta * delta * ps.kappa + ps.lambda)
         - std::abs(delta * delta * ps.beta - ps.alpha);
}

/// Searches for a certificate (delta, epsilon) with J(delta, epsilon) >= 0.
///
/// delta follows the structure of J as a quadratic in delta:
///   - alpha*beta > 0: delta = sqrt(alpha/beta) cancels the cross term;
///   - |beta| <= kappa/c_q: the quadratic opens upward, a large enough
///     delta works;
///   - otherwise: the vertex delta = sqrt((1+c_q^-2) lambda kappa)/(|beta| - kappa/c_q),
///     where J(delta,0) = (D/4)/(|beta| - kappa/c_q) is positive exactly
///     when the discriminant is.
/// epsilon starts from min{lambda,kappa}/2 and halves until J stays
/// nonnegative (largest passing value wins; 0 is the fallback).
inline RegionVerdict find_witness(const ParamSet& ps) {
    ps.validate();
    const double x = ps.alpha / ps.lambda;
    const double y = ps.beta / ps.kappa;

    if (ps.q == 2.0) {
        // c_q = 0: the region constraint is vacuous and the cross term is
        // orthogonal on its own, so any (delta, epsilon) certifies.
        RegionVerdict v = cgl_region_test(x, y, std::numeric_limits<double>::infinity());
        v.inside = true;
        v.discriminant = std::numeric_limits<double>::infinity();
        v.witness = RegionVerdict::Witness{1.0, 0.5 * std::min(ps.lambda, ps.kappa),
                                           std::numeric_limits<double>::infinity()};
        return v;
    }

    const double cq = strength_constant(ps.q);
    const double r = 1.0 / cq;
    RegionVerdict v = cgl_region_test(x, y, r);
    v.discriminant = (1.0 + r * r) * ps.lambda * ps.kappa
                   - (r * ps.kappa - std::abs(ps.beta)) * (r * ps.lambda - std::abs(ps.alpha));
    if (!v.inside) return v;

    const double A = std::sqrt((1.0 + r * r) * ps.lambda * ps.kappa);
    double delta;
    if (ps.alpha * ps.beta > 0.0) {
        delta = std::sqrt(ps.alpha / ps.beta);
    } else if (std::abs(ps.beta) <= r * ps.kappa) {
        delta = std::max(1.0, (std::abs(ps.alpha) - r * ps.lambda) / A);
    } else {
        // the vertex blows up as |beta| approaches kappa/c_q from above;
        // capping keeps J finite and still certifies (the quadratic term
        // is then negligible against the linear one)
        delta = std::min(A / (std::abs(ps.beta) - r * ps.kappa), 1e100);
    }

    double eps = 0.5 * std::min(ps.lambda, ps.kappa);
    for (int k = 0; k < 80 && witness_J(delta, eps, ps) < 0.0; ++k) eps *= 0.5;
    if (witness_J(delta, eps, ps) < 0.0) eps = 0.0;

    const double J = witness_J(delta, eps, ps);
    if (J >= 0.0) v.witness = RegionVerdict::Witness{delta, eps, J};
    return v;
}

struct OkazawaYokota {
    bool satisfied = true;
    bool degenerate = false; // p <= 2: the bound carries no restriction
};

/// Classical monotonicity condition |alpha|/lambda < 2 sqrt(p-1)/(p-2)
/// of the p != 2 prior art; informational only.
inline OkazawaYokota okazawa_yokota_condition(const ParamSet& ps) {
    ps.validate();
    if (ps.p <= 2.0) return {true, true};
    double bound = 2.0 * std::sqrt(ps.p - 1.0) / (ps.p - 2.0);
    return {std::abs(ps.alpha) / ps.lambda < bound, false};
}

inline std::string region_set_name(RegionSet s) {
    switch (s) {
        case RegionSet::S1: return "S1";
        case RegionSet::S2: return "S2";
        case RegionSet::S3: return "S3";
        default: return "S4";
    }
}

} // namespace pcgl
