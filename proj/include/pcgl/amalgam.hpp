#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pcgl/core.hpp"
#include "pcgl/field.hpp"
#include "pcgl/monitors.hpp"

namespace pcgl {

inline double lp_norm(const Field& f, double p) { return field_norm(f, p); }
inline double lp_norm(const GradField& g, double p) { return grad_norm(g, p); }

inline double conjugate_exponent(double p) { return p / (p - 1.0); }

enum class AmalgamBranch { PGeq2, PLeq2 };

/// Graph norm of the state/gradient pair with the branch-dependent
/// exponent combination:
///   p >= 2:  (|U|_2^p  + |grad U|_p^p )^(1/p)
///   p <= 2:  (|U|_2^p' + |grad U|_p^p')^(1/p'),  1/p + 1/p' = 1.
struct AmalgamNorm {
    double p = 2.0;
    double value = 0.0;
    AmalgamBranch branch = AmalgamBranch::PGeq2;
};

inline AmalgamNorm xp_norm(const Field& U, double p) {
    const int N = U.grid.dim;
    if (!(p > std::max(1.0, 2.0 * N / (N + 2.0))))
        fail_domain("xp_norm: p must exceed max{1, 2N/(N+2)}");
    AmalgamNorm r;
    r.p = p;
    const double l2 = field_norm_l2(U);
    const double gp = grad_norm(grad(U), p);
    if (p >= 2.0) {
        r.branch = AmalgamBranch::PGeq2;
        r.value = std::pow(std::pow(l2, p) + std::pow(gp, p), 1.0 / p);
    } else {
        r.branch = AmalgamBranch::PLeq2;
        const double pp = conjugate_exponent(p);
        r.value = std::pow(std::pow(l2, pp) + std::pow(gp, pp), 1.0 / pp);
    }
    return r;
}

/// Both right-hand sides in circulation for the first convexity
/// inequality at p >= 2, evaluated on the same pair:
///   sharp:     (1/2 |f|_p^p' + 1/2 |g|_p^p')^(p-1)   (conjugate mean; implies the classical)
///   classical: 1/2 |f|_p^p + 1/2 |g|_p^p
///   alt:       (1/2 |f|_p^p' + 1/2 |g|_p^p')^(1/(p-1)),
/// the last of which is not degree-p homogeneous and fails under scaling
/// for p > 2; it is kept so the numerics can exhibit that.
struct ClarksonFirstForms {
    double lhs = 0.0;
    double rhs_sharp = 0.0;
    double rhs_classical = 0.0;
    double rhs_alt = 0.0;
};

template <class V>
inline ClarksonFirstForms clarkson_first_forms(const V& f, const V& g, double p) {
    ClarksonFirstForms r;
    const double pp = conjugate_exponent(p);
    V mid = 0.5 * (f + g);
    V dif = 0.5 * (f - g);
    r.lhs = std::pow(lp_norm(mid, p), p) + std::pow(lp_norm(dif, p), p);
    const double nf = lp_norm(f, p), ng = lp_norm(g, p);
    const double mean_conj = 0.5 * std::pow(nf, pp) + 0.5 * std::pow(ng, pp);
    r.rhs_sharp = std::pow(mean_conj, p - 1.0);
    r.rhs_classical = 0.5 * std::pow(nf, p) + 0.5 * std::pow(ng, p);
    r.rhs_alt = std::pow(mean_conj, 1.0 / (p - 1.0));
    return r;
}

/// First convexity inequality, p >= 2 (sharp conjugate-mean form):
///   |(f+g)/2|_p^p + |(f-g)/2|_p^p <= (1/2 |f|_p^p' + 1/2 |g|_p^p')^(p-1).
template <class V>
inline CheckReport clarkson_first(const V& f, const V& g, double p) {
    if (!(p >= 2.0)) fail_domain("clarkson_first: p must be >= 2");
    auto forms = clarkson_first_forms(f, g, p);
    double scale = std::max({1e-30, forms.lhs, forms.rhs_sharp});
    return CheckReport::inequality("clarkson_first", forms.lhs, forms.rhs_sharp, 1e-12 * scale);
}

/// Second convexity inequality, 1 < p < 2:
///   |(f+g)/2|_p^p' + |(f-g)/2|_p^p' <= (1/2 |f|_p^p + 1/2 |g|_p^p)^(1/(p-1)).
template <class V>
inline CheckReport clarkson_second(const V& f, const V& g, double p) {
    if (!(p > 1.0 && p < 2.0)) fail_domain("clarkson_second: p must be in (1,2)");
    const double pp = conjugate_exponent(p);
    V mid = 0.5 * (f + g);
    V dif = 0.5 * (f - g);
    double lhs = std::pow(lp_norm(mid, p), pp) + std::pow(lp_norm(dif, p), pp);
    double rhs = std::pow(0.5 * std::pow(lp_norm(f, p), p) + 0.5 * std::pow(lp_norm(g, p), p),
                          1.0 / (p - 1.0));
    double scale = std::max({1e-30, lhs, rhs});
    return CheckReport::inequality("clarkson_second", lhs, rhs, 1e-12 * scale);
}

namespace detail {
inline double vec_norm(std::span<const double> a) {
    KahanSum s;
    for (double x : a) s.add(x * x);
    return std::sqrt(s.value());
}
} // namespace detail

/// Pointwise version on plain vectors, p >= 2:
///   (|(a+b)/2|^p + |(a-b)/2|^p)^(1/p) <= (1/2 |a|^p' + 1/2 |b|^p')^(1/p').
inline CheckReport local_clarkson(std::span<const double> a, std::span<const double> b, double p) {
    if (!(p >= 2.0)) fail_domain("local_clarkson: p must be >= 2");
    if (a.size() != b.size()) fail_invalid("local_clarkson: size mismatch");
    const double pp = conjugate_exponent(p);
    std::vector<double> mid(a.size()), dif(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        mid[i] = 0.5 * (a[i] + b[i]);
        dif[i] = 0.5 * (a[i] - b[i]);
    }
    double lhs = std::pow(std::pow(detail::vec_norm(mid), p) + std::pow(detail::vec_norm(dif), p),
                          1.0 / p);
    double rhs = std::pow(0.5 * std::pow(detail::vec_norm(a), pp)
                          + 0.5 * std::pow(detail::vec_norm(b), pp), 1.0 / pp);
    double scale = std::max({1e-30, lhs, rhs});
    return CheckReport::inequality("local_clarkson", lhs, rhs, 1e-12 * scale);
}

/// Scalar convexity helpers for r >= 1, a >= b >= 0:
///   (a-b)^r <= a^r - b^r   and   (a+b)^r <= 2^(r-1) (a^r + b^r).
inline CheckReport helper_inequalities(double a, double b, double r) {
    if (!(r >= 1.0)) fail_domain("helper_inequalities: r must be >= 1");
    if (!(a >= b && b >= 0.0)) fail_domain("helper_inequalities: need a >= b >= 0");
    double l1 = std::pow(a - b, r), r1 = std::pow(a, r) - std::pow(b, r);
    double l2 = std::pow(a + b, r), r2 = std::pow(2.0, r - 1.0) * (std::pow(a, r) + std::pow(b, r));
    double scale = std::max({1e-30, l2, r2});
    CheckReport rep = CheckReport::inequality("helper_inequalities", l1, r1, 1e-12 * scale);
    if (l2 > r2 + 1e-12 * scale) rep.passed = false;
    return rep;
}

/// Counting-measure specializations of the two-sided norm interchange,
/// 0 < q <= p, on pointwise magnitudes of two fields:
///   | (|f1|^q + |f2|^q)^(1/q) |_p <= (|f1|_p^q + |f2|_p^q)^(1/q)
///   (|f1|_q^p + |f2|_q^p)^(1/p) <= | (|f1|^p + |f2|^p)^(1/p) |_q.
inline CheckReport minkowski_counting(const Field& f1, const Field& f2, double p, double q) {
    if (!(q > 0.0) || q > p) fail_domain("minkowski_counting: need 0 < q <= p");
    const double measure = f1.grid.cell_measure();
    auto scalar_norm = [&](auto&& value_at, double e) {
        KahanSum s;
        for (std::size_t i = 0; i < f1.v.size(); ++i) s.add(std::pow(value_at(i), e));
        return std::pow(s.value() * measure, 1.0 / e);
    };
    auto mag_mix = [&](double inner_e) {
        return [&, inner_e](std::size_t i) {
            return std::pow(std::pow(norm2(f1.v[i]), inner_e) + std::pow(norm2(f2.v[i]), inner_e),
                            1.0 / inner_e);
        };
    };
    auto mag = [&](const Field& f) {
        return [&f](std::size_t i) { return norm2(f.v[i]); };
    };

    double lhs1 = scalar_norm(mag_mix(q), p);
    double rhs1 = std::pow(std::pow(scalar_norm(mag(f1), p), q) + std::pow(scalar_norm(mag(f2), p), q),
                           1.0 / q);
    double lhs2 = std::pow(std::pow(scalar_norm(mag(f1), q), p) + std::pow(scalar_norm(mag(f2), q), p),
                           1.0 / p);
    double rhs2 = scalar_norm(mag_mix(p), q);

    double scale = std::max({1e-30, lhs1, rhs1, lhs2, rhs2});
    CheckReport rep = CheckReport::inequality("minkowski_counting", lhs1, rhs1, 1e-12 * scale);
    if (lhs2 > rhs2 + 1e-12 * scale) rep.passed = false;
    return rep;
}

/// Midpoint convexity of the graph norm with the branch exponent
/// e = p (p >= 2) or e = p' (p < 2):
///   |(u+v)/2|_X^e + |(u-v)/2|_X^e <= 1/2 (|u|_X^e + |v|_X^e).
inline CheckReport uniform_convexity_suite(const Field& u, const Field& v, double p) {
    const double e = p >= 2.0 ? p : conjugate_exponent(p);
    Field mid = 0.5 * (u + v);
    Field dif = 0.5 * (u - v);
    double lhs = std::pow(xp_norm(mid, p).value, e) + std::pow(xp_norm(dif, p).value, e);
    double rhs = 0.5 * (std::pow(xp_norm(u, p).value, e) + std::pow(xp_norm(v, p).value, e));
    double scale = std::max({1e-30, lhs, rhs});
    return CheckReport::inequality("uniform_convexity", lhs, rhs, 1e-12 * scale);
}

} // namespace pcgl
