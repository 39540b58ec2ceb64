#pragma once

// Purified preparation fidelity and measurement noise as functions of the
// number of ancillas, for ideal (closed form) and depolarizing (recurrence) CNOTs.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spampur/error.hpp"
#include "spampur/noise.hpp"
#include "spampur/qops.hpp"

namespace spampur {

struct PrepResult {
    double fidelity = 1.0; ///< f^(n) = <0|rho^(n)|0>
    double success = 1.0;  ///< probability that all n ancillas read 0
};

struct MeasResult {
    double noise = 0.0;   ///< q^(m), equal to the trace distance to the ideal effect
    double success = 1.0; ///< p_s^(m), probability that all m+1 outcomes agree
    EffectPair povm;      ///< normalized purified effects N~_0, N~_1
};

struct FixedPoint {
    double D = std::numeric_limits<double>::infinity();
    double d = 0.0; ///< limiting ratio R11/R00 (and r1/r0)
    double f_inf = 1.0;
    double q_inf = 0.0;
};

/// Unnormalized diagonal (R00, R11) or (r0, r1) of a purified state or effect.
struct Diagonals {
    double first = 0.0;
    double second = 0.0;
};

enum class CurveKind { prep, meas };

struct CurvePoint {
    int n = 0;
    double value = 0.0; ///< fidelity (prep) or noise fraction (meas)
    double success = 1.0;
};

struct PurificationCurve {
    SpamParams params;
    CurveKind kind = CurveKind::prep;
    std::vector<CurvePoint> points;
};

namespace detail {

inline void require_depth(int n) {
    if (n < 0) {
        throw InvalidParams("ancilla count must be non-negative, got " + std::to_string(n));
    }
}

inline void require_bias(const SpamParams& p) {
    if (p.alpha() == 0.5) {
        throw DegenerateParams("alpha = 1/2 (f = 1/2): ancilla outcomes carry no information, no purification");
    }
}

// x^n for x in [0, 1] via the log domain; 0^0 = 1.
inline double pow_log(double x, int n) {
    if (n == 0) {
        return 1.0;
    }
    if (x <= 0.0) {
        return 0.0;
    }
    return std::exp(static_cast<double>(n) * std::log(x));
}

// One step of the depolarizing-CNOT recurrence shared by states and effects:
//   a' = (1-eps) alpha a + eps/4 (a + b),  b' = (1-eps)(1-alpha) b + eps/4 (a + b)
inline Diagonals noisy_step(const Diagonals& x, double alpha, double eps) {
    const double mixed = 0.25 * eps * (x.first + x.second);
    return {(1.0 - eps) * alpha * x.first + mixed, (1.0 - eps) * (1.0 - alpha) * x.second + mixed};
}

// Iterates noisy_step n times, renormalizing each step. Returns the final
// normalized pair and the log of the accumulated trace.
inline std::pair<Diagonals, double> iterate_normalized(Diagonals x, double alpha, double eps, int n) {
    double log_scale = std::log(x.first + x.second);
    x = {x.first / (x.first + x.second), x.second / (x.first + x.second)};
    for (int i = 0; i < n; ++i) {
        x = noisy_step(x, alpha, eps);
        const double t = x.first + x.second;
        log_scale += std::log(t);
        x = {x.first / t, x.second / t};
    }
    return {x, log_scale};
}

inline EffectPair diagonal_effects(double noise) {
    ComplexMatrix n0 = ComplexMatrix::Zero(2, 2);
    ComplexMatrix n1 = ComplexMatrix::Zero(2, 2);
    n0(0, 0) = 1.0 - noise;
    n0(1, 1) = noise;
    n1(0, 0) = noise;
    n1(1, 1) = 1.0 - noise;
    return {PovmElement::trusted(std::move(n0)), PovmElement::trusted(std::move(n1))};
}

} // namespace detail

/// Raw (R00^(n), R11^(n)) of the accepted unnormalized state, by direct
/// iteration from (f, 1-f). Underflows for very large n; use prep_fidelity there.
inline Diagonals prep_diagonals(const SpamParams& p, int n) {
    p.validate();
    detail::require_depth(n);
    Diagonals x{p.f, 1.0 - p.f};
    for (int i = 0; i < n; ++i) {
        x = detail::noisy_step(x, p.alpha(), p.eps);
    }
    return x;
}

/// Fidelity and acceptance probability after purifying a preparation with n ancillas.
inline PrepResult prep_fidelity(const SpamParams& p, int n) {
    p.validate();
    detail::require_depth(n);
    if (n == 0) {
        return {p.f, 1.0};
    }
    detail::require_bias(p);
    const double a = p.alpha();
    if (p.eps == 0.0) {
        const double success = p.f * detail::pow_log(a, n) + (1.0 - p.f) * detail::pow_log(1.0 - a, n);
        if (p.f == 1.0) {
            return {1.0, success};
        }
        // R11/R00 = ((1-a)/a)^n (1-f)/f, kept in the log domain
        const double log_ratio = n * std::log((1.0 - a) / a) + std::log((1.0 - p.f) / p.f);
        return {1.0 / (1.0 + std::exp(log_ratio)), success};
    }
    const auto [x, log_scale] = detail::iterate_normalized({p.f, 1.0 - p.f}, a, p.eps, n);
    return {x.first, std::exp(log_scale)};
}

/// Raw (r0^(m), r1^(m)) = (<k|M~_k^(m)|k>, <k'|M~_k^(m)|k'>) of the unnormalized
/// purified effect, by direct iteration from (1-q, q).
inline Diagonals meas_diagonals(const SpamParams& p, int m) {
    p.validate();
    detail::require_depth(m);
    Diagonals x{1.0 - p.q, p.q};
    for (int i = 0; i < m; ++i) {
        x = detail::noisy_step(x, p.alpha(), p.eps);
    }
    return x;
}

/// Noise fraction, acceptance probability and purified effects with m ancillas.
inline MeasResult meas_purified(const SpamParams& p, int m) {
    p.validate();
    detail::require_depth(m);
    if (m == 0) {
        return {p.q, 1.0, noisy_meas(p.q)};
    }
    const double a = p.alpha();
    if (p.eps == 0.0) {
        const double success = detail::pow_log(a, m) * (1.0 - p.q) + detail::pow_log(1.0 - a, m) * p.q;
        if (p.q == 0.0) {
            return {0.0, success, detail::diagonal_effects(0.0)};
        }
        detail::require_bias(p);
        // r1/r0 = ((1-a)/a)^m q/(1-q)
        const double ratio = std::exp(m * std::log((1.0 - a) / a) + std::log(p.q / (1.0 - p.q)));
        const double noise = ratio / (1.0 + ratio);
        return {noise, success, detail::diagonal_effects(noise)};
    }
    detail::require_bias(p);
    const auto [x, log_scale] = detail::iterate_normalized({1.0 - p.q, p.q}, a, p.eps, m);
    return {x.second, std::exp(log_scale), detail::diagonal_effects(x.second)};
}

/// T(N~_0^(m), M_0): trace distance of the purified effect from the ideal projector.
inline double purified_trace_distance(const MeasResult& r) {
    return trace_distance(r.povm.zero.matrix(), gates::projector(0));
}

/// Limits n -> infinity of the noisy-gate recurrences.
inline FixedPoint fixed_point(const SpamParams& p) {
    p.validate();
    if (p.eps == 0.0) {
        return {};
    }
    const double D = 2.0 * (2.0 * p.f - 1.0) * (1.0 - 2.0 * p.q) * (1.0 - p.eps) / p.eps;
    const double root = std::sqrt(D * D + 1.0);
    // sqrt(D^2+1) - D without cancellation
    const double d = 1.0 / (root + D);
    // 1 - D + root = 1 + d and 1 + D + root = (1 + d) / d
    return {D, d, 1.0 / (1.0 + d), d / (1.0 + d)};
}

/// True iff one round strictly improves the preparation: f < f_eps^(1).
inline bool purification_condition(const SpamParams& p) {
    p.validate();
    // f^(1) > f  <=>  R00 (1-f) > R11 f, expanded:
    const double margin = (1.0 - p.eps) * p.f * (1.0 - p.f) * (2.0 * p.alpha() - 1.0) +
                          0.25 * p.eps * (1.0 - 2.0 * p.f);
    return margin > 0.0;
}

/// Largest CNOT noise that still purifies when 1-f = q.
inline double critical_epsilon(double f) {
    if (!(f >= 0.5 && f <= 1.0)) {
        throw InvalidParams("critical_epsilon needs f in [1/2, 1], got " + std::to_string(f));
    }
    const double cubic = 8.0 * f * f * f - 12.0 * f * f + 4.0 * f;
    return cubic / (cubic - 1.0);
}

inline PurificationCurve prep_curve(const SpamParams& p, int n_max) {
    detail::require_depth(n_max);
    PurificationCurve curve{p, CurveKind::prep, {}};
    for (int n = 0; n <= n_max; ++n) {
        const auto r = prep_fidelity(p, n);
        curve.points.push_back({n, r.fidelity, r.success});
    }
    return curve;
}

inline PurificationCurve meas_curve(const SpamParams& p, int m_max) {
    detail::require_depth(m_max);
    PurificationCurve curve{p, CurveKind::meas, {}};
    for (int m = 0; m <= m_max; ++m) {
        const auto r = meas_purified(p, m);
        curve.points.push_back({m, r.noise, r.success});
    }
    return curve;
}

} // namespace spampur
