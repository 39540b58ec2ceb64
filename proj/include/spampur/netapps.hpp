#pragma once

// Entanglement distillation with purified measurements, and entanglement
// swapping at a repeater that reads out with purified effects.

#include <cmath>
#include <string>
#include <vector>

#include "spampur/error.hpp"
#include "spampur/noise.hpp"
#include "spampur/purify.hpp"

namespace spampur {

struct PovmDiagonals {
    double r0 = 1.0; ///< <k|M~_k^(n)|k>
    double r1 = 0.0; ///< <k'|M~_k^(n)|k'>
};

struct DistillThreshold {
    double L = 0.5;     ///< L^(n)
    double L_inf = 0.5; ///< n -> infinity
};

struct DistillRound {
    int j = 0;
    double fidelity = 0.0; ///< F_j entering round j
    double success = 0.0;  ///< p_succ(F_j)
};

struct DistillationTrace {
    SpamParams params;
    int n_ancillas = 0;
    double initial_fidelity = 0.0;
    double target = 0.999;
    double threshold = 0.5;     ///< L^(n)
    bool distillable = true;    ///< false when F0 <= L^(n); rounds is then empty
    std::vector<DistillRound> rounds;
    double final_fidelity = 0.0;
    double copies = 1.0;        ///< N_c = prod_j 2 / p_succ(F_j)

    /// First-round success probability, or 1 when no round is needed.
    double first_success() const { return rounds.empty() ? 1.0 : rounds.front().success; }
};

inline constexpr int kMaxDistillRounds = 10000;

/// Diagonals of the n-ancilla purified effect, unnormalized. Closed form
/// r0 = (1-q) alpha^n, r1 = q (1-alpha)^n for ideal gates, iteration otherwise.
inline PovmDiagonals povm_diag_recurrence(const SpamParams& p, int n) {
    p.validate();
    detail::require_depth(n);
    if (p.eps == 0.0) {
        const double a = p.alpha();
        return {(1.0 - p.q) * detail::pow_log(a, n), p.q * detail::pow_log(1.0 - a, n)};
    }
    const Diagonals x = meas_diagonals(p, n);
    return {x.first, x.second};
}

namespace detail {

inline void check_distill_inputs(double F, double r0, double r1) {
    if (!(F >= 0.25 && F <= 1.0)) {
        throw InvalidParams("Werner fidelity must lie in [1/4, 1], got " + std::to_string(F));
    }
    if (!(r1 >= 0.0)) {
        throw InvalidParams("effect diagonal r1 must be non-negative");
    }
    if (r0 == r1) {
        throw DegenerateParams("r0 = r1: the second-register readout carries no information");
    }
    if (!(r0 > r1)) {
        throw InvalidParams("effect diagonals need r0 > r1");
    }
}

} // namespace detail

/// Fidelity after one recurrence round on Werner pairs, read with effects of
/// diagonals (r0, r1):
///   F' = (F^2 + x^2 + g) / (F^2 + 2Fx + 5x^2 + 4g),  x = (1-F)/3,
///   g  = (Fx + x^2) r_odd / r_even,  r_odd = 2 r0 r1,  r_even = r0^2 + r1^2.
inline double distill_map(double F, double r0, double r1) {
    detail::check_distill_inputs(F, r0, r1);
    const double x = (1.0 - F) / 3.0;
    const double r_odd = 2.0 * r0 * r1;
    const double r_even = r0 * r0 + r1 * r1;
    const double g = (F * x + x * x) * r_odd / r_even;
    return (F * F + x * x + g) / (F * F + 2.0 * F * x + 5.0 * x * x + 4.0 * g);
}

/// Probability that one round keeps the first-register pair, including the
/// purification acceptance carried by the unnormalized (r0, r1):
///   (F^2 + 2Fx + 5x^2) r_even + (4Fx + 4x^2) r_odd.
inline double distill_success(double F, double r0, double r1) {
    detail::check_distill_inputs(F, r0, r1);
    const double x = (1.0 - F) / 3.0;
    const double r_odd = 2.0 * r0 * r1;
    const double r_even = r0 * r0 + r1 * r1;
    return (F * F + 2.0 * F * x + 5.0 * x * x) * r_even + (4.0 * F * x + 4.0 * x * x) * r_odd;
}

/// L = 1/2 ((r0 + r1) / (r0 - r1))^2; rounds improve F exactly when F > L.
inline double distill_threshold_from_diagonals(double r0, double r1) {
    detail::check_distill_inputs(1.0, r0, r1);
    const double ratio = (r0 + r1) / (r0 - r1);
    return 0.5 * ratio * ratio;
}

inline DistillThreshold distill_threshold(const SpamParams& p, int n) {
    const PovmDiagonals r = povm_diag_recurrence(p, n);
    const FixedPoint fp = fixed_point(p);
    const double lim = (1.0 + fp.d) / (1.0 - fp.d);
    return {distill_threshold_from_diagonals(r.r0, r.r1), 0.5 * lim * lim};
}

/// Runs rounds from F0 until the fidelity reaches `target`, with n-ancilla
/// purified readout on both sides.
inline DistillationTrace copies_needed(const SpamParams& p, int n, double F0, double target = 0.999) {
    p.validate();
    detail::require_depth(n);
    if (!(F0 >= 0.25 && F0 <= 1.0)) {
        throw InvalidParams("initial Werner fidelity must lie in [1/4, 1], got " + std::to_string(F0));
    }
    if (!(target > 0.5 && target < 1.0)) {
        throw InvalidParams("target fidelity must lie in (1/2, 1)");
    }
    const PovmDiagonals r = povm_diag_recurrence(p, n);
    DistillationTrace trace;
    trace.params = p;
    trace.n_ancillas = n;
    trace.initial_fidelity = F0;
    trace.target = target;
    trace.threshold = distill_threshold_from_diagonals(r.r0, r.r1);
    trace.final_fidelity = F0;
    if (F0 >= target) {
        return trace;
    }
    if (F0 <= trace.threshold) {
        trace.distillable = false;
        return trace;
    }
    double F = F0;
    for (int j = 0; F < target; ++j) {
        if (j >= kMaxDistillRounds) {
            throw Error("distillation did not reach the target within " + std::to_string(kMaxDistillRounds) +
                        " rounds");
        }
        const double ps = distill_success(F, r.r0, r.r1);
        trace.rounds.push_back({j, F, ps});
        trace.copies *= 2.0 / ps;
        F = distill_map(F, r.r0, r.r1);
    }
    trace.final_fidelity = F;
    return trace;
}

/// Fidelity with |phi+> of the swapped pair when both repeater qubits are read
/// with a diagonal effect of diagonals (r0, r1): (r0 / (r0 + r1))^2.
inline double swap_fidelity_from_diagonals(double r0, double r1) {
    if (!(r0 >= 0.0 && r1 >= 0.0 && r0 + r1 > 0.0)) {
        throw InvalidParams("effect diagonals must be non-negative and not both zero");
    }
    const double s = r0 / (r0 + r1);
    return s * s;
}

/// [1 + ((1-alpha)/alpha)^m q/(1-q)]^-2 for ideal purification gates.
inline double swap_fidelity(const SpamParams& p, int m) {
    p.validate();
    detail::require_depth(m);
    if (p.eps != 0.0) {
        throw InvalidParams("swap_fidelity closed form needs eps = 0; use swap_fidelity_from_diagonals");
    }
    if (p.q == 0.0) {
        return 1.0;
    }
    if (m > 0) {
        detail::require_bias(p);
    }
    const double a = p.alpha();
    const double ratio = std::exp(m * std::log((1.0 - a) / a) + std::log(p.q / (1.0 - p.q)));
    const double s = 1.0 + ratio;
    return 1.0 / (s * s);
}

} // namespace spampur
