#pragma once

// Brute-force density-matrix simulation of the purification, swapping and
// distillation circuits. Everything here is built from qops/noise primitives
// only; nothing calls into purify.hpp or netapps.hpp, so the closed forms can be
// checked against it.

#include <array>
#include <string>

#include "spampur/error.hpp"
#include "spampur/noise.hpp"
#include "spampur/qops.hpp"

namespace spampur::oracle {

inline constexpr int kMaxPrepAncillas = 10;
inline constexpr int kMaxMeasAncillas = 9;
inline constexpr int kMaxSwapAncillas = 4;

/// How the (n+1)-qubit collective CNOT is realized. `collective` applies the
/// dense V_{n+1} directly and is only defined for noiseless gates.
enum class CnotLayout { pairwise, collective };

struct CircuitOutcome {
    DensityMatrix accepted_state; ///< unnormalized; trace = acceptance_prob
    double acceptance_prob = 0.0;
    double conditional_fidelity = 0.0; ///< <0|rho^(n)|0> / tr
};

struct MeasOutcome {
    EffectPair raw;        ///< M~_k^(m), unnormalized by the acceptance weight
    EffectPair normalized; ///< N~_k^(m) = M~_k^(m) / p_s
    double success = 0.0;  ///< p_s for a maximally mixed input; input-independent when M~_0 + M~_1 is proportional to I
};

struct SwapOutcome {
    DensityMatrix ab_state; ///< normalized post-swap state of A and B
    double fidelity = 0.0;  ///< <phi+|sigma|phi+>
    double acceptance = 0.0;
};

struct DistillOutcome {
    DensityMatrix kept_pair; ///< normalized state of the first-register pair
    double fidelity = 0.0;
    double acceptance = 0.0;
};

namespace detail {

inline void check_cap(int ancillas, int cap, const char* what) {
    if (ancillas < 0) {
        throw InvalidParams(std::string(what) + ": ancilla count must be non-negative");
    }
    if (ancillas > cap) {
        throw CapacityError(std::string(what) + ": at most " + std::to_string(cap) + " ancillas supported, got " +
                            std::to_string(ancillas));
    }
}

inline void check_single_qubit(const DensityMatrix& rho, const char* what) {
    if (rho.n_qubits() != 1) {
        throw DimensionError(std::string(what) + " must be a single-qubit state");
    }
}

// System qubit 0 controls each ancilla 1..n in turn.
inline ComplexMatrix fan_out(ComplexMatrix m, int n_ancillas, double eps, CnotLayout layout) {
    const int n_qubits = n_ancillas + 1;
    if (layout == CnotLayout::collective) {
        if (eps != 0.0) {
            throw InvalidParams("collective CNOT layout is only defined for noiseless gates");
        }
        const ComplexMatrix v = collective_cnot(n_ancillas);
        return v * m * v.adjoint();
    }
    for (int i = 1; i <= n_ancillas; ++i) {
        m = noisy_cnot(m, n_qubits, 0, i, eps);
    }
    return m;
}

// Heisenberg picture of fan_out: adjoint maps in reverse time order.
inline ComplexMatrix fan_out_adjoint(ComplexMatrix m, int n_ancillas, double eps, CnotLayout layout) {
    const int n_qubits = n_ancillas + 1;
    if (layout == CnotLayout::collective) {
        if (eps != 0.0) {
            throw InvalidParams("collective CNOT layout is only defined for noiseless gates");
        }
        const ComplexMatrix v = collective_cnot(n_ancillas);
        return v.adjoint() * m * v;
    }
    for (int i = n_ancillas; i >= 1; --i) {
        m = noisy_cnot(m, n_qubits, 0, i, eps);
    }
    return m;
}

} // namespace detail

/// Runs system (x) ancilla^{(x)n} through the fan-out CNOTs, measures every
/// ancilla with the noisy effect M~_0 and keeps the system on the all-zero string.
inline CircuitOutcome simulate_prep_purification(const DensityMatrix& system, const DensityMatrix& ancilla, double q,
                                                 double eps, int n, CnotLayout layout = CnotLayout::pairwise) {
    detail::check_cap(n, kMaxPrepAncillas, "simulate_prep_purification");
    detail::check_single_qubit(system, "system");
    detail::check_single_qubit(ancilla, "ancilla");
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw InvalidParams("CNOT noise fraction must lie in [0, 1]");
    }
    ComplexMatrix state = system.matrix();
    for (int i = 0; i < n; ++i) {
        state = kron(state, ancilla.matrix());
    }
    if (n > 0) {
        state = detail::fan_out(std::move(state), n, eps, layout);
    }
    const ComplexMatrix accept = noisy_meas(q).zero.matrix();
    for (int i = n; i >= 1; --i) {
        state = contract_qubit(state, i + 1, i, accept);
    }
    const double p = state.trace().real();
    const double fid = state(0, 0).real() / p;
    return {DensityMatrix::trusted(std::move(state), Normalization::unnormalized), p, fid};
}

/// Ancillas are copies of the system preparation.
inline CircuitOutcome simulate_prep_purification(const DensityMatrix& rho0, double q, double eps, int n,
                                                 CnotLayout layout = CnotLayout::pairwise) {
    return simulate_prep_purification(rho0, rho0, q, eps, n, layout);
}

/// Effective system effects when m ancillas prepared in `ancilla` are fanned
/// out from the system, all m+1 qubits are read with noisy_meas(q), and the run
/// is kept only if every outcome agrees.
inline MeasOutcome simulate_meas_purification(const DensityMatrix& ancilla, double q, double eps, int m,
                                              CnotLayout layout = CnotLayout::pairwise) {
    detail::check_cap(m, kMaxMeasAncillas, "simulate_meas_purification");
    detail::check_single_qubit(ancilla, "ancilla");
    const EffectPair readout = noisy_meas(q);
    std::array<ComplexMatrix, 2> raw;
    for (int k = 0; k < 2; ++k) {
        const ComplexMatrix& e = (k == 0 ? readout.zero : readout.one).matrix();
        ComplexMatrix op = kron_power(e, m + 1);
        if (m > 0) {
            op = detail::fan_out_adjoint(std::move(op), m, eps, layout);
        }
        for (int i = m; i >= 1; --i) {
            op = contract_qubit(op, i + 1, i, ancilla.matrix());
        }
        raw[static_cast<std::size_t>(k)] = std::move(op);
    }
    const double success = 0.5 * (raw[0] + raw[1]).trace().real();
    return {{PovmElement::trusted(raw[0]), PovmElement::trusted(raw[1])},
            {PovmElement::trusted(raw[0] / success), PovmElement::trusted(raw[1] / success)},
            success};
}

inline MeasOutcome simulate_meas_purification(const SpamParams& p, int m, CnotLayout layout = CnotLayout::pairwise) {
    p.validate();
    return simulate_meas_purification(noisy_prep(p.f), p.q, p.eps, m, layout);
}

/// F|phi+><phi+| + (1-F)/3 (I - |phi+><phi+|)
inline DensityMatrix werner_state(double fidelity) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
        throw InvalidParams("Werner fidelity must lie in [0, 1]");
    }
    const ComplexVector phi = bell_phi_plus();
    const ComplexMatrix proj = phi * phi.adjoint();
    return DensityMatrix::trusted(fidelity * proj + (1.0 - fidelity) / 3.0 * (gates::identity(4) - proj),
                                  Normalization::normalized);
}

/// Entanglement swapping at a repeater holding R1 R2 of |phi+>_{A R1} |phi+>_{R2 B}:
/// CNOT R1->R2, Hadamard on R1, both repeater qubits read with `effect`.
inline SwapOutcome simulate_swap(const PovmElement& effect) {
    if (effect.dim() != 2) {
        throw DimensionError("simulate_swap: effect must act on one qubit");
    }
    // register order: A, R1, R2, B
    constexpr int kR1 = 1, kR2 = 2;
    const DensityMatrix pair = DensityMatrix::pure(bell_phi_plus());
    ComplexMatrix state = kron(pair.matrix(), pair.matrix());
    state = apply_cnot(state, 4, kR1, kR2);
    const int h_target[] = {kR1};
    const ComplexMatrix h = embed(gates::hadamard(), h_target, 4);
    state = h * state * h.adjoint();
    state = contract_qubit(state, 4, kR2, effect.matrix());
    state = contract_qubit(state, 3, kR1, effect.matrix());
    const double p = state.trace().real();
    auto ab = DensityMatrix::trusted(state / p, Normalization::normalized);
    const double fid = ab.fidelity_with(bell_phi_plus());
    return {std::move(ab), fid, p};
}

/// Swapping with the purified effect N~_0^(m) from the tensor oracle.
inline SwapOutcome simulate_swap(const SpamParams& p, int m) {
    detail::check_cap(m, kMaxSwapAncillas, "simulate_swap");
    return simulate_swap(simulate_meas_purification(p, m).normalized.zero);
}

/// One recurrence round on two Werner pairs (A1 B1)(A2 B2): bilateral CNOTs
/// A1->A2, B1->B2, both second-register qubits read with `effects`, kept when
/// the outcomes agree.
inline DistillOutcome simulate_distill_round(double fidelity, const EffectPair& effects) {
    if (!(fidelity >= 0.25 && fidelity <= 1.0)) {
        throw InvalidParams("Werner fidelity for distillation must lie in [1/4, 1]");
    }
    if (effects.zero.dim() != 2 || effects.one.dim() != 2) {
        throw DimensionError("simulate_distill_round: effects must act on one qubit");
    }
    constexpr int kA1 = 0, kB1 = 1, kA2 = 2, kB2 = 3;
    const DensityMatrix w = werner_state(fidelity);
    ComplexMatrix state = kron(w.matrix(), w.matrix());
    state = apply_cnot(state, 4, kA1, kA2);
    state = apply_cnot(state, 4, kB1, kB2);
    ComplexMatrix kept = ComplexMatrix::Zero(4, 4);
    for (const PovmElement* e : {&effects.zero, &effects.one}) {
        const ComplexMatrix after_b = contract_qubit(state, 4, kB2, e->matrix());
        kept += contract_qubit(after_b, 3, kA2, e->matrix());
    }
    const double p = kept.trace().real();
    auto pair = DensityMatrix::trusted(kept / p, Normalization::normalized);
    const double fid = pair.fidelity_with(bell_phi_plus());
    return {std::move(pair), fid, p};
}

/// Two noisy preparations, one noisy CNOT (0 -> 1), two noisy readouts.
/// Returns {p(00), p(01), p(10), p(11)}.
inline std::array<double, 4> simulate_verification_experiment(const SpamParams& p) {
    p.validate();
    const DensityMatrix prep = noisy_prep(p.f);
    const DensityMatrix out = noisy_cnot_apply(tensor(prep, prep), p.eps, 0, 1);
    const EffectPair m = noisy_meas(p.q);
    const PovmElement* e[2] = {&m.zero, &m.one};
    std::array<PovmElement, 4> povm{PovmElement::trusted(kron(e[0]->matrix(), e[0]->matrix())),
                                    PovmElement::trusted(kron(e[0]->matrix(), e[1]->matrix())),
                                    PovmElement::trusted(kron(e[1]->matrix(), e[0]->matrix())),
                                    PovmElement::trusted(kron(e[1]->matrix(), e[1]->matrix()))};
    const auto probs = povm_probabilities(out, povm);
    return {probs[0], probs[1], probs[2], probs[3]};
}

} // namespace spampur::oracle
