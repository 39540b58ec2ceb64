#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "spampur/error.hpp"
#include "spampur/qops.hpp"

namespace spampur {

/// Noise triple for one device: preparation fidelity f, readout noise
/// fraction q, and CNOT depolarizing fraction eps.
struct SpamParams {
    double f = 1.0;
    double q = 0.0;
    double eps = 0.0;

    /// Throws InvalidParams unless f in [1/2, 1], q in [0, 1/2), eps in [0, 1].
    void validate() const {
        if (!(f >= 0.5 && f <= 1.0)) {
            throw InvalidParams("preparation fidelity f must lie in [1/2, 1], got " + std::to_string(f));
        }
        if (!(q >= 0.0 && q < 0.5)) {
            throw InvalidParams("measurement noise q must lie in [0, 1/2), got " + std::to_string(q));
        }
        if (!(eps >= 0.0 && eps <= 1.0)) {
            throw InvalidParams("CNOT noise eps must lie in [0, 1], got " + std::to_string(eps));
        }
    }

    static SpamParams make(double f, double q, double eps = 0.0) {
        SpamParams p{f, q, eps};
        p.validate();
        return p;
    }

    /// Probability that a noisy ancilla reads 0: f(1-q) + (1-f)q.
    double alpha() const { return f * (1.0 - q) + (1.0 - f) * q; }

    friend bool operator==(const SpamParams&, const SpamParams&) = default;
};

/// Single-qubit preparation with <0|rho|0> = f and off-diagonal `coherence`.
inline DensityMatrix noisy_prep(double f, Complex coherence = {}) {
    if (!(f >= 0.0 && f <= 1.0)) {
        throw InvalidParams("preparation fidelity must lie in [0, 1]");
    }
    if (std::norm(coherence) > f * (1.0 - f) + kCheckTol) {
        throw InvalidParams("|coherence|^2 exceeds f(1-f); state would not be positive semidefinite");
    }
    ComplexMatrix m(2, 2);
    m << f, coherence, std::conj(coherence), 1.0 - f;
    return DensityMatrix::trusted(std::move(m), Normalization::normalized);
}

/// M~_k = (1-q) M_k + q M_{k+1}, k = 0, 1.
inline EffectPair noisy_meas(double q) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw InvalidParams("measurement noise fraction must lie in [0, 1]");
    }
    ComplexMatrix m0 = ComplexMatrix::Zero(2, 2);
    ComplexMatrix m1 = ComplexMatrix::Zero(2, 2);
    m0(0, 0) = 1.0 - q;
    m0(1, 1) = q;
    m1(0, 0) = q;
    m1(1, 1) = 1.0 - q;
    return {PovmElement::trusted(std::move(m0)), PovmElement::trusted(std::move(m1))};
}

/// (E + Z E Z) / 2: the effect seen when outcomes are mixed with a Z-twirled run.
inline PovmElement z_symmetrize(const PovmElement& e) {
    if (e.dim() != 2) {
        throw DimensionError("z_symmetrize acts on single-qubit effects");
    }
    const ComplexMatrix z = gates::pauli_z();
    return PovmElement::trusted(0.5 * (e.matrix() + z * e.matrix() * z));
}

/// Replaces qubits a and b by I/2 (x) I/2 while keeping the joint marginal of the rest.
inline ComplexMatrix depolarize_pair(const ComplexMatrix& m, int n_qubits, int a, int b) {
    detail::check_qubit(a, n_qubits);
    detail::check_qubit(b, n_qubits);
    if (a == b) {
        throw DimensionError("depolarize_pair needs two distinct qubits");
    }
    const std::uint64_t ma = detail::qubit_mask(a, n_qubits);
    const std::uint64_t mb = detail::qubit_mask(b, n_qubits);
    const std::uint64_t pair = ma | mb;
    const std::uint64_t settings[4] = {0, mb, ma, pair};
    const Eigen::Index dim = m.rows();
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto ui = static_cast<std::uint64_t>(i);
        for (Eigen::Index j = 0; j < dim; ++j) {
            const auto uj = static_cast<std::uint64_t>(j);
            if ((ui & pair) != (uj & pair)) {
                continue;
            }
            Complex acc = 0.0;
            for (std::uint64_t s : settings) {
                acc += m(static_cast<Eigen::Index>((ui & ~pair) | s), static_cast<Eigen::Index>((uj & ~pair) | s));
            }
            out(i, j) = 0.25 * acc;
        }
    }
    return out;
}

/// (1-eps) V rho V^dagger + eps (rho with control, target replaced by I/4).
/// The depolarizing map is self-adjoint, so the same kernel serves the
/// Heisenberg picture.
inline ComplexMatrix noisy_cnot(const ComplexMatrix& m, int n_qubits, int control, int target, double eps) {
    ComplexMatrix out = apply_cnot(m, n_qubits, control, target);
    if (eps > 0.0) {
        out = (1.0 - eps) * out + eps * depolarize_pair(m, n_qubits, control, target);
    }
    return out;
}

inline DensityMatrix noisy_cnot_apply(const DensityMatrix& rho, double eps, int control, int target) {
    if (!(eps >= 0.0 && eps <= 1.0)) {
        throw InvalidParams("CNOT noise fraction must lie in [0, 1]");
    }
    return DensityMatrix::trusted(noisy_cnot(rho.matrix(), rho.n_qubits(), control, target, eps),
                                  rho.normalization());
}

} // namespace spampur
