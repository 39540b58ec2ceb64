#pragma once

// Dense complex-matrix engine for small multi-qubit registers.
//
// Qubit ordering: the leftmost tensor factor is qubit 0 and occupies the most
// significant bit of a basis index. Every routine in the library follows it.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spampur/error.hpp"

namespace spampur {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Absolute tolerance for hermiticity, PSD and unitarity checks.
inline constexpr double kCheckTol = 1e-10;

/// Largest register the dense engine accepts (4096 x 4096).
inline constexpr int kMaxQubits = 12;

namespace gates {

inline ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

inline ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline ComplexMatrix hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    ComplexMatrix m(2, 2);
    m << s, s, s, -s;
    return m;
}

/// |k><k| on one qubit.
inline ComplexMatrix projector(int k) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(k, k) = 1.0;
    return m;
}

/// Two-qubit CNOT, qubit 0 controls qubit 1.
inline ComplexMatrix cnot() {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = 1.0;
    m(2, 3) = m(3, 2) = 1.0;
    return m;
}

} // namespace gates

namespace detail {

inline int bit_of(std::uint64_t index, int qubit, int n_qubits) {
    return static_cast<int>((index >> (n_qubits - 1 - qubit)) & 1U);
}

inline std::uint64_t qubit_mask(int qubit, int n_qubits) {
    return std::uint64_t{1} << (n_qubits - 1 - qubit);
}

inline void check_qubit(int qubit, int n_qubits) {
    if (qubit < 0 || qubit >= n_qubits) {
        throw DimensionError("qubit index " + std::to_string(qubit) + " out of range for " +
                             std::to_string(n_qubits) + "-qubit register");
    }
}

// Inserts a zero bit so that `qubit` of an n-qubit index is free; `reduced`
// indexes the remaining n-1 qubits in order.
inline std::uint64_t insert_zero_bit(std::uint64_t reduced, int qubit, int n_qubits) {
    const int low_bits = n_qubits - 1 - qubit;
    const std::uint64_t low = reduced & ((std::uint64_t{1} << low_bits) - 1);
    const std::uint64_t high = reduced >> low_bits;
    return (high << (low_bits + 1)) | low;
}

} // namespace detail

/// Number of qubits for a power-of-two dimension.
inline int qubit_count(Eigen::Index dim) {
    if (dim < 1 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
        throw DimensionError("dimension " + std::to_string(dim) + " is not a power of two");
    }
    const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
    if (n > kMaxQubits) {
        throw CapacityError("register of " + std::to_string(n) + " qubits exceeds the cap of " +
                            std::to_string(kMaxQubits));
    }
    return n;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw DimensionError(std::string(what) + " must be a non-empty square matrix");
    }
}

/// Kronecker product; `a` is the more significant factor.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_square(a, "kron operand");
    require_square(b, "kron operand");
    const Eigen::Index da = a.rows();
    const Eigen::Index db = b.rows();
    ComplexMatrix out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < da; ++j) {
            out.block(i * db, j * db, db, db) = a(i, j) * b;
        }
    }
    return out;
}

inline ComplexMatrix kron_power(const ComplexMatrix& a, int n) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
        out = kron(out, a);
    }
    return out;
}

inline ComplexMatrix kron_all(std::initializer_list<ComplexMatrix> factors) {
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (const auto& f : factors) {
        out = kron(out, f);
    }
    return out;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("max_abs_diff: shape mismatch");
    }
    return (a - b).cwiseAbs().maxCoeff();
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b, double tol = kCheckTol) {
    return a.rows() == b.rows() && a.cols() == b.cols() && max_abs_diff(a, b) <= tol;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kCheckTol) {
    return m.rows() == m.cols() && max_abs_diff(m, m.adjoint()) <= tol;
}

inline bool is_unitary(const ComplexMatrix& u, double tol = kCheckTol) {
    if (u.rows() != u.cols()) {
        return false;
    }
    return max_abs_diff(u.adjoint() * u, ComplexMatrix::Identity(u.rows(), u.cols())) <= tol;
}

/// Ascending eigenvalues of the Hermitian part of `m`.
inline Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
    require_square(m, "eigenvalue operand");
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

/// T(A, B) = 1/2 ||A - B||_1 for Hermitian A, B.
inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("trace_distance: shape mismatch");
    }
    return 0.5 * hermitian_eigenvalues(a - b).cwiseAbs().sum();
}

/// Computational basis vector |index> on n qubits.
inline ComplexVector basis_ket(int n_qubits, std::uint64_t index) {
    ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << n_qubits);
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return v;
}

/// (|00> + |11>) / sqrt(2)
inline ComplexVector bell_phi_plus() {
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return v;
}

enum class Normalization { normalized, unnormalized };

/// Hermitian PSD matrix on a qubit register. An unnormalized instance carries
/// a post-selected weight in (0, 1] as its trace.
class DensityMatrix {
public:
    /// Validates hermiticity, PSD (eigenvalue floor) and the trace range.
    static DensityMatrix from_matrix(ComplexMatrix m, Normalization norm = Normalization::normalized,
                                     double tol = kCheckTol) {
        require_square(m, "density matrix");
        const int n = qubit_count(m.rows());
        if (!is_hermitian(m, tol)) {
            throw InvalidParams("density matrix is not Hermitian");
        }
        if (hermitian_eigenvalues(m)(0) < -tol) {
            throw InvalidParams("density matrix is not positive semidefinite");
        }
        const double tr = m.trace().real();
        if (norm == Normalization::normalized && std::abs(tr - 1.0) > tol) {
            throw InvalidParams("normalized density matrix has trace " + std::to_string(tr));
        }
        if (norm == Normalization::unnormalized && (tr <= 0.0 || tr > 1.0 + tol)) {
            throw InvalidParams("unnormalized density matrix trace must lie in (0, 1], got " +
                                std::to_string(tr));
        }
        return DensityMatrix(std::move(m), n, norm);
    }

    /// Skips the eigenvalue check; for results that are PSD by construction.
    static DensityMatrix trusted(ComplexMatrix m, Normalization norm) {
        require_square(m, "density matrix");
        const int n = qubit_count(m.rows());
        return DensityMatrix(std::move(m), n, norm);
    }

    /// Pure state |psi><psi| from a normalized ket.
    static DensityMatrix pure(const ComplexVector& ket) {
        if (std::abs(ket.squaredNorm() - 1.0) > kCheckTol) {
            throw InvalidParams("ket is not normalized");
        }
        return trusted(ket * ket.adjoint(), Normalization::normalized);
    }

    /// I / 2^n
    static DensityMatrix maximally_mixed(int n_qubits) {
        const Eigen::Index dim = Eigen::Index{1} << n_qubits;
        return trusted(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim),
                       Normalization::normalized);
    }

    const ComplexMatrix& matrix() const { return mat_; }
    int n_qubits() const { return n_qubits_; }
    Eigen::Index dim() const { return mat_.rows(); }
    double trace() const { return mat_.trace().real(); }
    bool is_normalized() const { return norm_ == Normalization::normalized; }
    Normalization normalization() const { return norm_; }

    DensityMatrix normalized() const {
        const double tr = trace();
        if (tr <= 0.0) {
            throw InvalidParams("cannot normalize a zero-trace state");
        }
        return DensityMatrix(mat_ / tr, n_qubits_, Normalization::normalized);
    }

    /// <i|rho|i>
    double population(std::uint64_t basis_index) const {
        return mat_(static_cast<Eigen::Index>(basis_index), static_cast<Eigen::Index>(basis_index)).real();
    }

    /// <psi|rho|psi> / tr(rho)
    double fidelity_with(const ComplexVector& ket) const {
        if (ket.size() != dim()) {
            throw DimensionError("fidelity_with: ket dimension mismatch");
        }
        return (ket.adjoint() * mat_ * ket)(0, 0).real() / trace();
    }

private:
    DensityMatrix(ComplexMatrix m, int n, Normalization norm) : mat_(std::move(m)), n_qubits_(n), norm_(norm) {}

    ComplexMatrix mat_;
    int n_qubits_ = 0;
    Normalization norm_ = Normalization::normalized;
};

/// Measurement effect 0 <= E <= I.
class PovmElement {
public:
    static PovmElement from_matrix(ComplexMatrix m, double tol = kCheckTol) {
        require_square(m, "POVM element");
        qubit_count(m.rows());
        if (!is_hermitian(m, tol)) {
            throw InvalidParams("POVM element is not Hermitian");
        }
        const Eigen::VectorXd ev = hermitian_eigenvalues(m);
        if (ev(0) < -tol || ev(ev.size() - 1) > 1.0 + tol) {
            throw InvalidParams("POVM element eigenvalues must lie in [0, 1]");
        }
        return PovmElement(std::move(m));
    }

    static PovmElement trusted(ComplexMatrix m) { return PovmElement(std::move(m)); }

    const ComplexMatrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }
    bool is_diagonal(double tol = kCheckTol) const {
        ComplexMatrix off = mat_;
        off.diagonal().setZero();
        return off.cwiseAbs().maxCoeff() <= tol;
    }

private:
    explicit PovmElement(ComplexMatrix m) : mat_(std::move(m)) {}
    ComplexMatrix mat_;
};

/// Effects for outcomes 0 and 1. Need not sum to I when they describe a
/// post-selected (purified) measurement.
struct EffectPair {
    PovmElement zero;
    PovmElement one;
};

// ---------------------------------------------------------------------------
// Raw-matrix kernels. They accept arbitrary (possibly non-Hermitian) operators
// so the oracle can push basis operators |j><i| through channels.

/// tr over everything except `keep`; output qubits follow the order of `keep`.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, int n_qubits, std::span<const int> keep) {
    std::vector<bool> kept(static_cast<std::size_t>(n_qubits), false);
    for (int k : keep) {
        detail::check_qubit(k, n_qubits);
        if (kept[static_cast<std::size_t>(k)]) {
            throw DimensionError("partial_trace: duplicate qubit index " + std::to_string(k));
        }
        kept[static_cast<std::size_t>(k)] = true;
    }
    std::vector<int> traced;
    for (int q = 0; q < n_qubits; ++q) {
        if (!kept[static_cast<std::size_t>(q)]) {
            traced.push_back(q);
        }
    }

    auto offsets = [n_qubits](std::span<const int> qubits) {
        const auto count = static_cast<int>(qubits.size());
        std::vector<std::uint64_t> out(std::size_t{1} << count, 0);
        for (std::uint64_t a = 0; a < out.size(); ++a) {
            std::uint64_t full = 0;
            for (int p = 0; p < count; ++p) {
                if ((a >> (count - 1 - p)) & 1U) {
                    full |= detail::qubit_mask(qubits[static_cast<std::size_t>(p)], n_qubits);
                }
            }
            out[a] = full;
        }
        return out;
    };
    const auto keep_off = offsets(keep);
    const auto trace_off = offsets(traced);

    const auto dk = static_cast<Eigen::Index>(keep_off.size());
    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    for (Eigen::Index a = 0; a < dk; ++a) {
        for (Eigen::Index b = 0; b < dk; ++b) {
            Complex acc = 0.0;
            for (std::uint64_t t : trace_off) {
                acc += m(static_cast<Eigen::Index>(keep_off[static_cast<std::size_t>(a)] | t),
                         static_cast<Eigen::Index>(keep_off[static_cast<std::size_t>(b)] | t));
            }
            out(a, b) = acc;
        }
    }
    return out;
}

/// tr_k[(I (x) E_k) X]: applies a one-qubit operator to qubit k and discards it.
/// With E an effect this is measurement + post-selection on outcome E; with E a
/// state it is the Heisenberg-picture contraction of an ancilla.
inline ComplexMatrix contract_qubit(const ComplexMatrix& m, int n_qubits, int qubit, const ComplexMatrix& e) {
    detail::check_qubit(qubit, n_qubits);
    if (e.rows() != 2 || e.cols() != 2) {
        throw DimensionError("contract_qubit: operator must be 2x2");
    }
    const Eigen::Index d_out = Eigen::Index{1} << (n_qubits - 1);
    const std::uint64_t mask = detail::qubit_mask(qubit, n_qubits);
    ComplexMatrix out(d_out, d_out);
    for (Eigen::Index a = 0; a < d_out; ++a) {
        const std::uint64_t ia = detail::insert_zero_bit(static_cast<std::uint64_t>(a), qubit, n_qubits);
        for (Eigen::Index b = 0; b < d_out; ++b) {
            const std::uint64_t ib = detail::insert_zero_bit(static_cast<std::uint64_t>(b), qubit, n_qubits);
            Complex acc = 0.0;
            for (int s = 0; s < 2; ++s) {
                for (int t = 0; t < 2; ++t) {
                    const Complex w = e(t, s);
                    if (w == Complex{}) {
                        continue;
                    }
                    acc += w * m(static_cast<Eigen::Index>(ia | (s ? mask : 0)),
                                 static_cast<Eigen::Index>(ib | (t ? mask : 0)));
                }
            }
            out(a, b) = acc;
        }
    }
    return out;
}

/// CNOT conjugation as an index permutation (CNOT is a self-inverse permutation).
inline ComplexMatrix apply_cnot(const ComplexMatrix& m, int n_qubits, int control, int target) {
    detail::check_qubit(control, n_qubits);
    detail::check_qubit(target, n_qubits);
    if (control == target) {
        throw DimensionError("CNOT control and target must differ");
    }
    const Eigen::Index dim = m.rows();
    const std::uint64_t cmask = detail::qubit_mask(control, n_qubits);
    const std::uint64_t tmask = detail::qubit_mask(target, n_qubits);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
        const auto u = static_cast<std::uint64_t>(i);
        perm[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>((u & cmask) ? (u ^ tmask) : u);
    }
    ComplexMatrix out(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            out(i, j) = m(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
    }
    return out;
}

/// Lifts a k-qubit operator acting on `targets` (in that order) to the full register.
inline ComplexMatrix embed(const ComplexMatrix& op, std::span<const int> targets, int n_qubits) {
    const auto k = static_cast<int>(targets.size());
    if (op.rows() != (Eigen::Index{1} << k) || op.cols() != op.rows()) {
        throw DimensionError("embed: operator size does not match target count");
    }
    std::uint64_t target_mask = 0;
    for (int t : targets) {
        detail::check_qubit(t, n_qubits);
        const std::uint64_t bit = detail::qubit_mask(t, n_qubits);
        if (target_mask & bit) {
            throw DimensionError("embed: duplicate target qubit");
        }
        target_mask |= bit;
    }
    auto sub_index = [&](std::uint64_t full) {
        std::uint64_t s = 0;
        for (int p = 0; p < k; ++p) {
            s = (s << 1) | static_cast<std::uint64_t>(detail::bit_of(full, targets[static_cast<std::size_t>(p)], n_qubits));
        }
        return static_cast<Eigen::Index>(s);
    };
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const auto ui = static_cast<std::uint64_t>(i);
            const auto uj = static_cast<std::uint64_t>(j);
            if ((ui & ~target_mask) == (uj & ~target_mask)) {
                out(i, j) = op(sub_index(ui), sub_index(uj));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// State-level operations.

/// U rho U^dagger
inline DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u) {
    if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
        throw DimensionError("apply_unitary: unitary is " + std::to_string(u.rows()) + "x" +
                             std::to_string(u.cols()) + ", state has dimension " + std::to_string(rho.dim()));
    }
    if (!is_unitary(u)) {
        throw InvalidParams("apply_unitary: operator is not unitary");
    }
    return DensityMatrix::trusted(u * rho.matrix() * u.adjoint(), rho.normalization());
}

/// Reduced state on `keep`; trace is preserved.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
    return DensityMatrix::trusted(partial_trace(rho.matrix(), rho.n_qubits(), keep), rho.normalization());
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
    return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    const bool normalized = a.is_normalized() && b.is_normalized();
    return DensityMatrix::trusted(kron(a.matrix(), b.matrix()),
                                  normalized ? Normalization::normalized : Normalization::unnormalized);
}

/// V_{n+1} = |0><0| (x) I^{(x)n} + |1><1| (x) X^{(x)n}; qubit 0 is the control.
inline ComplexMatrix collective_cnot(int n_targets) {
    if (n_targets < 1) {
        throw InvalidParams("collective_cnot needs at least one target");
    }
    if (n_targets + 1 > kMaxQubits) {
        throw CapacityError("collective_cnot exceeds the qubit cap");
    }
    const Eigen::Index dt = Eigen::Index{1} << n_targets;
    return kron(gates::projector(0), gates::identity(dt)) +
           kron(gates::projector(1), kron_power(gates::pauli_x(), n_targets));
}

/// Full-register CNOT matrix.
inline ComplexMatrix embedded_cnot(int n_qubits, int control, int target) {
    const int targets[] = {control, target};
    return embed(gates::cnot(), targets, n_qubits);
}

/// Born-rule probabilities tr(rho E_k); the elements must sum to I.
inline std::vector<double> povm_probabilities(const DensityMatrix& rho, std::span<const PovmElement> povm) {
    if (povm.empty()) {
        throw IncompletePovm("empty POVM");
    }
    ComplexMatrix total = ComplexMatrix::Zero(rho.dim(), rho.dim());
    std::vector<double> probs;
    probs.reserve(povm.size());
    for (const auto& e : povm) {
        if (e.dim() != rho.dim()) {
            throw DimensionError("povm_probabilities: element dimension mismatch");
        }
        total += e.matrix();
        probs.push_back((rho.matrix() * e.matrix()).trace().real());
    }
    if (max_abs_diff(total, gates::identity(rho.dim())) > kCheckTol) {
        throw IncompletePovm("POVM elements do not sum to the identity");
    }
    for (double& p : probs) {
        p = std::max(p, 0.0);
    }
    return probs;
}

} // namespace spampur
