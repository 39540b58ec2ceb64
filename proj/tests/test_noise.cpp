#include <gtest/gtest.h>

#include <cmath>

#include "spampur/noise.hpp"
#include "support.hpp"

using namespace spampur;
using spampur::testing::Gen;

TEST(SpamParamsType, ValidationBounds) {
    EXPECT_NO_THROW(SpamParams::make(0.5, 0.0, 0.0));
    EXPECT_NO_THROW(SpamParams::make(1.0, 0.499, 1.0));
    EXPECT_THROW(SpamParams::make(0.49, 0.1, 0.0), InvalidParams);
    EXPECT_THROW(SpamParams::make(1.01, 0.1, 0.0), InvalidParams);
    EXPECT_THROW(SpamParams::make(0.9, 0.5, 0.0), InvalidParams);
    EXPECT_THROW(SpamParams::make(0.9, -0.01, 0.0), InvalidParams);
    EXPECT_THROW(SpamParams::make(0.9, 0.1, 1.5), InvalidParams);
    EXPECT_THROW(SpamParams::make(std::nan(""), 0.1, 0.0), InvalidParams);
}

TEST(SpamParamsType, AlphaAboveHalfInsideTheBox) {
    Gen g(11);
    for (int i = 0; i < 1000; ++i) {
        const SpamParams p = g.params(0.3);
        ASSERT_GT(p.alpha(), 0.5);
        ASSERT_NEAR(p.alpha(), p.f * (1 - p.q) + (1 - p.f) * p.q, 1e-15);
    }
    EXPECT_DOUBLE_EQ(SpamParams::make(0.5, 0.2).alpha(), 0.5);
}

TEST(NoisyPrep, Examples) {
    EXPECT_TRUE(approx_equal(noisy_prep(1.0).matrix(), gates::projector(0)));
    ComplexMatrix d = ComplexMatrix::Zero(2, 2);
    d(0, 0) = 0.95;
    d(1, 1) = 0.05;
    EXPECT_TRUE(approx_equal(noisy_prep(0.95).matrix(), d));
    const ComplexVector plus = (basis_ket(1, 0) + basis_ket(1, 1)) / std::sqrt(2.0);
    EXPECT_TRUE(approx_equal(noisy_prep(0.5, 0.5).matrix(), plus * plus.adjoint()));
}

TEST(NoisyPrep, CoherenceBoundEnforced) {
    EXPECT_THROW(noisy_prep(0.9, 0.31), InvalidParams);
    EXPECT_THROW(noisy_prep(1.2), InvalidParams);
    EXPECT_NO_THROW(noisy_prep(0.9, Complex(0.0, 0.3)));
}

TEST(NoisyMeas, Examples) {
    const EffectPair ideal = noisy_meas(0.0);
    EXPECT_TRUE(approx_equal(ideal.zero.matrix(), gates::projector(0)));
    EXPECT_TRUE(approx_equal(ideal.one.matrix(), gates::projector(1)));
    const EffectPair n = noisy_meas(0.05);
    EXPECT_NEAR(n.zero.matrix()(0, 0).real(), 0.95, 1e-15);
    EXPECT_NEAR(n.zero.matrix()(1, 1).real(), 0.05, 1e-15);
    EXPECT_NEAR(n.one.matrix()(1, 1).real(), 0.95, 1e-15);
    const EffectPair half = noisy_meas(0.5);
    EXPECT_TRUE(approx_equal(half.zero.matrix(), 0.5 * gates::identity(2)));
    EXPECT_TRUE(approx_equal(half.one.matrix(), 0.5 * gates::identity(2)));
    EXPECT_THROW(noisy_meas(1.5), InvalidParams);
}

TEST(NoisyMeas, PropertyDiagonalPsdComplete) {
    Gen g(12);
    for (int i = 0; i < 500; ++i) {
        const double q = g.uniform(0.0, 1.0);
        const EffectPair e = noisy_meas(q);
        ASSERT_TRUE(e.zero.is_diagonal(0.0));
        ASSERT_TRUE(e.one.is_diagonal(0.0));
        ASSERT_NO_THROW(PovmElement::from_matrix(e.zero.matrix()));
        ASSERT_NO_THROW(PovmElement::from_matrix(e.one.matrix()));
        ASSERT_LT(max_abs_diff(e.zero.matrix() + e.one.matrix(), gates::identity(2)), 1e-15);
    }
}

TEST(ZSymmetrize, Examples) {
    const PovmElement diag = noisy_meas(0.1).zero;
    EXPECT_TRUE(approx_equal(z_symmetrize(diag).matrix(), diag.matrix()));
    const ComplexVector plus = (basis_ket(1, 0) + basis_ket(1, 1)) / std::sqrt(2.0);
    EXPECT_TRUE(approx_equal(z_symmetrize(PovmElement::from_matrix(plus * plus.adjoint())).matrix(),
                             0.5 * gates::identity(2)));
    ComplexMatrix e(2, 2);
    e << 0.9, 0.1, 0.1, 0.1;
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    expected(0, 0) = 0.9;
    expected(1, 1) = 0.1;
    EXPECT_TRUE(approx_equal(z_symmetrize(PovmElement::from_matrix(e)).matrix(), expected));
    EXPECT_THROW(z_symmetrize(PovmElement::trusted(gates::identity(4))), DimensionError);
}

TEST(ZSymmetrize, PropertyIdempotentAndTracePreserving) {
    Gen g(13);
    for (int i = 0; i < 300; ++i) {
        const DensityMatrix r = g.density(1);
        const PovmElement e = PovmElement::from_matrix(r.matrix());
        const PovmElement once = z_symmetrize(e);
        ASSERT_TRUE(once.is_diagonal(1e-15));
        ASSERT_LT(max_abs_diff(z_symmetrize(once).matrix(), once.matrix()), 1e-15);
        ASSERT_NEAR(once.matrix().trace().real(), e.matrix().trace().real(), 1e-15);
    }
}

TEST(NoisyCnot, Examples) {
    const DensityMatrix ket10 = DensityMatrix::pure(basis_ket(2, 0b10));
    const ComplexMatrix ket11 = DensityMatrix::pure(basis_ket(2, 0b11)).matrix();
    EXPECT_TRUE(approx_equal(noisy_cnot_apply(ket10, 0.0, 0, 1).matrix(), ket11));
    Gen g(14);
    EXPECT_TRUE(approx_equal(noisy_cnot_apply(g.density(2), 1.0, 0, 1).matrix(), 0.25 * gates::identity(4), 1e-14));
    EXPECT_TRUE(approx_equal(noisy_cnot_apply(ket10, 0.05, 0, 1).matrix(),
                             0.95 * ket11 + 0.05 * 0.25 * gates::identity(4), 1e-15));
}

TEST(NoisyCnot, Errors) {
    const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
    EXPECT_THROW(noisy_cnot_apply(rho, 0.1, 0, 0), DimensionError);
    EXPECT_THROW(noisy_cnot_apply(rho, 0.1, 0, 2), DimensionError);
    EXPECT_THROW(noisy_cnot_apply(rho, 1.1, 0, 1), InvalidParams);
}

TEST(NoisyCnot, DepolarizerKeepsSpectatorMarginal) {
    Gen g(15);
    for (int i = 0; i < 50; ++i) {
        const DensityMatrix rho = g.density(3);
        // control 2, target 0; spectator qubit 1
        const DensityMatrix out = noisy_cnot_apply(rho, 1.0, 2, 0);
        const ComplexMatrix spectator = partial_trace(rho, {1}).matrix();
        const ComplexMatrix expected = kron_all({0.5 * gates::identity(2), spectator, 0.5 * gates::identity(2)});
        ASSERT_LT(max_abs_diff(out.matrix(), expected), 1e-14);
    }
}

TEST(NoisyCnot, PropertyTracePreservingPsdAndMatchesUnitaryAtZero) {
    Gen g(16);
    for (int i = 0; i < 200; ++i) {
        const int n = g.integer(2, 4);
        const int c = g.integer(0, n - 1);
        int t = g.integer(0, n - 2);
        t += (t >= c) ? 1 : 0;
        const DensityMatrix rho = g.density(n);
        const double eps = g.uniform(0.0, 1.0);
        const DensityMatrix out = noisy_cnot_apply(rho, eps, c, t);
        ASSERT_NEAR(out.trace(), 1.0, 1e-12);
        ASSERT_GE(hermitian_eigenvalues(out.matrix())(0), -1e-12);
        ASSERT_TRUE(is_hermitian(out.matrix(), 1e-13));
        const DensityMatrix ideal = noisy_cnot_apply(rho, 0.0, c, t);
        ASSERT_LT(max_abs_diff(ideal.matrix(), apply_unitary(rho, embedded_cnot(n, c, t)).matrix()), 1e-12);
    }
}

TEST(NoisyCnot, SelfAdjointChannel) {
    // tr[A N(B)] = tr[N(A) B] for the depolarizing part and the CNOT part alike
    Gen g(17);
    for (int i = 0; i < 50; ++i) {
        const ComplexMatrix a = g.ginibre(8);
        const ComplexMatrix b = g.ginibre(8);
        const double eps = g.uniform(0.0, 1.0);
        const Complex lhs = (a * noisy_cnot(b, 3, 1, 2, eps)).trace();
        const Complex rhs = (noisy_cnot(a, 3, 1, 2, eps) * b).trace();
        ASSERT_LT(std::abs(lhs - rhs), 1e-11);
    }
}
