#pragma once

// Seeded generators for property tests.

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "spampur/noise.hpp"
#include "spampur/qops.hpp"

namespace spampur::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

    /// f in (1/2, 1), q in (0, 1/2) with margins; eps in [0, eps_max].
    SpamParams params(double eps_max = 0.0) {
        return SpamParams::make(uniform(0.52, 0.999), uniform(0.001, 0.45), eps_max > 0.0 ? uniform(0.0, eps_max) : 0.0);
    }

    ComplexMatrix ginibre(Eigen::Index dim) {
        ComplexMatrix g(dim, dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                g(i, j) = Complex(normal(), normal());
            }
        }
        return g;
    }

    /// G G^dagger / tr, full rank with probability one.
    DensityMatrix density(int n_qubits) {
        const ComplexMatrix g = ginibre(Eigen::Index{1} << n_qubits);
        ComplexMatrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        return DensityMatrix::from_matrix(rho);
    }

    /// Q from a QR of a Ginibre matrix.
    ComplexMatrix unitary(Eigen::Index dim) {
        Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(dim));
        return qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    }

    /// Diagonal single-qubit effect diag(a, b) with 0 <= a, b <= 1.
    PovmElement diagonal_effect() {
        ComplexMatrix e = ComplexMatrix::Zero(2, 2);
        e(0, 0) = uniform(0.0, 1.0);
        e(1, 1) = uniform(0.0, 1.0);
        return PovmElement::from_matrix(e);
    }

private:
    std::mt19937_64 rng_;
};

} // namespace spampur::testing
