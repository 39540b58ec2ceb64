#pragma once

// Two-qubit SPAM verification: two noisy preparations, one noisy CNOT, two
// noisy readouts. The forward model maps (f, q, eps) to the four outcome
// probabilities; the inverse recovers (f, q, eps) from a distribution.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spampur/error.hpp"
#include "spampur/noise.hpp"

namespace spampur {

struct OutcomeDistribution {
    double p00 = 1.0;
    double p01 = 0.0;
    double p10 = 0.0;
    double p11 = 0.0;

    static constexpr double kSumTol = 1e-9;

    /// Validates each entry in [0, 1] and the total within kSumTol.
    static OutcomeDistribution from_probabilities(double p00, double p01, double p10, double p11) {
        const OutcomeDistribution d{p00, p01, p10, p11};
        for (double p : d.as_array()) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw InvalidParams("outcome probabilities must lie in [0, 1]");
            }
        }
        const double total = p00 + p01 + p10 + p11;
        if (std::abs(total - 1.0) > kSumTol) {
            throw InvalidParams("outcome probabilities sum to " + std::to_string(total) + ", expected 1");
        }
        return d;
    }

    /// Normalizes a histogram of counts.
    static OutcomeDistribution from_counts(double c00, double c01, double c10, double c11) {
        const double total = c00 + c01 + c10 + c11;
        if (!(c00 >= 0 && c01 >= 0 && c10 >= 0 && c11 >= 0) || !(total > 0.0)) {
            throw InvalidParams("counts must be non-negative with a positive total");
        }
        return {c00 / total, c01 / total, c10 / total, c11 / total};
    }

    std::array<double, 4> as_array() const { return {p00, p01, p10, p11}; }
};

namespace detail {

struct ModelEval {
    std::array<double, 4> probs{};
    Eigen::Matrix<double, 4, 3> jacobian; // columns: d/df, d/dq, d/deps
};

// After CNOT the register holds |00>: f^2, |01>: f(1-f), |11>: (1-f)f, |10>: (1-f)^2.
// Each qubit is then read with P(i|a) = 1-q if i == a else q.
inline ModelEval verification_model(double f, double q, double eps) {
    const double g = 1.0 - f;
    // weights w[a][b] of the post-CNOT populations and their f-derivatives
    const double w[2][2] = {{f * f, f * g}, {g * g, g * f}};
    const double dw[2][2] = {{2.0 * f, 1.0 - 2.0 * f}, {-2.0 * g, 1.0 - 2.0 * f}};
    auto read = [q](int i, int a) { return i == a ? 1.0 - q : q; };
    auto dread = [](int i, int a) { return i == a ? -1.0 : 1.0; };

    ModelEval out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            double bracket = 0.0, df = 0.0, dq = 0.0;
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const double rr = read(i, a) * read(j, b);
                    bracket += w[a][b] * rr;
                    df += dw[a][b] * rr;
                    dq += w[a][b] * (dread(i, a) * read(j, b) + read(i, a) * dread(j, b));
                }
            }
            const int idx = 2 * i + j;
            out.probs[static_cast<std::size_t>(idx)] = (1.0 - eps) * bracket + 0.25 * eps;
            out.jacobian(idx, 0) = (1.0 - eps) * df;
            out.jacobian(idx, 1) = (1.0 - eps) * dq;
            out.jacobian(idx, 2) = 0.25 - bracket;
        }
    }
    return out;
}

} // namespace detail

/// Outcome probabilities of the verification experiment:
///   p(00) = (1-e)[f^2(1-q)^2 + f(1-f)(1-q)q + (1-f)^2 q(1-q) + (1-f)f q^2] + e/4
///   p(01) = (1-e)[f^2(1-q)q + f(1-f)(1-q)^2 + (1-f)^2 q^2 + (1-f)f q(1-q)] + e/4
///   p(10) = (1-e)[f^2 q(1-q) + f(1-f)q^2 + (1-f)^2(1-q)^2 + (1-f)f(1-q)q] + e/4
///   p(11) = (1-e)[f^2 q^2 + f(1-f)q(1-q) + (1-f)^2(1-q)q + (1-f)f(1-q)^2] + e/4
inline OutcomeDistribution predict_probs(const SpamParams& p) {
    p.validate();
    const auto probs = detail::verification_model(p.f, p.q, p.eps).probs;
    return {probs[0], probs[1], probs[2], probs[3]};
}

struct InferOptions {
    int grid_points = 21;       ///< per axis of the coarse search
    int grid_starts = 6;        ///< best grid points refined
    int random_starts = 8;      ///< extra seeded starts
    std::uint64_t seed = 20250101;
    int max_iterations = 300;
    double residual_threshold = 1e-4; ///< on the Euclidean norm of the probability mismatch
    double distinct_tol = 1e-4;       ///< solutions further apart than this count as distinct
};

struct InferResult {
    SpamParams params;
    double residual = 0.0; ///< || predict_probs(params) - dist ||_2
    bool consistent = true;
    bool ambiguous = false;
    std::optional<SpamParams> alternative; ///< a distinct fit within threshold, when ambiguous
    int iterations = 0;
};

namespace detail {

struct Box {
    std::array<double, 3> lo{0.5, 0.0, 0.0};
    std::array<double, 3> hi{1.0, 0.5 - 1e-12, 1.0};

    Eigen::Vector3d clamp(Eigen::Vector3d x) const {
        for (int i = 0; i < 3; ++i) {
            x(i) = std::clamp(x(i), lo[static_cast<std::size_t>(i)], hi[static_cast<std::size_t>(i)]);
        }
        return x;
    }
};

inline double sse(const Eigen::Vector3d& x, const std::array<double, 4>& target) {
    const auto probs = verification_model(x(0), x(1), x(2)).probs;
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        s += (probs[i] - target[i]) * (probs[i] - target[i]);
    }
    return s;
}

struct Fit {
    Eigen::Vector3d x;
    double sse = 0.0;
    int iterations = 0;
};

// Levenberg-Marquardt with an active set for the box: coordinates sitting on
// a bound whose gradient points outward are frozen for the step.
inline Fit refine(Eigen::Vector3d x, const std::array<double, 4>& target, const Box& box, int max_iterations) {
    x = box.clamp(x);
    double cost = sse(x, target);
    double lambda = 1e-3;
    int it = 0;
    for (; it < max_iterations && cost > 1e-32; ++it) {
        const ModelEval ev = verification_model(x(0), x(1), x(2));
        Eigen::Vector4d r;
        for (int i = 0; i < 4; ++i) {
            r(i) = ev.probs[static_cast<std::size_t>(i)] - target[static_cast<std::size_t>(i)];
        }
        const Eigen::Matrix3d jtj = ev.jacobian.transpose() * ev.jacobian;
        const Eigen::Vector3d grad = ev.jacobian.transpose() * r;

        std::array<bool, 3> active{};
        for (int i = 0; i < 3; ++i) {
            const auto k = static_cast<std::size_t>(i);
            active[k] = (x(i) <= box.lo[k] && grad(i) > 0.0) || (x(i) >= box.hi[k] && grad(i) < 0.0);
        }

        bool improved = false;
        while (lambda < 1e12) {
            Eigen::Matrix3d a = jtj;
            Eigen::Vector3d b = -grad;
            for (int i = 0; i < 3; ++i) {
                a(i, i) += lambda * std::max(jtj(i, i), 1e-12);
                if (active[static_cast<std::size_t>(i)]) {
                    a.row(i).setZero();
                    a.col(i).setZero();
                    a(i, i) = 1.0;
                    b(i) = 0.0;
                }
            }
            const Eigen::Vector3d step = a.ldlt().solve(b);
            const Eigen::Vector3d trial = box.clamp(x + step);
            const double trial_cost = sse(trial, target);
            if (trial_cost < cost) {
                const double moved = (trial - x).cwiseAbs().maxCoeff();
                x = trial;
                cost = trial_cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = moved > 1e-16;
                break;
            }
            lambda *= 4.0;
        }
        if (!improved) {
            break;
        }
    }
    return {x, cost, it};
}

} // namespace detail

/// Least-squares fit of (f, q, eps) to an outcome distribution: coarse grid
/// over the admissible box, then damped Gauss-Newton from the best grid points
/// and a fixed seeded set of random starts. Deterministic for a given seed.
inline InferResult infer_params(const OutcomeDistribution& dist, const InferOptions& opt = {}) {
    const auto target = dist.as_array();
    const double total = target[0] + target[1] + target[2] + target[3];
    if (std::abs(total - 1.0) > OutcomeDistribution::kSumTol) {
        throw InvalidParams("outcome distribution is not normalized");
    }
    if (opt.grid_points < 2) {
        throw InvalidParams("grid needs at least two points per axis");
    }
    const detail::Box box;

    struct Candidate {
        Eigen::Vector3d x;
        double cost;
    };
    std::vector<Candidate> grid;
    const int g = opt.grid_points;
    grid.reserve(static_cast<std::size_t>(g) * static_cast<std::size_t>(g) * static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            for (int k = 0; k < g; ++k) {
                const double t = 1.0 / (g - 1);
                Eigen::Vector3d x(0.5 + 0.5 * i * t, 0.5 * j * t, k * t);
                x = box.clamp(x);
                grid.push_back({x, detail::sse(x, target)});
            }
        }
    }
    std::stable_sort(grid.begin(), grid.end(), [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });

    std::vector<Eigen::Vector3d> starts;
    for (int i = 0; i < opt.grid_starts && i < static_cast<int>(grid.size()); ++i) {
        starts.push_back(grid[static_cast<std::size_t>(i)].x);
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < opt.random_starts; ++i) {
        const double f = 0.5 + 0.5 * unit(rng);
        const double q = 0.5 * unit(rng);
        const double e = unit(rng);
        starts.push_back(box.clamp(Eigen::Vector3d(f, q, e)));
    }

    std::vector<detail::Fit> fits;
    fits.reserve(starts.size());
    for (const auto& s : starts) {
        fits.push_back(detail::refine(s, target, box, opt.max_iterations));
    }
    const auto best_it = std::min_element(fits.begin(), fits.end(),
                                          [](const detail::Fit& a, const detail::Fit& b) { return a.sse < b.sse; });
    const detail::Fit& best = *best_it;

    InferResult result;
    result.params = SpamParams{best.x(0), best.x(1), best.x(2)};
    result.residual = std::sqrt(best.sse);
    result.consistent = result.residual <= opt.residual_threshold;
    result.iterations = best.iterations;
    const double thr2 = opt.residual_threshold * opt.residual_threshold;
    for (const auto& fit : fits) {
        if (fit.sse <= thr2 && (fit.x - best.x).cwiseAbs().maxCoeff() > opt.distinct_tol) {
            result.ambiguous = true;
            result.alternative = SpamParams{fit.x(0), fit.x(1), fit.x(2)};
            break;
        }
    }
    return result;
}

} // namespace spampur
