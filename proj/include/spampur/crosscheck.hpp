#pragma once

// Closed-form vs tensor-oracle equivalence suite. Each check reports the
// largest deviation seen over its parameter grid.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spampur/netapps.hpp"
#include "spampur/oracle.hpp"
#include "spampur/purify.hpp"
#include "spampur/verify.hpp"

namespace spampur {

struct CheckResult {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    int cases = 0;

    bool passed() const { return max_deviation <= tolerance; }
};

struct CrosscheckGrid {
    std::vector<double> f{0.75, 0.9, 0.95, 0.99};
    std::vector<double> q{0.01, 0.05, 0.1, 0.25};
    std::vector<double> eps{0.0, 0.01, 0.05};
    int max_depth = 5;
    int max_swap_depth = 3;
    std::vector<double> werner{0.55, 0.7, 0.85};
    double tolerance = 1e-10;
    double layout_tolerance = 1e-12;
};

namespace detail {

class Tracker {
public:
    Tracker(std::string name, double tol) : result_{std::move(name), 0.0, tol, 0} {}

    void see(double a, double b) {
        const double dev = std::abs(a - b);
        // a NaN deviation must fail the check
        result_.max_deviation = std::isnan(dev) ? dev : std::max(result_.max_deviation, dev);
        ++result_.cases;
    }

    CheckResult result() const { return result_; }

private:
    CheckResult result_;
};

inline EffectPair effects_from_diagonals(double r0, double r1) {
    ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
    ComplexMatrix e1 = ComplexMatrix::Zero(2, 2);
    e0(0, 0) = r0;
    e0(1, 1) = r1;
    e1(0, 0) = r1;
    e1(1, 1) = r0;
    return {PovmElement::trusted(std::move(e0)), PovmElement::trusted(std::move(e1))};
}

} // namespace detail

inline std::vector<CheckResult> run_crosschecks(const CrosscheckGrid& grid = {}) {
    detail::Tracker prep_fid("prep_fidelity", grid.tolerance);
    detail::Tracker prep_acc("prep_acceptance", grid.tolerance);
    detail::Tracker meas_noise("meas_noise", grid.tolerance);
    detail::Tracker meas_acc("meas_acceptance", grid.tolerance);
    detail::Tracker meas_diag("meas_effect_diagonals", grid.tolerance);
    detail::Tracker meas_offdiag("meas_effect_offdiagonal", grid.tolerance);
    detail::Tracker distill_fid("distill_fidelity", grid.tolerance);
    detail::Tracker distill_acc("distill_acceptance", grid.tolerance);
    detail::Tracker swap_fid("swap_fidelity", grid.tolerance);
    detail::Tracker verify_probs("verification_probs", grid.tolerance);
    detail::Tracker layout("collective_vs_pairwise", grid.layout_tolerance);

    for (double f : grid.f) {
        for (double q : grid.q) {
            for (double eps : grid.eps) {
                const SpamParams p = SpamParams::make(f, q, eps);
                const DensityMatrix rho = noisy_prep(f);
                const auto probs = oracle::simulate_verification_experiment(p);
                const auto model = predict_probs(p).as_array();
                for (std::size_t i = 0; i < 4; ++i) {
                    verify_probs.see(probs[i], model[i]);
                }
                for (int n = 1; n <= grid.max_depth; ++n) {
                    const auto sim = oracle::simulate_prep_purification(rho, q, eps, n);
                    const PrepResult closed = prep_fidelity(p, n);
                    prep_fid.see(sim.conditional_fidelity, closed.fidelity);
                    prep_acc.see(sim.acceptance_prob, closed.success);

                    const auto msim = oracle::simulate_meas_purification(p, n);
                    const MeasResult mclosed = meas_purified(p, n);
                    const Diagonals raw = meas_diagonals(p, n);
                    meas_noise.see(msim.normalized.zero.matrix()(1, 1).real(), mclosed.noise);
                    meas_acc.see(msim.success, mclosed.success);
                    meas_diag.see(msim.raw.zero.matrix()(0, 0).real(), raw.first);
                    meas_diag.see(msim.raw.zero.matrix()(1, 1).real(), raw.second);
                    meas_diag.see(msim.raw.one.matrix()(1, 1).real(), raw.first);
                    meas_diag.see(msim.raw.one.matrix()(0, 0).real(), raw.second);
                    meas_offdiag.see(std::abs(msim.raw.zero.matrix()(0, 1)), 0.0);
                    meas_offdiag.see(std::abs(msim.raw.one.matrix()(0, 1)), 0.0);

                    if (eps == 0.0) {
                        const auto coll = oracle::simulate_prep_purification(rho, q, eps, n, oracle::CnotLayout::collective);
                        layout.see(max_abs_diff(coll.accepted_state.matrix(), sim.accepted_state.matrix()), 0.0);
                        const auto mcoll = oracle::simulate_meas_purification(p, n, oracle::CnotLayout::collective);
                        layout.see(max_abs_diff(mcoll.raw.zero.matrix(), msim.raw.zero.matrix()), 0.0);
                        layout.see(max_abs_diff(mcoll.raw.one.matrix(), msim.raw.one.matrix()), 0.0);
                    }
                }
                for (int n = 0; n <= grid.max_swap_depth; ++n) {
                    const auto sim = oracle::simulate_swap(p, n);
                    const Diagonals raw = meas_diagonals(p, n);
                    const double closed = eps == 0.0 ? swap_fidelity(p, n) : swap_fidelity_from_diagonals(raw.first, raw.second);
                    swap_fid.see(sim.fidelity, closed);

                    const PovmDiagonals r = povm_diag_recurrence(p, n);
                    const EffectPair effects = detail::effects_from_diagonals(r.r0, r.r1);
                    for (double F : grid.werner) {
                        const auto round = oracle::simulate_distill_round(F, effects);
                        distill_fid.see(round.fidelity, distill_map(F, r.r0, r.r1));
                        distill_acc.see(round.acceptance, distill_success(F, r.r0, r.r1));
                    }
                }
            }
        }
    }
    // ideal readout
    for (double F : grid.werner) {
        const auto round = oracle::simulate_distill_round(F, noisy_meas(0.0));
        distill_fid.see(round.fidelity, distill_map(F, 1.0, 0.0));
        distill_acc.see(round.acceptance, distill_success(F, 1.0, 0.0));
    }

    return {prep_fid.result(),    prep_acc.result(),   meas_noise.result(),  meas_acc.result(),
            meas_diag.result(),   meas_offdiag.result(), distill_fid.result(), distill_acc.result(),
            swap_fid.result(),    verify_probs.result(), layout.result()};
}

} // namespace spampur
