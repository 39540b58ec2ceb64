// Walk-through: purify a noisy preparation and readout, check the result
// against the tensor simulation, recover the device parameters from outcome
// statistics, and estimate distillation cost.

#include <cstdio>

#include "spampur/netapps.hpp"
#include "spampur/oracle.hpp"
#include "spampur/purify.hpp"
#include "spampur/verify.hpp"

int main() {
    using namespace spampur;

    const SpamParams device = SpamParams::make(0.95, 0.05, 0.05);

    std::printf("n  fidelity  success\n");
    for (int n = 0; n <= 4; ++n) {
        const PrepResult r = prep_fidelity(device, n);
        std::printf("%d  %.6f  %.6f\n", n, r.fidelity, r.success);
    }
    const FixedPoint fp = fixed_point(device);
    std::printf("limit: f = %.6f, q = %.6f\n", fp.f_inf, fp.q_inf);

    const auto sim = oracle::simulate_prep_purification(noisy_prep(device.f), device.q, device.eps, 2);
    std::printf("tensor simulation, n = 2: fidelity %.12f, acceptance %.12f\n", sim.conditional_fidelity,
                sim.acceptance_prob);

    const MeasResult m2 = meas_purified(device, 2);
    std::printf("readout noise with 2 ancillas: %.6f (success %.6f)\n", m2.noise, m2.success);

    const OutcomeDistribution observed = predict_probs(device);
    const InferResult fit = infer_params(observed);
    std::printf("recovered f = %.6f, q = %.6f, eps = %.6f (residual %.2e)\n", fit.params.f, fit.params.q,
                fit.params.eps, fit.residual);

    const SpamParams ideal_gates = SpamParams::make(0.95, 0.05, 0.0);
    for (int n = 0; n <= 2; ++n) {
        const DistillationTrace t = copies_needed(ideal_gates, n, 0.7);
        if (t.distillable) {
            std::printf("distill from F0 = 0.7 with %d ancillas: %zu rounds, %.4g copies\n", n, t.rounds.size(),
                        t.copies);
        } else {
            std::printf("distill from F0 = 0.7 with %d ancillas: undistillable\n", n);
        }
    }
    return 0;
}
