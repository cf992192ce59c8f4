// Walk through one desk-scale measurement: draw an outcome, compare the
// closed-form squeezing with the exact posterior, then plan the Pr crystal.

#include <cstdio>
#include <numbers>

#include "spinsq/spinsq.hpp"

int main() {
    using namespace spinsq;

    const std::int64_t n = 400;
    const double i0 = 100, strength = 4;  // strength = 2 I0 N phi^2
    const EnsembleSpec ens{n, std::sqrt(strength / (2 * i0 * n))};
    const auto probe = make_probe(i0, std::numbers::pi / 4);

    std::printf("N = %lld, I0 = %g, phi = %.4g\n", static_cast<long long>(n), i0, ens.phi);
    std::printf("ideal xi^2 at the most probable outcome: %.4f\n", 1 / (1 + strength));

    const auto mode = most_probable_outcome(probe);
    std::printf("most probable outcome (%.1f, %.1f): closed %.4f exact %.4f\n", mode.i_alpha, mode.i_beta,
                xi_closed_form(ens, probe, mode).xi_sq, oracle_xi(ens, probe, mode).xi_sq);

    for (std::uint64_t seed : {1, 2, 3}) {
        const auto o = sample_outcome(ens, probe, seed);
        std::printf("sampled outcome (%.0f, %.0f): closed %.4f exact %.4f\n", o.i_alpha, o.i_beta,
                    xi_closed_form(ens, probe, o).xi_sq, oracle_xi(ens, probe, o).xi_sq);
    }

    const auto pr = pr_yso();
    const auto r = plan_optimal(pr.material, pr.geometry);
    std::printf("\n%s crystal: d = %g, N = %.3g, I0 = %.3g, eta = %.4f -> xi'^2 = %.3f (%.1f dB)\n", r.name.c_str(),
                r.optical_depth, r.n_atoms, r.i0, r.eta, r.xi_prime_sq, r.xi_prime_db);
}
