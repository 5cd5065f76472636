// Crude Monte Carlo against the regime-tilted estimator on a small system,
// where both can see the event.
//
//   tilted_vs_naive [N B replicas]

#include <cstdio>
#include <cstdlib>

#include "bhldp/fluid_limit.hpp"
#include "bhldp/rare_event.hpp"

int main(int argc, char** argv) {
    const std::int64_t N = argc > 3 ? std::atoll(argv[1]) : 20;
    const double B = argc > 3 ? std::atof(argv[2]) : 2.4;
    const std::size_t R = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 20000;
    const bhldp::ModelParams p{15.0, 1.0, N, 1.0};

    const auto stable = bhldp::stationary_points(p).roots.back().x;
    const auto init = bhldp::InitialCondition::fixed(bhldp::regime_initial_k(p, stable));
    const auto naive = bhldp::naive_estimate(p, B, R, 1, init);
    const auto regime = bhldp::solve_regime(p, B);
    const auto tilted = bhldp::tilted_estimate(p, B, bhldp::regime_tilt(regime), R, 2, init);

    std::printf("N = %lld, B = %g, start k = %lld, %zu replicas\n", static_cast<long long>(N), B,
                static_cast<long long>(*init.k), R);
    std::printf("naive : p = %.4e +- %.1e  (%zu hits)\n", naive.estimate, naive.std_error, naive.hits);
    std::printf("tilted: p = %.4e +- %.1e  (ESS %.0f, kappa1 = %.4f, kappa2 = %.4f)\n", tilted.estimate,
                tilted.std_error, tilted.ess, regime.kappa1, regime.kappa2);
    std::printf("-(1/N) ln p = %.4f, inf over G = %.4f\n", tilted.log_per_quantum,
                bhldp::infimum_over_G(p, B).I_star);
}
