// Stationary emission regime x_B against the cube-root law over a range of B.
//
//   regime_sweep [lambda mu]

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "bhldp/extremal_flow.hpp"
#include "bhldp/large_deviations.hpp"

int main(int argc, char** argv) {
    const double lambda = argc > 2 ? std::atof(argv[1]) : 1.0;
    const double mu = argc > 2 ? std::atof(argv[2]) : 1.0;
    const bhldp::ModelParams p{lambda, mu, 100, 1.0};

    std::printf("B,x_B,asymptotic_x,ratio,I_rate,G_minimizer\n");
    for (double B = 10.0; B <= 1e6; B *= std::sqrt(10.0)) {
        try {
            const bhldp::RegimeSolution r = bhldp::solve_regime(p, B);
            const bhldp::GInfimum g = bhldp::infimum_over_G(p, B);
            std::printf("%.6g,%.10f,%.10f,%.6f,%.6g,%.10f\n", B, r.x_B, r.asymptotic_x, r.x_B / r.asymptotic_x,
                        r.I_rate, g.x_star);
        } catch (const bhldp::regime_ambiguity& e) {
            std::fprintf(stderr, "B = %g: %zu candidate roots, skipped\n", B, e.brackets().size());
        }
    }
}
