#ifndef BHLDP_PATHS_HPP
#define BHLDP_PATHS_HPP

#include <cstddef>
#include <sstream>
#include <vector>

#include "bhldp/errors.hpp"

namespace bhldp {

// Grid-sampled pair (x(t), y(t)): hole fraction and cumulative scaled emission.
struct ScaledPath {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return t.size(); }
};

// Uniform grid on [0, T] with n_steps + 1 points. Point j is T*j/n_steps, so
// refining n_steps by a power of two reproduces the shared points exactly.
inline std::vector<double> uniform_grid(double T, std::size_t n_steps) {
    if (n_steps < 1) throw invalid_parameter("n_steps must be >= 1");
    std::vector<double> g(n_steps + 1);
    for (std::size_t j = 0; j <= n_steps; ++j) g[j] = T * static_cast<double>(j) / static_cast<double>(n_steps);
    return g;
}

// Checks x in [x_min, 1], y non-decreasing and y[0] == 0.
inline void check_scaled_path(const ScaledPath& p, double x_min) {
    if (p.x.size() != p.t.size() || p.y.size() != p.t.size()) throw domain_error("path columns differ in length");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p.x[i] >= x_min && p.x[i] <= 1.0)) {
            std::ostringstream os;
            os << "x[" << i << "] = " << p.x[i] << " outside [" << x_min << ", 1]";
            throw domain_error(os.str());
        }
        if (i > 0 && p.y[i] < p.y[i - 1]) throw domain_error("y decreases at index " + std::to_string(i));
    }
    if (!p.y.empty() && p.y[0] != 0.0) throw domain_error("y(0) must be 0");
}

}  // namespace bhldp

#endif  // BHLDP_PATHS_HPP
