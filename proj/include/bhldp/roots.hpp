#ifndef BHLDP_ROOTS_HPP
#define BHLDP_ROOTS_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "bhldp/errors.hpp"

namespace bhldp::roots {

// Bisection on [lo, hi] with f(lo), f(hi) of opposite sign. Runs until the
// midpoint coincides with an endpoint, i.e. to full double resolution.
template <class F>
double bisect(F&& f, double lo, double hi) {
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo < 0.0) == (f_hi < 0.0)) throw domain_error("bisect: no sign change on bracket");
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(f_lo) <= std::abs(f(hi)) ? lo : hi;
}

// Sign-change brackets of f on a grid; zero counts as non-negative.
template <class F>
std::vector<std::pair<double, double>> scan_brackets(F&& f, const std::vector<double>& grid) {
    std::vector<std::pair<double, double>> out;
    if (grid.empty()) return out;
    bool prev_neg = f(grid.front()) < 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const bool neg = f(grid[i]) < 0.0;
        if (neg != prev_neg) out.emplace_back(grid[i - 1], grid[i]);
        prev_neg = neg;
    }
    return out;
}

}  // namespace bhldp::roots

#endif  // BHLDP_ROOTS_HPP
