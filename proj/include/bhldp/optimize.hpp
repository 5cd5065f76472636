#ifndef BHLDP_OPTIMIZE_HPP
#define BHLDP_OPTIMIZE_HPP

// Derivative-free minimizers: golden-section search for unimodal 1-D
// problems and Nelder-Mead for the path-family searches. Objectives may
// return +inf for infeasible points.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace bhldp::optimize {

struct Minimum1D {
    double x;
    double value;
};

template <class F>
Minimum1D golden_section(F&& f, double lo, double hi, double x_tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > x_tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if (c >= d) break;
    }
    return fc <= fd ? Minimum1D{c, fc} : Minimum1D{d, fd};
}

struct NelderMeadOptions {
    double initial_step = 0.1;
    double f_tol = 1e-12;  // spread of simplex values, relative to max(1, |f_best|)
    double x_tol = 1e-10;  // simplex diameter
    std::size_t max_evaluations = 200000;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value;
    std::size_t evaluations;
    bool converged;
};

template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    // Adaptive coefficients (Gao & Han 2012) behave better in higher dimension.
    const double dn = static_cast<double>(n);
    const double alpha = 1.0, beta = 1.0 + 2.0 / dn, gamma = 0.75 - 1.0 / (2.0 * dn), delta = 1.0 - 1.0 / dn;

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opt.initial_step;
    std::vector<double> values(n + 1);
    std::size_t evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        return std::isnan(v) ? INFINITY : v;
    };
    for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    bool converged = false;
    while (evals < opt.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) diam = std::max(diam, std::abs(simplex[i][j] - simplex[best][j]));
        const double spread = values[worst] - values[best];
        if (std::isfinite(spread) && spread <= opt.f_tol * std::max(1.0, std::abs(values[best])) &&
            diam <= opt.x_tol) {
            converged = true;
            break;
        }
        if (diam <= 1e-15) {
            converged = std::isfinite(spread) && spread <= opt.f_tol * std::max(1.0, std::abs(values[best]));
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / dn;

        for (std::size_t j = 0; j < n; ++j) trial[j] = centroid[j] + alpha * (centroid[j] - simplex[worst][j]);
        const double f_r = eval(trial);
        if (f_r < values[best]) {
            for (std::size_t j = 0; j < n; ++j) trial2[j] = centroid[j] + beta * (trial[j] - centroid[j]);
            const double f_e = eval(trial2);
            if (f_e < f_r) {
                simplex[worst] = trial2;
                values[worst] = f_e;
            } else {
                simplex[worst] = trial;
                values[worst] = f_r;
            }
            continue;
        }
        if (f_r < values[second]) {
            simplex[worst] = trial;
            values[worst] = f_r;
            continue;
        }
        const bool outside = f_r < values[worst];
        for (std::size_t j = 0; j < n; ++j)
            trial2[j] = outside ? centroid[j] + gamma * (trial[j] - centroid[j])
                                : centroid[j] + gamma * (simplex[worst][j] - centroid[j]);
        const double f_c = eval(trial2);
        if (f_c < (outside ? f_r : values[worst])) {
            simplex[worst] = trial2;
            values[worst] = f_c;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + delta * (simplex[i][j] - simplex[best][j]);
            values[i] = eval(simplex[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    return {simplex[best], values[best], evals, converged};
}

}  // namespace bhldp::optimize

#endif  // BHLDP_OPTIMIZE_HPP
