// Test-side reference computations. Nothing here calls the closed forms under
// test; where library code is used (the likelihood accumulator) it is the
// object being checked.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Numerical supremum of k1 vx + k2 vy - H(x, k1, k2) over (k1, k2).

struct SupResult {
    double value;
    bool unbounded;
    double k1, k2;
};

inline double dual_objective(double lambda, double mu, double x, double vx, double vy, double k1, double k2) {
    const double A = lambda * x * x * (1.0 - x), C = mu / (x * x);
    return k1 * vx + k2 * vy - (A * (std::exp(k1) - 1.0) + C * (std::exp(k2 - k1) - 1.0));
}

// Coarse grid over [-R, R]^2, then damped Newton from the best node. A best
// node on the box boundary whose objective still grows outward means the
// supremum is +inf.
namespace detail {

// Grid search over [-R, R]^2 refined by damped Newton with iterates clamped to the box.
inline SupResult sup_in_box(double lambda, double mu, double x, double vx, double vy, double R, int n) {
    auto f = [&](double a, double b) { return dual_objective(lambda, mu, x, vx, vy, a, b); };
    double best = -std::numeric_limits<double>::infinity();
    int bi = 0, bj = 0;
    const double h = 2.0 * R / (n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double v = f(-R + i * h, -R + j * h);
            if (v > best) best = v, bi = i, bj = j;
        }
    double a = -R + bi * h, b = -R + bj * h;
    auto clamp = [R](double v) { return std::clamp(v, -R, R); };
    const double A = lambda * x * x * (1.0 - x), C = mu / (x * x);
    for (int it = 0; it < 200; ++it) {
        const double ea = A * std::exp(a), ec = C * std::exp(b - a);
        const double g1 = vx - ea + ec, g2 = vy - ec;
        // Hessian of the objective (negative semi-definite).
        const double h11 = -ea - ec, h12 = ec, h22 = -ec;
        const double det = h11 * h22 - h12 * h12;
        double d1, d2;
        if (det > 1e-300) {
            d1 = -(h22 * g1 - h12 * g2) / det;
            d2 = -(-h12 * g1 + h11 * g2) / det;
        } else {
            d1 = 1e-3 * g1;
            d2 = 1e-3 * g2;
        }
        const double f0 = f(a, b);
        double step = 1.0, na = a, nb = b;
        for (; step > 1e-12; step *= 0.5) {
            na = clamp(a + step * d1), nb = clamp(b + step * d2);
            if (f(na, nb) >= f0) break;
        }
        if (step <= 1e-12) break;
        const double moved = std::abs(na - a) + std::abs(nb - b);
        a = na, b = nb;
        if (moved < 1e-14 * (1.0 + std::abs(a) + std::abs(b))) break;
    }
    return {f(a, b), false, a, b};
}

}  // namespace detail

// The sup is unbounded when doubling the box still raises it.
inline SupResult legendre_sup(double lambda, double mu, double x, double vx, double vy, double R = 80.0,
                              int n = 201) {
    const SupResult small = detail::sup_in_box(lambda, mu, x, vx, vy, R, n);
    const SupResult large = detail::sup_in_box(lambda, mu, x, vx, vy, 2.0 * R, n);
    if (large.value > small.value + 1e-7 * (1.0 + std::abs(small.value)))
        return {std::numeric_limits<double>::infinity(), true, large.k1, large.k2};
    return large.value > small.value ? large : small;
}

// ---------------------------------------------------------------------------
// Path probabilities of a jump chain with piecewise-constant rates.

using Matrix = std::vector<std::vector<double>>;

inline Matrix identity(std::size_t n) {
    Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size();
    Matrix c(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

// exp(M) by scaling and squaring of a 30-term Taylor series.
inline Matrix expm(Matrix m) {
    const std::size_t n = m.size();
    double norm = 0.0;
    for (const auto& row : m) {
        double s = 0.0;
        for (double v : row) s += std::abs(v);
        norm = std::max(norm, s);
    }
    int squarings = 0;
    while (norm > 0.125) {
        norm *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    for (auto& row : m)
        for (double& v : row) v *= scale;
    Matrix result = identity(n), term = identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = multiply(term, m);
        for (auto& row : term)
            for (double& v : row) v /= k;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
    }
    for (int s = 0; s < squarings; ++s) result = multiply(result, result);
    return result;
}

// P(the first n jumps are exactly the given ones and no further jump by T).
// exit_rate[i] is the total rate out of the i-th visited state, step_rate[i]
// the rate of the jump that leaves it along the path.
inline double path_probability(const std::vector<double>& exit_rate, const std::vector<double>& step_rate, double T) {
    const std::size_t n = exit_rate.size();
    Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        m[i][i] = -exit_rate[i] * T;
        if (i + 1 < n) m[i][i + 1] = step_rate[i] * T;
    }
    return expm(m)[0][n - 1];
}

// ---------------------------------------------------------------------------
// Integration over the time simplex 0 < t1 < ... < tn < T.

struct GaussLegendre {
    std::vector<double> nodes, weights;  // on [0, 1]

    explicit GaussLegendre(int n) {
        nodes.resize(n);
        weights.resize(n);
        for (int i = 0; i < n; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 1; j <= n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
                }
                dp = n * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            nodes[i] = 0.5 * (1.0 - z);
            weights[i] = 1.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

// f receives the ordered jump times; the simplex is mapped from the unit cube
// by t_i = t_{i-1} + (T - t_{i-1}) u_i.
inline double simplex_integral(int dim, double T, const GaussLegendre& gl,
                               const std::function<double(const std::vector<double>&)>& f) {
    if (dim == 0) return f({});
    std::vector<double> t(dim);
    std::vector<int> idx(dim, 0);
    const int m = static_cast<int>(gl.nodes.size());
    double total = 0.0;
    while (true) {
        double w = 1.0, prev = 0.0;
        for (int d = 0; d < dim; ++d) {
            const double span = T - prev;
            t[d] = prev + span * gl.nodes[idx[d]];
            w *= span * gl.weights[idx[d]];
            prev = t[d];
        }
        total += w * f(t);
        int d = dim - 1;
        while (d >= 0 && ++idx[d] == m) idx[d--] = 0;
        if (d < 0) break;
    }
    return total;
}

}  // namespace oracle
