#ifndef BHLDP_LARGE_DEVIATIONS_HPP
#define BHLDP_LARGE_DEVIATIONS_HPP

// Hamiltonian of the scaled process, its Legendre transform and the path
// rate functional
//
//   H(x, k1, k2) = A(x) (e^k1 - 1) + C(x) (e^(k2 - k1) - 1),
//   A(x) = lambda x^2 (1 - x),  C(x) = mu / x^2,
//   I(x, y) = int_0^T L(x, dx/dt, dy/dt) dt.
//
// Writing k1 vx + k2 vy = k1 (vx + vy) + (k2 - k1) vy separates the supremum
// into two one-dimensional Poisson transforms, so
//
//   L(x, vx, vy) = l(vx + vy; A(x)) + l(vy; C(x)),  l(q; r) = q ln(q/r) - q + r,
//
// with L = +inf unless vy >= 0 and vx + vy >= 0.

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bhldp/errors.hpp"
#include "bhldp/optimize.hpp"
#include "bhldp/parallel.hpp"
#include "bhldp/params.hpp"
#include "bhldp/paths.hpp"
#include "bhldp/rng.hpp"

namespace bhldp {

inline constexpr double infinite_cost = std::numeric_limits<double>::infinity();

// |vx + vy| below this counts as zero absorption flux.
inline constexpr double flux_tolerance = 1e-12;

inline double absorption_rate(const ModelParams& p, double x) { return p.lambda * x * x * (1.0 - x); }
inline double emission_rate(const ModelParams& p, double x) { return p.mu / (x * x); }

/// Cost l(q; r) = q ln(q/r) - q + r of running a Poisson flux of natural
/// intensity r at intensity q. l(0; r) = r; l(q; 0) = +inf for q > 0.
inline double poisson_cost(double q, double r) {
    if (q < 0.0 || r < 0.0) return infinite_cost;
    if (q == 0.0) return r;
    if (r == 0.0) return infinite_cost;
    const double d = (q - r) / r;
    if (std::abs(d) < 0.05) {
        // (1+d) ln(1+d) - d = sum_{n>=2} (-1)^n d^n / (n (n-1))
        double term = d * d, sum = 0.0;
        for (int n = 2; n < 20; ++n) {
            sum += (n % 2 == 0 ? term : -term) / (n * (n - 1.0));
            term *= d;
        }
        return r * sum;
    }
    return r * ((1.0 + d) * std::log1p(d) - d);
}

struct PhasePoint {
    double x;
    double kappa1;
    double kappa2;
};

struct VelocityPoint {
    double x;
    double vx;
    double vy;
};

namespace detail {

inline void require_open_unit(double x, const char* where) {
    if (!(x > 0.0 && x <= 1.0)) {
        std::ostringstream os;
        os << where << ": x = " << x << " outside (0, 1]";
        throw domain_error(os.str());
    }
}

}  // namespace detail

inline double hamiltonian(const ModelParams& p, const PhasePoint& z) {
    detail::require_open_unit(z.x, "hamiltonian");
    return absorption_rate(p, z.x) * std::expm1(z.kappa1) + emission_rate(p, z.x) * std::expm1(z.kappa2 - z.kappa1);
}

inline double lagrangian(const ModelParams& p, const VelocityPoint& v) {
    detail::require_open_unit(v.x, "lagrangian");
    if (!(v.vy >= 0.0)) return infinite_cost;
    double absorbed = v.vx + v.vy;
    if (std::abs(absorbed) <= flux_tolerance) absorbed = 0.0;
    if (absorbed < 0.0) return infinite_cost;
    const double A = v.x == 1.0 ? 0.0 : absorption_rate(p, v.x);
    return poisson_cost(absorbed, A) + poisson_cost(v.vy, emission_rate(p, v.x));
}

// A ScaledPath with per-cell forward-difference velocities. The Lagrangian of
// cell i is evaluated at the cell midpoint of x.
struct PathPair {
    ScaledPath path;
    std::vector<double> vx;
    std::vector<double> vy;
    std::vector<double> x_mid;
};

inline PathPair make_path_pair(ScaledPath path) {
    const std::size_t n = path.size();
    if (n < 2) throw invalid_parameter("rate functional needs a grid with at least 2 points");
    if (path.x.size() != n || path.y.size() != n) throw invalid_parameter("path columns differ in length");
    if (path.y[0] != 0.0) throw domain_error("path must start at y(0) = 0");
    for (std::size_t i = 0; i < n; ++i) detail::require_open_unit(path.x[i], "path");
    PathPair pp;
    pp.vx.resize(n - 1);
    pp.vy.resize(n - 1);
    pp.x_mid.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = path.t[i + 1] - path.t[i];
        if (!(h > 0.0)) throw invalid_parameter("path grid must be strictly increasing");
        pp.vx[i] = (path.x[i + 1] - path.x[i]) / h;
        pp.vy[i] = (path.y[i + 1] - path.y[i]) / h;
        pp.x_mid[i] = 0.5 * (path.x[i] + path.x[i + 1]);
    }
    pp.path = std::move(path);
    return pp;
}

inline double rate_functional(const ModelParams& p, const PathPair& pp) {
    if (pp.path.size() < 2) throw invalid_parameter("rate functional needs a grid with at least 2 points");
    double total = 0.0;
    for (std::size_t i = 0; i < pp.vx.size(); ++i) {
        const double cell = lagrangian(p, {pp.x_mid[i], pp.vx[i], pp.vy[i]});
        if (cell == infinite_cost) return infinite_cost;
        total += (pp.path.t[i + 1] - pp.path.t[i]) * cell;
    }
    return total;
}

inline double rate_functional(const ModelParams& p, const ScaledPath& path) {
    return rate_functional(p, make_path_pair(path));
}

// ---------------------------------------------------------------------------
// Infimum over constant-x, linear-y paths: x(t) = c1, y(t) = c2 t, c2 >= B.

inline double constant_path_rate(const ModelParams& p, double c1, double c2) {
    if (!(c1 > 0.0 && c1 < 1.0)) return infinite_cost;
    return poisson_cost(c2, absorption_rate(p, c1)) + poisson_cost(c2, emission_rate(p, c1));
}

struct GInfimum {
    double B;
    double x_star;
    double c2_star;
    double rate;             // integrand value per unit time
    double I_star;           // T * rate
    bool c2_on_boundary;     // c2_star == B
    bool rare;               // B exceeds the cheapest emission rate, I_star > 0
};

inline GInfimum infimum_over_G(const ModelParams& p, double B) {
    validate(p);
    if (!(B > 0.0)) throw invalid_parameter("infimum_over_G: B must be > 0");
    // For fixed c1 the integrand is convex in c2 with unconstrained minimum at
    // sqrt(A C) = sqrt(lambda mu (1 - c1)).
    auto best_c2 = [&](double c1) { return std::max(B, std::sqrt(p.lambda * p.mu * (1.0 - c1))); };
    auto profile = [&](double c1) { return constant_path_rate(p, c1, best_c2(c1)); };
    auto logistic = [](double u) { return 1.0 / (1.0 + std::exp(-u)); };

    constexpr int n_scan = 20001;
    constexpr double u_lo = -18.0, u_hi = 18.0;
    int best = 0;
    double best_val = infinite_cost;
    for (int i = 0; i < n_scan; ++i) {
        const double v = profile(logistic(u_lo + (u_hi - u_lo) * i / (n_scan - 1.0)));
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double lo = logistic(u_lo + (u_hi - u_lo) * std::max(best - 1, 0) / (n_scan - 1.0));
    const double hi = logistic(u_lo + (u_hi - u_lo) * std::min(best + 1, n_scan - 1) / (n_scan - 1.0));
    const auto m = optimize::golden_section(profile, lo, hi, 1e-15);

    GInfimum g{};
    g.B = B;
    g.x_star = m.x;
    g.c2_star = best_c2(m.x);
    g.rate = m.value;
    g.I_star = p.T_horizon * m.value;
    g.c2_on_boundary = g.c2_star == B;
    g.rare = g.c2_on_boundary && g.I_star > 0.0;
    return g;
}

// ---------------------------------------------------------------------------
// Numerical probe of whether constant-x paths minimize I over all paths with
// y(T) >= B T. Searches piecewise-linear paths with n_knots equally spaced
// knots. The result is numerical evidence only.

struct ProbeOptions {
    std::size_t n_knots = 8;
    std::size_t n_starts = 8;
    std::uint64_t seed = 1;
    std::size_t sub_steps = 16;   // quadrature cells per knot interval
    bool constant_x = false;      // restrict the search to the G family
    unsigned threads = 1;
    std::size_t restarts = 4;     // Nelder-Mead restarts from the incumbent
    double jitter = 0.3;          // spread of random starts (logit units)
    optimize::NelderMeadOptions nelder_mead{};
};

struct ProbeStart {
    double value;
    std::size_t evaluations;
    bool converged;
};

struct ProbeReport {
    double B;
    std::size_t n_knots;
    bool constant_x;
    std::vector<double> knot_t;
    std::vector<double> best_x;
    std::vector<double> best_y;
    double best_I;
    GInfimum G;
    double gap;            // I over G minus best I found
    double relative_gap;
    bool relaxation_lowers_I;  // relative gap above 1e-4
    std::vector<ProbeStart> starts;
    std::string label = "numerical evidence only";
};

namespace detail {

struct ProbeFamily {
    const ModelParams* p;
    double B;
    std::size_t n_knots;
    std::size_t sub_steps;
    bool constant_x;

    std::size_t dimension() const { return constant_x ? 2 : 2 * n_knots - 1; }

    static double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
    static double logit(double x) { return std::log(x / (1.0 - x)); }

    // theta -> knot values. Layout: [u_0..u_{n-1}, beta_1..beta_{s-1}, sigma]
    // with x_j = logistic(u_j), emission shares softmax(0, beta) and total
    // emission B T + sigma^2. Constant family: [u, sigma].
    void knots(const std::vector<double>& theta, std::vector<double>& xs, std::vector<double>& ys) const {
        const std::size_t segs = n_knots - 1;
        const double T = p->T_horizon;
        xs.assign(n_knots, 0.0);
        ys.assign(n_knots, 0.0);
        const double sigma = theta.back();
        const double Y = B * T + sigma * sigma;
        if (constant_x) {
            for (std::size_t j = 0; j < n_knots; ++j) {
                xs[j] = logistic(theta[0]);
                ys[j] = Y * static_cast<double>(j) / static_cast<double>(segs);
            }
            return;
        }
        for (std::size_t j = 0; j < n_knots; ++j) xs[j] = logistic(theta[j]);
        double m = 0.0;
        for (std::size_t s = 1; s < segs; ++s) m = std::max(m, theta[n_knots + s - 1]);
        std::vector<double> w(segs);
        double wsum = 0.0;
        for (std::size_t s = 0; s < segs; ++s) {
            w[s] = std::exp((s == 0 ? 0.0 : theta[n_knots + s - 1]) - m);
            wsum += w[s];
        }
        for (std::size_t s = 0; s < segs; ++s) ys[s + 1] = ys[s] + Y * w[s] / wsum;
        ys[segs] = Y;
    }

    ScaledPath path(const std::vector<double>& xs, const std::vector<double>& ys) const {
        const std::size_t segs = n_knots - 1;
        ScaledPath out;
        out.t = uniform_grid(p->T_horizon, segs * sub_steps);
        out.x.resize(out.t.size());
        out.y.resize(out.t.size());
        for (std::size_t s = 0; s < segs; ++s) {
            for (std::size_t q = 0; q <= sub_steps; ++q) {
                const double f = static_cast<double>(q) / static_cast<double>(sub_steps);
                out.x[s * sub_steps + q] = xs[s] + f * (xs[s + 1] - xs[s]);
                out.y[s * sub_steps + q] = ys[s] + f * (ys[s + 1] - ys[s]);
            }
        }
        return out;
    }

    double operator()(const std::vector<double>& theta) const {
        std::vector<double> xs, ys;
        knots(theta, xs, ys);
        for (double x : xs)
            if (!(x > 0.0 && x < 1.0)) return infinite_cost;
        return rate_functional(*p, path(xs, ys));
    }

    std::vector<double> from_constant(double c1, double c2) const {
        const double sigma = std::sqrt(std::max(0.0, (c2 - B) * p->T_horizon));
        std::vector<double> theta(dimension(), 0.0);
        if (constant_x) {
            theta[0] = logit(c1);
        } else {
            for (std::size_t j = 0; j < n_knots; ++j) theta[j] = logit(c1);
        }
        theta.back() = sigma;
        return theta;
    }
};

}  // namespace detail

inline ProbeReport hypothesis_probe(const ModelParams& p, double B, const ProbeOptions& opt = {}) {
    validate(p);
    if (opt.n_knots < 2) throw invalid_parameter("hypothesis_probe: n_knots must be >= 2");
    if (opt.n_starts < 1) throw invalid_parameter("hypothesis_probe: n_starts must be >= 1");
    const GInfimum G = infimum_over_G(p, B);
    const detail::ProbeFamily family{&p, B, opt.n_knots, std::max<std::size_t>(opt.sub_steps, 1), opt.constant_x};
    const std::vector<double> anchor = family.from_constant(G.x_star, G.c2_star);

    struct Outcome {
        std::vector<double> theta;
        ProbeStart start;
    };
    std::vector<Outcome> outcomes(opt.n_starts);
    parallel_for(opt.n_starts, opt.threads, [&](std::size_t s) {
        std::vector<double> theta = anchor;
        if (s > 0) {
            // Start 0 is the constant-path optimum itself; the rest are jittered copies.
            Philox4x32 rng(opt.seed, s);
            for (auto& v : theta) {
                const double u1 = rng.uniform(), u2 = rng.uniform();
                v += opt.jitter * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
            }
            if (family(theta) == infinite_cost) theta = anchor;
        }
        optimize::NelderMeadResult r = optimize::nelder_mead(family, theta, opt.nelder_mead);
        std::size_t evals = r.evaluations;
        for (std::size_t k = 0; k < opt.restarts; ++k) {
            auto nm = opt.nelder_mead;
            nm.initial_step *= 0.5;
            const auto again = optimize::nelder_mead(family, r.x, nm);
            evals += again.evaluations;
            const bool improved = again.value < r.value - 1e-13 * std::max(1.0, std::abs(r.value));
            if (again.value <= r.value) r = again;
            if (!improved) break;
        }
        outcomes[s] = {r.x, {r.value, evals, r.converged}};
    });

    ProbeReport rep{};
    rep.B = B;
    rep.n_knots = opt.n_knots;
    rep.constant_x = opt.constant_x;
    rep.G = G;
    std::size_t best = 0;
    for (std::size_t s = 0; s < outcomes.size(); ++s) {
        rep.starts.push_back(outcomes[s].start);
        if (outcomes[s].start.value < outcomes[best].start.value) best = s;
    }
    family.knots(outcomes[best].theta, rep.best_x, rep.best_y);
    rep.knot_t = uniform_grid(p.T_horizon, opt.n_knots - 1);
    rep.best_I = outcomes[best].start.value;
    rep.gap = G.I_star - rep.best_I;
    rep.relative_gap = G.I_star > 0.0 ? rep.gap / G.I_star : 0.0;
    rep.relaxation_lowers_I = rep.relative_gap > 1e-4;
    return rep;
}

}  // namespace bhldp

#endif  // BHLDP_LARGE_DEVIATIONS_HPP
