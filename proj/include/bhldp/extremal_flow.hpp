#ifndef BHLDP_EXTREMAL_FLOW_HPP
#define BHLDP_EXTREMAL_FLOW_HPP

// Hamiltonian extremals of the rate functional and the stationary emission
// regime: constant x = x_B, y = B t, constant momenta with
//
//   A(x_B) e^k1 = C(x_B) e^(k2 - k1) = B,
//   B / (1 - x_B) - 2 mu / x_B^3 + lambda (2 x_B - 3 x_B^2) = 0.

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "bhldp/errors.hpp"
#include "bhldp/large_deviations.hpp"
#include "bhldp/ode.hpp"
#include "bhldp/params.hpp"
#include "bhldp/paths.hpp"
#include "bhldp/roots.hpp"

namespace bhldp {

struct ExtremalState {
    double x;
    double y;
    double kappa1;
    double kappa2;
};

inline ExtremalState extremal_rhs(const ModelParams& p, const ExtremalState& s) {
    detail::require_open_unit(s.x, "extremal_rhs");
    const double x = s.x;
    const double A = absorption_rate(p, x), C = emission_rate(p, x);
    // e^(k2 - k1) is formed from the difference so that large equal momenta do not overflow.
    const double ea_m1 = std::expm1(s.kappa1), eq_m1 = std::expm1(s.kappa2 - s.kappa1);
    const double absorb = A * (1.0 + ea_m1), emit = C * (1.0 + eq_m1);
    return {absorb - emit, emit,
            -p.lambda * (2.0 * x - 3.0 * x * x) * ea_m1 + 2.0 * p.mu / (x * x * x) * eq_m1, 0.0};
}

// Sum of the magnitudes of the four terms of H; the reference scale for
// relative drift of H, which may itself be zero.
inline double hamiltonian_scale(const ModelParams& p, const ExtremalState& s) {
    const double A = absorption_rate(p, s.x), C = emission_rate(p, s.x);
    return A * std::exp(s.kappa1) + C * std::exp(s.kappa2 - s.kappa1) + A + C;
}

struct ExtremalTrajectory {
    std::vector<double> t;
    std::vector<ExtremalState> states;
    std::vector<double> H;
    bool truncated = false;
    double exit_time = 0.0;
    std::string exit_reason;
    ode::Stats stats;

    // max |H(t) - H(0)| / hamiltonian_scale(s0)
    double relative_H_drift = 0.0;
    double kappa2_drift = 0.0;
};

struct ExtremalOptions {
    std::size_t n_out = 200;
    ode::Tolerance tol{};
};

inline ExtremalTrajectory integrate_extremal(const ModelParams& p, const ExtremalState& s0, double t_end,
                                             const ExtremalOptions& opt = {}) {
    validate(p);
    detail::require_open_unit(s0.x, "integrate_extremal");
    if (!(t_end > 0.0)) throw invalid_parameter("integrate_extremal: t_end must be > 0");
    const std::vector<double> grid = uniform_grid(t_end, opt.n_out);

    ExtremalTrajectory out;
    const double H0 = hamiltonian(p, {s0.x, s0.kappa1, s0.kappa2});
    const double scale = hamiltonian_scale(p, s0);
    auto rhs = [&p](const std::array<double, 4>& u, std::array<double, 4>& du) {
        if (!(u[0] > 0.0 && u[0] <= 1.0)) return false;
        const ExtremalState d = extremal_rhs(p, {u[0], u[1], u[2], u[3]});
        du = {d.x, d.y, d.kappa1, d.kappa2};
        for (double v : du)
            if (!std::isfinite(v)) return false;
        return true;
    };
    auto observe = [&](std::size_t, double t, const std::array<double, 4>& u) {
        const ExtremalState s{u[0], u[1], u[2], u[3]};
        const double H = hamiltonian(p, {s.x, s.kappa1, s.kappa2});
        out.t.push_back(t);
        out.states.push_back(s);
        out.H.push_back(H);
        out.relative_H_drift = std::max(out.relative_H_drift, std::abs(H - H0) / scale);
        out.kappa2_drift = std::max(out.kappa2_drift, std::abs(s.kappa2 - s0.kappa2));
        return true;
    };
    const auto res = ode::dopri5<4>(rhs, {s0.x, s0.y, s0.kappa1, s0.kappa2}, grid, opt.tol, observe);
    out.stats = res.stats;
    if (res.status == ode::Status::step_underflow || res.status == ode::Status::step_limit) {
        out.truncated = true;
        out.exit_time = res.t;
        std::ostringstream os;
        if (res.status == ode::Status::step_limit)
            os << "step budget exhausted at t = " << res.t << " (x = " << res.y[0] << ")";
        else
            os << "x left (0, 1] or the flow blew up near t = " << res.t << " (x = " << res.y[0] << ")";
        out.exit_reason = os.str();
    }
    return out;
}

// Solve for kappa1(0) so that the extremal started at (x0, 0, kappa1, kappa2)
// reaches x(T) = x_target; bisection over [k_lo, k_hi]. Boundary-value helper
// for fixed kappa2.
inline double shoot_kappa1(const ModelParams& p, double x0, double x_target, double kappa2, double t_end,
                           double k_lo, double k_hi, const ExtremalOptions& opt = {}) {
    auto miss = [&](double k1) {
        const auto tr = integrate_extremal(p, {x0, 0.0, k1, kappa2}, t_end, opt);
        if (tr.truncated) return tr.states.back().x - x_target < 0.0 ? -1.0 : 1.0;
        return tr.states.back().x - x_target;
    };
    return roots::bisect(miss, k_lo, k_hi);
}

// ---------------------------------------------------------------------------

struct RegimeResiduals {
    double absorption_balance;  // A e^k1 - B
    double emission_balance;    // C e^(k2-k1) - B
    double drift;               // A e^k1 - C e^(k2-k1), i.e. dx/dt on the regime
    double bracket;             // x [lambda x (1-x) e^k1 - mu/x^3 e^(k2-k1)]
    double momentum;            // lambda x^2 e^k1 - 2 mu/x^3 + lambda (2x - 3x^2)
    double regime_equation;     // B/(1-x) - 2 mu/x^3 + lambda (2x - 3x^2)
};

struct RegimeSolution {
    double B;
    double x_B;
    double kappa1;
    double kappa2;
    double I_rate;        // rate functional per unit time
    double asymptotic_x;  // (2 mu / B)^(1/3)
    RegimeResiduals residuals;

    ExtremalState state(double y = 0.0) const { return {x_B, y, kappa1, kappa2}; }
};

inline double regime_equation(const ModelParams& p, double B, double x) {
    return B / (1.0 - x) - 2.0 * p.mu / (x * x * x) + p.lambda * (2.0 * x - 3.0 * x * x);
}

inline constexpr std::size_t regime_scan_points = 10000;

inline std::vector<std::pair<double, double>> regime_brackets(const ModelParams& p, double B) {
    std::vector<double> grid(regime_scan_points);
    const double lo = 1e-6, hi = 1.0 - 1e-6;
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
    return roots::scan_brackets([&](double x) { return regime_equation(p, B, x); }, grid);
}

inline RegimeResiduals regime_residuals(const ModelParams& p, double B, double x, double k1, double k2) {
    const double A = absorption_rate(p, x), C = emission_rate(p, x);
    const double ea = std::exp(k1), eq = std::exp(k2 - k1);
    const double x3 = x * x * x;
    return {A * ea - B,
            C * eq - B,
            A * ea - C * eq,
            x * (p.lambda * x * (1.0 - x) * ea - p.mu / x3 * eq),
            p.lambda * x * x * ea - 2.0 * p.mu / x3 + p.lambda * (2.0 * x - 3.0 * x * x),
            regime_equation(p, B, x)};
}

inline double asymptotic_regime(const ModelParams& p, double B) {
    if (!(B > 0.0)) throw invalid_parameter("asymptotic_regime: B must be > 0");
    return std::cbrt(2.0 * p.mu / B);
}

// Physical-unit form cbrt(2 a2 a^2 b^4) / E * B^(-1/3); equal to the model form
// because mu = a2 a^2 b^4 / E^3.
inline long double asymptotic_regime(const PhysicalConstants& pc, const SystemScale& sc, double B) {
    if (!(B > 0.0)) throw invalid_parameter("asymptotic_regime: B must be > 0");
    validate(sc);
    const DerivedCoefficients d = derive_coefficients(pc);
    const long double b2 = d.b * d.b;
    return std::cbrt(2.0L * d.a2 * d.a * d.a * b2 * b2) / static_cast<long double>(sc.E_total) /
           std::cbrt(static_cast<long double>(B));
}

inline RegimeSolution solve_regime(const ModelParams& p, double B) {
    validate(p);
    if (!(B > 0.0)) throw invalid_parameter("solve_regime: B must be > 0");
    const auto brackets = regime_brackets(p, B);
    if (brackets.empty()) throw domain_error("solve_regime: no sign change of the regime equation on (0, 1)");
    if (brackets.size() > 1) {
        std::ostringstream os;
        os << "solve_regime: regime equation has " << brackets.size() << " sign changes for B = " << B << ":";
        for (const auto& [a, b] : brackets) os << " [" << a << ", " << b << "]";
        throw regime_ambiguity(brackets, os.str());
    }
    const double x = roots::bisect([&](double v) { return regime_equation(p, B, v); }, brackets[0].first,
                                   brackets[0].second);
    const double A = absorption_rate(p, x), C = emission_rate(p, x);
    const double k1 = std::log(B / A);
    const double k2 = k1 + std::log(B / C);
    RegimeSolution sol{};
    sol.B = B;
    sol.x_B = x;
    sol.kappa1 = k1;
    sol.kappa2 = k2;
    sol.I_rate = poisson_cost(B, A) + poisson_cost(B, C);
    sol.asymptotic_x = asymptotic_regime(p, B);
    sol.residuals = regime_residuals(p, B, x, k1, k2);
    return sol;
}

// Smallest B in the sweep from which every later B has a unique regime root.
// Returns a negative value when the last B is still ambiguous.
inline double observed_uniqueness_threshold(const ModelParams& p, const std::vector<double>& B_sweep) {
    double threshold = -1.0;
    for (double B : B_sweep) {
        if (regime_brackets(p, B).size() == 1) {
            if (threshold < 0.0) threshold = B;
        } else {
            threshold = -1.0;
        }
    }
    return threshold;
}

}  // namespace bhldp

#endif  // BHLDP_EXTREMAL_FLOW_HPP
