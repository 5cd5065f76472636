#ifndef BHLDP_FLUID_LIMIT_HPP
#define BHLDP_FLUID_LIMIT_HPP

// Deterministic limit of the scaled process:
//   dx/dt = lambda x^2 (1 - x) - (mu / x^2) theta(x)
//   dy/dt = (mu / x^2) theta(x)
// with theta(0) = 0, plus the stationary hole sizes lambda x^4 (1 - x) = mu.

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bhldp/errors.hpp"
#include "bhldp/ode.hpp"
#include "bhldp/params.hpp"
#include "bhldp/paths.hpp"
#include "bhldp/roots.hpp"

namespace bhldp {

struct FluidState {
    double x;
    double y;
};

struct FluidVelocity {
    double dx;
    double dy;
};

inline FluidVelocity fluid_rhs(const ModelParams& p, const FluidState& s) {
    if (!(s.x >= 0.0 && s.x <= 1.0)) {
        std::ostringstream os;
        os << "fluid_rhs: x = " << s.x << " outside [0, 1]";
        throw domain_error(os.str());
    }
    const double absorb = p.lambda * s.x * s.x * (1.0 - s.x);
    const double emit = s.x > 0.0 ? p.mu / (s.x * s.x) : 0.0;
    return {absorb - emit, emit};
}

struct FluidOptions {
    std::size_t n_steps = 1000;
    ode::Tolerance tol{};
};

struct FluidSolution {
    ScaledPath path;
    ode::Stats stats;
};

// Solution on the uniform grid of [0, t_end].
inline FluidSolution integrate(const ModelParams& p, const FluidState& s0, double t_end,
                               const FluidOptions& opt = {}) {
    validate(p);
    if (!(s0.x >= 0.0 && s0.x <= 1.0) || !(s0.y >= 0.0)) throw domain_error("integrate: initial fluid state outside [0,1] x R+");
    if (!(opt.tol.rtol > 0.0 && opt.tol.atol > 0.0)) throw invalid_parameter("integrate: tolerances must be > 0");
    if (!(t_end > 0.0)) throw invalid_parameter("integrate: t_end must be > 0");

    FluidSolution sol;
    sol.path.t = uniform_grid(t_end, opt.n_steps);
    sol.path.x.reserve(sol.path.t.size());
    sol.path.y.reserve(sol.path.t.size());

    auto rhs = [&p](const std::array<double, 2>& u, std::array<double, 2>& du) {
        if (!(u[0] >= 0.0 && u[0] <= 1.0)) return false;
        const FluidVelocity v = fluid_rhs(p, {u[0], u[1]});
        du = {v.dx, v.dy};
        return true;
    };
    auto observe = [&sol](std::size_t, double, const std::array<double, 2>& u) {
        sol.path.x.push_back(u[0]);
        sol.path.y.push_back(u[1]);
        return true;
    };
    const auto res = ode::dopri5<2>(rhs, {s0.x, s0.y}, sol.path.t, opt.tol, observe);
    sol.stats = res.stats;
    if (res.status == ode::Status::step_underflow || res.status == ode::Status::step_limit) {
        std::ostringstream os;
        os << "fluid integration approached the x -> 0 singularity at t = " << res.t << " (x = " << res.y[0] << ")";
        throw singular_approach(res.t, os.str());
    }
    return sol;
}

enum class Stability { stable, unstable, degenerate };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::degenerate: return "degenerate";
    }
    return "?";
}

struct StationaryRoot {
    double x;
    Stability stability;
    double rhs_slope;  // d(dx/dt)/dx at the root
};

struct StationaryAnalysis {
    bool exists;
    std::vector<StationaryRoot> roots;
    double margin;  // 4^4/5^5 - mu/lambda
};

// max over x of x^4 (1 - x), attained at x = 4/5.
inline constexpr double existence_threshold = 256.0 / 3125.0;

inline double fluid_rhs_slope(const ModelParams& p, double x) {
    return p.lambda * (2.0 * x - 3.0 * x * x) + 2.0 * p.mu / (x * x * x);
}

inline StationaryAnalysis stationary_points(const ModelParams& p) {
    validate(p);
    const double ratio = p.mu / p.lambda;
    StationaryAnalysis out{false, {}, existence_threshold - ratio};
    const double tangency_tol = 4.0 * std::numeric_limits<double>::epsilon() * existence_threshold;
    if (std::abs(out.margin) <= tangency_tol) {
        out.exists = true;
        out.roots.push_back({0.8, Stability::degenerate, fluid_rhs_slope(p, 0.8)});
        return out;
    }
    if (out.margin < 0.0) return out;

    auto g = [ratio](double x) { return x * x * x * x * (1.0 - x) - ratio; };
    const double lower = roots::bisect(g, 0.0, 0.8);
    const double upper = roots::bisect(g, 0.8, 1.0);
    out.exists = true;
    for (double x : {lower, upper}) {
        const double slope = fluid_rhs_slope(p, x);
        out.roots.push_back({x, slope < 0.0 ? Stability::stable : Stability::unstable, slope});
    }
    return out;
}

}  // namespace bhldp

#endif  // BHLDP_FLUID_LIMIT_HPP
