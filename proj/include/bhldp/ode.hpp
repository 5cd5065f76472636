#ifndef BHLDP_ODE_HPP
#define BHLDP_ODE_HPP

// Adaptive Dormand-Prince 5(4) integrator with output at prescribed times.
// Steps are clipped so that every output time is hit exactly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace bhldp::ode {

struct Tolerance {
    double rtol = 1e-9;
    double atol = 1e-12;
    std::size_t max_steps = 1'000'000;  // accepted plus rejected
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t domain_rejections = 0;  // stage evaluated outside the rhs domain
};

enum class Status { completed, step_underflow, step_limit, stopped };

template <std::size_t D>
struct Result {
    Status status;
    double t;                  // last time reached
    std::array<double, D> y;   // state at t
    Stats stats;
};

namespace detail {

template <std::size_t D>
std::array<double, D> axpy(const std::array<double, D>& y, double h, std::initializer_list<double> coeffs,
                           std::initializer_list<const std::array<double, D>*> ks) {
    std::array<double, D> out = y;
    auto c = coeffs.begin();
    for (const auto* k : ks) {
        const double w = h * *c++;
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < D; ++i) out[i] += w * (*k)[i];
    }
    return out;
}

}  // namespace detail

// `rhs(y, dydt)` returns false when y lies outside its domain; the step is then
// rejected and shrunk. `observer(index, t, y)` is called at each output time and
// may return false to stop the integration.
template <std::size_t D, class Rhs, class Observer>
Result<D> dopri5(Rhs&& rhs, std::array<double, D> y, std::span<const double> t_out, const Tolerance& tol,
                 Observer&& observer) {
    using State = std::array<double, D>;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    Stats stats;
    if (t_out.empty()) return {Status::completed, 0.0, y, stats};
    double t = t_out.front();
    State k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{};
    if (!rhs(y, k1)) return {Status::step_underflow, t, y, stats};
    if (!observer(std::size_t{0}, t, y)) return {Status::stopped, t, y, stats};

    const double span = t_out.back() - t;
    double h = span > 0 ? std::min(1e-3 * span, 1e-3) : 0.0;

    for (std::size_t idx = 1; idx < t_out.size(); ++idx) {
        const double target = t_out[idx];
        while (t < target) {
            double h_try = h;
            bool last = false;
            if (t + h_try >= target || target - (t + h_try) < 1e-12 * std::max(1.0, std::abs(target))) {
                h_try = target - t;
                last = true;
            }
            const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
            if (h_try < h_min) return {Status::step_underflow, t, y, stats};
            if (stats.accepted + stats.rejected >= tol.max_steps) return {Status::step_limit, t, y, stats};

            bool ok = rhs(detail::axpy<D>(y, h_try, {a21}, {&k1}), k2) &&
                      rhs(detail::axpy<D>(y, h_try, {a31, a32}, {&k1, &k2}), k3) &&
                      rhs(detail::axpy<D>(y, h_try, {a41, a42, a43}, {&k1, &k2, &k3}), k4) &&
                      rhs(detail::axpy<D>(y, h_try, {a51, a52, a53, a54}, {&k1, &k2, &k3, &k4}), k5) &&
                      rhs(detail::axpy<D>(y, h_try, {a61, a62, a63, a64, a65}, {&k1, &k2, &k3, &k4, &k5}), k6);
            State y_new{};
            if (ok) {
                y_new = detail::axpy<D>(y, h_try, {b1, 0.0, b3, b4, b5, b6}, {&k1, &k2, &k3, &k4, &k5, &k6});
                ok = rhs(y_new, k7);
            }
            if (!ok) {
                ++stats.domain_rejections;
                ++stats.rejected;
                h = 0.25 * h_try;
                continue;
            }
            double err = 0.0;
            for (std::size_t i = 0; i < D; ++i) {
                const double e =
                    h_try * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                const double sc = tol.atol + tol.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(err / static_cast<double>(D));
            if (!std::isfinite(err)) {
                ++stats.rejected;
                h = 0.25 * h_try;
                continue;
            }
            if (err <= 1.0) {
                ++stats.accepted;
                t = last ? target : t + h_try;
                y = y_new;
                k1 = k7;
                const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                // A step clipped to an output time says nothing about the
                // admissible step size, so it may only grow h.
                h = last ? std::max(h, h_try * fac) : h_try * fac;
            } else {
                ++stats.rejected;
                h = h_try * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
            }
        }
        if (!observer(idx, t, y)) return {Status::stopped, t, y, stats};
    }
    return {Status::completed, t, y, stats};
}

}  // namespace bhldp::ode

#endif  // BHLDP_ODE_HPP
