#ifndef BHLDP_JUMP_PROCESS_HPP
#define BHLDP_JUMP_PROCESS_HPP

// Exact event-driven simulation of the joint process (xi, eta): xi is the
// number of quanta in the hole, eta counts emissions. From state (k, m) the
// process jumps to (k+1, m) at the absorption rate or to (k-1, m+1) at the
// emission rate; emission is blocked at k = 1.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "bhldp/errors.hpp"
#include "bhldp/params.hpp"
#include "bhldp/paths.hpp"
#include "bhldp/rng.hpp"

namespace bhldp {

struct JumpState {
    std::int64_t k;  // quanta in the hole, 1 <= k <= N
    std::int64_t m;  // cumulative emissions

    friend bool operator==(const JumpState&, const JumpState&) = default;
};

enum class EventKind : std::uint8_t { absorption, emission };

struct JumpEvent {
    double time;
    EventKind kind;

    friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

struct JumpTrajectory {
    ModelParams params;
    JumpState initial;
    std::vector<JumpEvent> events;
    double T;
    std::uint64_t seed;
    std::uint64_t stream;

    std::int64_t absorptions() const {
        std::int64_t n = 0;
        for (const auto& e : events) n += e.kind == EventKind::absorption;
        return n;
    }
    std::int64_t emissions() const { return static_cast<std::int64_t>(events.size()) - absorptions(); }

    JumpState final_state() const {
        JumpState s = initial;
        for (const auto& e : events) apply(s, e.kind);
        return s;
    }

    static void apply(JumpState& s, EventKind kind) {
        if (kind == EventKind::absorption) {
            ++s.k;
        } else {
            --s.k;
            ++s.m;
        }
    }

    friend bool operator==(const JumpTrajectory&, const JumpTrajectory&) = default;
};

struct TransitionRates {
    double up;    // k -> k+1
    double down;  // k -> k-1, emission
    double total() const { return up + down; }
};

inline void check_state(const ModelParams& p, std::int64_t k) {
    if (k < 1 || k > p.N) {
        std::ostringstream os;
        os << "state k = " << k << " outside {1.." << p.N << "}";
        throw domain_error(os.str());
    }
}

inline TransitionRates transition_rates(const ModelParams& p, std::int64_t k) {
    check_state(p, k);
    const double n = static_cast<double>(p.N);
    const double x = static_cast<double>(k) / n;
    const double up = p.lambda * n * x * x * (1.0 - x);
    const double down = k == 1 ? 0.0 : p.mu * n / (x * x);
    return {up, down};
}

// Either a fixed starting k or xi(0) uniform on {1..N}; eta(0) = 0 always.
struct InitialCondition {
    std::optional<std::int64_t> k;

    static InitialCondition uniform() { return {}; }
    static InitialCondition fixed(std::int64_t k0) { return {k0}; }

    JumpState draw(const ModelParams& p, Philox4x32& rng) const {
        if (k) {
            check_state(p, *k);
            return {*k, 0};
        }
        auto k0 = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(p.N)) + 1;
        if (k0 > p.N) k0 = p.N;
        return {k0, 0};
    }
};

// Core event loop shared by the plain and the tilted simulators. `rates(k)`
// returns TransitionRates; `visitor.hold(k, dt)` is called for every holding
// interval (the last one truncated at T) and `visitor.jump(t, kind, state)`
// after every jump with the post-jump state.
template <class RateFn, class Visitor>
JumpState run_events(const ModelParams& p, JumpState s, Philox4x32& rng, RateFn&& rates, Visitor&& visitor) {
    const double T = p.T_horizon;
    double t = 0.0;
    while (true) {
        const TransitionRates r = rates(s.k);
        const double total = r.total();
        if (!(total > 0.0)) {
            // Cannot happen for N >= 2: k = 1 absorbs, k = N emits.
            std::ostringstream os;
            os << "zero total jump rate at k = " << s.k;
            throw std::logic_error(os.str());
        }
        const double dt = rng.exponential(total);
        if (t + dt > T) {
            visitor.hold(s.k, T - t);
            break;
        }
        visitor.hold(s.k, dt);
        t += dt;
        const EventKind kind = rng.uniform() * total < r.up ? EventKind::absorption : EventKind::emission;
        JumpTrajectory::apply(s, kind);
        visitor.jump(t, kind, s);
    }
    return s;
}

namespace detail {

struct NullVisitor {
    void hold(std::int64_t, double) {}
    void jump(double, EventKind, const JumpState&) {}
};

struct RecordingVisitor {
    std::vector<JumpEvent>* events;
    void hold(std::int64_t, double) {}
    void jump(double t, EventKind kind, const JumpState&) { events->push_back({t, kind}); }
};

}  // namespace detail

inline JumpTrajectory simulate(const ModelParams& p, const InitialCondition& init, std::uint64_t seed,
                               std::uint64_t stream = 0) {
    validate(p);
    Philox4x32 rng(seed, stream);
    const JumpState s0 = init.draw(p, rng);
    JumpTrajectory traj{p, s0, {}, p.T_horizon, seed, stream};
    run_events(p, s0, rng, [&p](std::int64_t k) { return transition_rates(p, k); },
               detail::RecordingVisitor{&traj.events});
    return traj;
}

// Right-continuous samples of (xi/N, eta/N) on the uniform grid of [0, T].
inline ScaledPath to_scaled_path(const JumpTrajectory& traj, std::size_t n_steps) {
    ScaledPath path;
    path.t = uniform_grid(traj.T, n_steps);
    path.x.reserve(path.t.size());
    path.y.reserve(path.t.size());
    const double n = static_cast<double>(traj.params.N);
    JumpState s = traj.initial;
    std::size_t next = 0;
    for (double t : path.t) {
        while (next < traj.events.size() && traj.events[next].time <= t) {
            JumpTrajectory::apply(s, traj.events[next].kind);
            ++next;
        }
        path.x.push_back(static_cast<double>(s.k) / n);
        path.y.push_back(static_cast<double>(s.m - traj.initial.m) / n);
    }
    return path;
}

}  // namespace bhldp

#endif  // BHLDP_JUMP_PROCESS_HPP
