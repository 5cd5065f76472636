#ifndef BHLDP_RARE_EVENT_HPP
#define BHLDP_RARE_EVENT_HPP

// Estimators of P(eta_N(T) >= B T): crude Monte Carlo and importance sampling
// under the exponential tilt with constant multipliers (kappa1, kappa2).
// The tilted process absorbs at rate up * e^k1 and emits at down * e^(k2-k1);
// the likelihood ratio dP/dQ of a path is
//
//   exp( -k1 #absorptions - (k2 - k1) #emissions + int_0^T [total_Q - total_P](xi) dt ),
//
// and total_Q - total_P = N H(xi/N, k1, k2) away from k = 1, where the
// blocked emission drops out of both measures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bhldp/errors.hpp"
#include "bhldp/extremal_flow.hpp"
#include "bhldp/jump_process.hpp"
#include "bhldp/large_deviations.hpp"
#include "bhldp/parallel.hpp"
#include "bhldp/params.hpp"
#include "bhldp/rng.hpp"

namespace bhldp {

struct Tilt {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
};

inline TransitionRates tilted_rates(const ModelParams& p, const Tilt& tilt, std::int64_t k) {
    const TransitionRates r = transition_rates(p, k);
    return {r.up * std::exp(tilt.kappa1), r.down * std::exp(tilt.kappa2 - tilt.kappa1)};
}

// Accumulates log dP/dQ along a path simulated under the tilt.
class LikelihoodAccumulator {
public:
    LikelihoodAccumulator(const ModelParams& p, const Tilt& tilt)
        : p_(&p),
          up_excess_(std::expm1(tilt.kappa1)),
          down_excess_(std::expm1(tilt.kappa2 - tilt.kappa1)),
          absorption_log_(-tilt.kappa1),
          emission_log_(-(tilt.kappa2 - tilt.kappa1)) {}

    void hold(std::int64_t k, double dt) {
        const TransitionRates r = transition_rates(*p_, k);
        log_ratio_ += dt * (r.up * up_excess_ + r.down * down_excess_);
    }

    void jump(EventKind kind) { log_ratio_ += kind == EventKind::absorption ? absorption_log_ : emission_log_; }

    double log_ratio() const { return log_ratio_; }

private:
    const ModelParams* p_;
    double up_excess_;
    double down_excess_;
    double absorption_log_;
    double emission_log_;
    double log_ratio_ = 0.0;
};

// log dP/dQ of a recorded trajectory, replayed through the same accumulator
// the estimator uses.
inline double log_likelihood_ratio(const ModelParams& p, const Tilt& tilt, const JumpTrajectory& traj) {
    LikelihoodAccumulator acc(p, tilt);
    JumpState s = traj.initial;
    double t = 0.0;
    for (const auto& e : traj.events) {
        acc.hold(s.k, e.time - t);
        acc.jump(e.kind);
        JumpTrajectory::apply(s, e.kind);
        t = e.time;
    }
    acc.hold(s.k, traj.T - t);
    return acc.log_ratio();
}

// Simulates under the tilt and records the trajectory (used to check weights).
inline JumpTrajectory simulate_tilted(const ModelParams& p, const Tilt& tilt, const InitialCondition& init,
                                      std::uint64_t seed, std::uint64_t stream = 0) {
    validate(p);
    Philox4x32 rng(seed, stream);
    const JumpState s0 = init.draw(p, rng);
    JumpTrajectory traj{p, s0, {}, p.T_horizon, seed, stream};
    run_events(p, s0, rng, [&](std::int64_t k) { return tilted_rates(p, tilt, k); },
               detail::RecordingVisitor{&traj.events});
    return traj;
}

struct ReplicaOutcome {
    bool hit;
    double log_weight;        // log dP/dQ, 0 for crude sampling
    std::int64_t emissions;
    std::int64_t final_k;
    double mean_fraction;     // time average of xi/N over [0, T]
};

inline bool emission_event(const ModelParams& p, double B, std::int64_t emissions) {
    return static_cast<double>(emissions) >= B * p.T_horizon * static_cast<double>(p.N);
}

inline ReplicaOutcome run_replica(const ModelParams& p, double B, const Tilt& tilt, const InitialCondition& init,
                                  std::uint64_t seed, std::uint64_t stream) {
    Philox4x32 rng(seed, stream);
    const JumpState s0 = init.draw(p, rng);
    struct Visitor {
        LikelihoodAccumulator acc;
        double k_time = 0.0;
        void hold(std::int64_t k, double dt) {
            acc.hold(k, dt);
            k_time += static_cast<double>(k) * dt;
        }
        void jump(double, EventKind kind, const JumpState&) { acc.jump(kind); }
    } visitor{LikelihoodAccumulator(p, tilt)};
    const JumpState end = run_events(p, s0, rng, [&](std::int64_t k) { return tilted_rates(p, tilt, k); }, visitor);
    const double n = static_cast<double>(p.N);
    return {emission_event(p, B, end.m), visitor.acc.log_ratio(), end.m, end.k,
            visitor.k_time / (n * p.T_horizon)};
}

enum class EstimatorMethod { naive, tilted };

inline const char* to_string(EstimatorMethod m) { return m == EstimatorMethod::naive ? "naive" : "tilted"; }

struct EstimatorReport {
    EstimatorMethod method;
    std::int64_t N;
    double B;
    double T;
    std::size_t n_replicas;
    std::uint64_t seed;
    std::optional<std::int64_t> initial_k;  // empty: uniform start
    Tilt tilt;

    std::size_t hits = 0;
    double estimate = 0.0;
    double log_estimate = -std::numeric_limits<double>::infinity();
    double log_per_quantum = std::numeric_limits<double>::infinity();  // -(1/N) ln p
    double std_error = 0.0;
    double relative_error = std::numeric_limits<double>::infinity();
    std::optional<double> upper_bound_95;  // one-sided bound when no replica hit
    double ess = 0.0;
    bool ess_warning = false;

    // Sample means under the sampling measure.
    double mean_emission_rate = 0.0;  // eta_N(T) / T
    double mean_fraction = 0.0;       // time-averaged xi_N
};

struct EstimatorOptions {
    unsigned threads = 1;
    std::vector<ReplicaOutcome>* replicas = nullptr;  // per-replica dump, optional
};

namespace detail {

inline EstimatorReport estimate(const ModelParams& p, double B, const Tilt& tilt, EstimatorMethod method,
                                std::size_t n_replicas, std::uint64_t seed, const InitialCondition& init,
                                const EstimatorOptions& opt) {
    validate(p);
    if (n_replicas < 1) throw invalid_parameter("n_replicas must be >= 1");
    if (!(B >= 0.0)) throw invalid_parameter("B must be >= 0");
    std::vector<ReplicaOutcome> out(n_replicas);
    parallel_for(n_replicas, opt.threads, [&](std::size_t i) { out[i] = run_replica(p, B, tilt, init, seed, i); });

    EstimatorReport rep{};
    rep.method = method;
    rep.N = p.N;
    rep.B = B;
    rep.T = p.T_horizon;
    rep.n_replicas = n_replicas;
    rep.seed = seed;
    rep.initial_k = init.k;
    rep.tilt = tilt;
    const double n = static_cast<double>(n_replicas);
    double max_lw = -std::numeric_limits<double>::infinity();
    for (const auto& r : out) {
        rep.mean_emission_rate += static_cast<double>(r.emissions) / (static_cast<double>(p.N) * p.T_horizon) / n;
        rep.mean_fraction += r.mean_fraction / n;
        if (r.hit) {
            ++rep.hits;
            max_lw = std::max(max_lw, r.log_weight);
        }
    }
    if (rep.hits == 0) {
        rep.upper_bound_95 = 1.0 - std::pow(0.05, 1.0 / n);
    } else {
        double s1 = 0.0, s2 = 0.0;
        for (const auto& r : out) {
            if (!r.hit) continue;
            const double w = std::exp(r.log_weight - max_lw);
            s1 += w;
            s2 += w * w;
        }
        rep.log_estimate = max_lw + std::log(s1) - std::log(n);
        rep.estimate = std::exp(rep.log_estimate);
        rep.log_per_quantum = -rep.log_estimate / static_cast<double>(p.N);
        rep.ess = s1 * s1 / s2;
        if (method == EstimatorMethod::naive) {
            const double ph = rep.estimate;
            rep.std_error = std::sqrt(ph * (1.0 - ph) / n);
            rep.relative_error = rep.std_error / ph;
        } else {
            // Sample variance of W 1{hit}, scaled by exp(max_lw).
            const double m1 = s1 / n, m2 = s2 / n;
            const double var_scaled = n > 1 ? std::max(0.0, (m2 - m1 * m1) * n / (n - 1.0)) : 0.0;
            rep.relative_error = std::sqrt(var_scaled / n) / m1;
            rep.std_error = rep.relative_error * rep.estimate;
        }
    }
    rep.ess_warning = method == EstimatorMethod::tilted && rep.ess < 10.0;
    if (opt.replicas) *opt.replicas = std::move(out);
    return rep;
}

}  // namespace detail

inline EstimatorReport naive_estimate(const ModelParams& p, double B, std::size_t n_replicas, std::uint64_t seed,
                                      const InitialCondition& init, const EstimatorOptions& opt = {}) {
    return detail::estimate(p, B, Tilt{}, EstimatorMethod::naive, n_replicas, seed, init, opt);
}

inline EstimatorReport tilted_estimate(const ModelParams& p, double B, const Tilt& tilt, std::size_t n_replicas,
                                       std::uint64_t seed, const InitialCondition& init,
                                       const EstimatorOptions& opt = {}) {
    return detail::estimate(p, B, tilt, EstimatorMethod::tilted, n_replicas, seed, init, opt);
}

// Tilt from the stationary emission regime for (p, B).
inline Tilt regime_tilt(const RegimeSolution& r) { return {r.kappa1, r.kappa2}; }

inline EstimatorReport tilted_estimate(const ModelParams& p, double B, std::size_t n_replicas, std::uint64_t seed,
                                       const InitialCondition& init, const EstimatorOptions& opt = {}) {
    return tilted_estimate(p, B, regime_tilt(solve_regime(p, B)), n_replicas, seed, init, opt);
}

// xi(0) used for slope studies: nearest integer to N x_B, clipped to {1..N}.
inline std::int64_t regime_initial_k(const ModelParams& p, double x_B) {
    return std::clamp<std::int64_t>(std::llround(static_cast<double>(p.N) * x_B), 1, p.N);
}

// ---------------------------------------------------------------------------

struct SlopePoint {
    std::int64_t N;
    double neg_log_p;
    double sigma;  // standard error of -ln p (delta method)
    EstimatorReport report;
};

struct SlopeReport {
    double B;
    double T;
    std::vector<SlopePoint> points;
    RegimeSolution regime;
    GInfimum G;

    bool fitted = false;
    std::string diagnostic;  // reason when no fit was made
    double slope = 0.0;
    double intercept = 0.0;  // sub-exponential prefactor; not assessed
    double slope_se = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;

    double relative_deviation = 0.0;  // slope / inf_G - 1
    bool within_upper_bound = false;  // slope <= inf_G (1 + tolerance)
    bool agrees = false;              // |slope / inf_G - 1| <= tolerance
    double tolerance = 0.15;

    std::optional<ProbeReport> probe;
};

struct SlopeOptions {
    unsigned threads = 1;
    double tolerance = 0.15;
    std::optional<ProbeOptions> probe;  // run the hypothesis probe alongside
};

// Seed used for the estimator at a given N: a SplitMix64 step of seed + N so
// each N gets unrelated streams.
inline std::uint64_t seed_for_size(std::uint64_t seed, std::int64_t N) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(N);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline SlopeReport ldp_slope_check(const ModelParams& base, double B, const std::vector<std::int64_t>& N_list,
                                   std::size_t n_replicas, std::uint64_t seed, const SlopeOptions& opt = {}) {
    if (N_list.size() < 3) throw invalid_parameter("ldp_slope_check: need at least 3 values of N");
    validate(base);
    SlopeReport rep{};
    rep.B = B;
    rep.T = base.T_horizon;
    rep.tolerance = opt.tolerance;
    rep.regime = solve_regime(base, B);
    rep.G = infimum_over_G(base, B);
    const Tilt tilt = regime_tilt(rep.regime);

    for (std::int64_t N : N_list) {
        ModelParams p = base;
        p.N = N;
        validate(p);
        const auto init = InitialCondition::fixed(regime_initial_k(p, rep.regime.x_B));
        EstimatorOptions eo;
        eo.threads = opt.threads;
        EstimatorReport r = tilted_estimate(p, B, tilt, n_replicas, seed_for_size(seed, N), init, eo);
        rep.points.push_back({N, -r.log_estimate, r.relative_error, r});
    }
    if (opt.probe) rep.probe = hypothesis_probe(base, B, *opt.probe);

    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const auto& pt = rep.points[i];
        if (!std::isfinite(pt.neg_log_p) || !std::isfinite(pt.sigma)) {
            rep.diagnostic = "non-finite estimate at N = " + std::to_string(pt.N);
            return rep;
        }
        if (i > 0 && pt.neg_log_p <= rep.points[i - 1].neg_log_p) {
            rep.diagnostic = "-ln p is not increasing in N at N = " + std::to_string(pt.N);
            return rep;
        }
    }

    // Weighted least squares of -ln p on N with weights 1 / sigma^2.
    const bool weighted = std::all_of(rep.points.begin(), rep.points.end(), [](const SlopePoint& q) { return q.sigma > 0.0; });
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& q : rep.points) {
        const double w = weighted ? 1.0 / (q.sigma * q.sigma) : 1.0;
        sw += w;
        sx += w * static_cast<double>(q.N);
        sy += w * q.neg_log_p;
    }
    const double xbar = sx / sw, ybar = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& q : rep.points) {
        const double w = weighted ? 1.0 / (q.sigma * q.sigma) : 1.0;
        const double dx = static_cast<double>(q.N) - xbar;
        sxx += w * dx * dx;
        sxy += w * dx * (q.neg_log_p - ybar);
    }
    rep.fitted = true;
    rep.slope = sxy / sxx;
    rep.intercept = ybar - rep.slope * xbar;
    rep.slope_se = weighted ? std::sqrt(1.0 / sxx) : 0.0;
    rep.ci_low = rep.slope - 1.96 * rep.slope_se;
    rep.ci_high = rep.slope + 1.96 * rep.slope_se;
    rep.relative_deviation = rep.slope / rep.G.I_star - 1.0;
    rep.within_upper_bound = rep.slope <= rep.G.I_star * (1.0 + opt.tolerance);
    rep.agrees = std::abs(rep.relative_deviation) <= opt.tolerance;
    return rep;
}

}  // namespace bhldp

#endif  // BHLDP_RARE_EVENT_HPP
