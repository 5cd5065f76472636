#include <chrono>
#include <cstdio>
#include <ctime>
#include <functional>
#include <stdexcept>

#include "bhldp/extremal_flow.hpp"
#include "bhldp/fluid_limit.hpp"
#include "bhldp/io/cli.hpp"
#include "bhldp/io/output.hpp"
#include "bhldp/io/reports.hpp"
#include "bhldp/jump_process.hpp"
#include "bhldp/large_deviations.hpp"
#include "bhldp/rare_event.hpp"

namespace bhldp::io {

namespace {

using nlohmann::json;

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Error raised inside a module, tagged with the module name for the user.
struct module_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class F>
auto in_module(const char* module, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const module_failure&) {
        throw;
    } catch (const std::exception& e) {
        throw module_failure(std::string(module) + ": " + e.what());
    }
}

InitialCondition initial_for(const RunConfig& cfg, const ModelParams& p, double B, std::ostream& log) {
    if (cfg.initial == "uniform") return InitialCondition::uniform();
    if (cfg.initial != "auto") return InitialCondition::fixed(std::stoll(cfg.initial));
    if (B > 0.0) {
        try {
            return InitialCondition::fixed(regime_initial_k(p, solve_regime(p, B).x_B));
        } catch (const std::exception& e) {
            log << "initial: no usable regime for B = " << format_number(B) << " (" << e.what()
                << "); starting uniformly\n";
        }
    }
    return InitialCondition::uniform();
}

json initial_json(const InitialCondition& init) { return init.k ? json(*init.k) : json("uniform"); }

std::string numbered(const std::string& stem, std::size_t i, std::size_t count, const std::string& ext) {
    int width = 3;
    for (std::size_t c = count - 1; c >= 1000; c /= 10) ++width;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, i);
    return stem + buf + ext;
}

int cmd_simulate(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
    const ModelParams& p = cfg.model;
    const double B = cfg.B.empty() ? 0.0 : cfg.B.front();
    const InitialCondition init = initial_for(cfg, p, B, log);
    for (std::size_t i = 0; i < cfg.replicas; ++i) {
        const JumpTrajectory traj = in_module("jump_process", [&] { return simulate(p, init, *cfg.seed, i); });
        CsvWriter csv(out.file(numbered("traj_", i, cfg.replicas, ".csv")), {"t", "k", "m"});
        JumpState s = traj.initial;
        csv.cell(0.0).cell(static_cast<long long>(s.k)).cell(static_cast<long long>(s.m)).end_row();
        for (const auto& e : traj.events) {
            JumpTrajectory::apply(s, e.kind);
            csv.cell(e.time).cell(static_cast<long long>(s.k)).cell(static_cast<long long>(s.m)).end_row();
        }
        csv.cell(traj.T).cell(static_cast<long long>(s.k)).cell(static_cast<long long>(s.m)).end_row();
        write_json(out.file(numbered("traj_", i, cfg.replicas, ".json")),
                   {{"params", report(p)},
                    {"seed", traj.seed},
                    {"stream", traj.stream},
                    {"initial_condition", initial_json(init)},
                    {"initial", {{"k", traj.initial.k}, {"m", traj.initial.m}}},
                    {"final", {{"k", s.k}, {"m", s.m}}},
                    {"absorptions", traj.absorptions()},
                    {"emissions", traj.emissions()},
                    {"events", traj.events.size()},
                    {"columns", "t: event time; k: quanta in the hole; m: emissions so far"}});
    }
    return exit_ok;
}

int cmd_fluid(const RunConfig& cfg, OutputSet& out, std::ostream&) {
    const ModelParams& p = cfg.model;
    const StationaryAnalysis st = in_module("fluid_limit", [&] { return stationary_points(p); });
    double x0 = 1.0;
    if (cfg.x0) {
        x0 = *cfg.x0;
    } else if (st.exists) {
        x0 = st.roots.back().x;
    }
    FluidOptions opt;
    opt.n_steps = cfg.n_steps;
    opt.tol = {cfg.rtol, cfg.atol};
    const FluidSolution sol = in_module("fluid_limit", [&] { return integrate(p, {x0, 0.0}, p.T_horizon, opt); });
    CsvWriter csv(out.file("fluid.csv"), {"t", "x", "y"});
    for (std::size_t i = 0; i < sol.path.t.size(); ++i) csv.cell(sol.path.t[i]).cell(sol.path.x[i]).cell(sol.path.y[i]).end_row();
    write_json(out.file("fluid.json"), {{"params", report(p)},
                                        {"x0", x0},
                                        {"n_steps", cfg.n_steps},
                                        {"tolerance", {{"rtol", cfg.rtol}, {"atol", cfg.atol}}},
                                        {"stats", report(sol.stats)},
                                        {"final", {{"x", sol.path.x.back()}, {"y", sol.path.y.back()}}}});
    return exit_ok;
}

int cmd_stationary(const RunConfig& cfg, OutputSet& out, std::ostream&) {
    const StationaryAnalysis st = in_module("fluid_limit", [&] { return stationary_points(cfg.model); });
    write_json(out.file("stationary.json"), {{"params", report(cfg.model)}, {"stationary", report(st)}});
    return exit_ok;
}

int cmd_regime(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
    const ModelParams& p = cfg.model;
    json regimes = json::array();
    int status = exit_ok;
    CsvWriter csv(out.file("regime.csv"), {"B", "x_B", "asymptotic_x", "ratio"});
    for (double B : cfg.B) {
        try {
            const RegimeSolution r = solve_regime(p, B);
            regimes.push_back(report(r));
            csv.cell(B).cell(r.x_B).cell(r.asymptotic_x).cell(r.x_B / r.asymptotic_x).end_row();
        } catch (const regime_ambiguity& e) {
            json brackets = json::array();
            for (const auto& [a, b] : e.brackets()) brackets.push_back({a, b});
            regimes.push_back({{"B", B}, {"error", e.what()}, {"brackets", brackets}});
            log << "extremal_flow: " << e.what() << '\n';
            status = exit_failure;
        } catch (const std::exception& e) {
            regimes.push_back({{"B", B}, {"error", e.what()}});
            log << "extremal_flow: " << e.what() << '\n';
            status = exit_failure;
        }
    }
    write_json(out.file("regime.json"), {{"params", report(p)}, {"regimes", regimes}});
    return status;
}

int cmd_infimum(const RunConfig& cfg, OutputSet& out, std::ostream&) {
    const ModelParams& p = cfg.model;
    json results = json::array();
    CsvWriter csv(out.file("infimum_curve.csv"), {"B", "c1", "c2", "rate"});
    constexpr int n = 200;
    for (double B : cfg.B) {
        const GInfimum g = in_module("large_deviations", [&] { return infimum_over_G(p, B); });
        results.push_back(report(g));
        for (int j = 1; j < n; ++j) {
            const double c1 = static_cast<double>(j) / n;
            const double c2 = std::max(B, std::sqrt(p.lambda * p.mu * (1.0 - c1)));
            csv.cell(B).cell(c1).cell(c2).cell(constant_path_rate(p, c1, c2) / p.T_horizon).end_row();
        }
    }
    write_json(out.file("infimum.json"),
               {{"params", report(p)},
                {"infimum_over_G", results},
                {"curve_columns", "rate is the integrand per unit time of the constant path (c1, c2 t); I = T * rate"}});
    return exit_ok;
}

int cmd_probe(const RunConfig& cfg, OutputSet& out, std::ostream&) {
    ProbeOptions opt;
    opt.n_knots = cfg.knots;
    opt.n_starts = cfg.starts;
    opt.sub_steps = cfg.sub_steps;
    opt.seed = *cfg.seed;
    opt.threads = cfg.threads;
    json probes = json::array();
    for (double B : cfg.B)
        probes.push_back(report(in_module("large_deviations", [&] { return hypothesis_probe(cfg.model, B, opt); })));
    write_json(out.file("probe.json"), {{"params", report(cfg.model)}, {"probes", probes}});
    return exit_ok;
}

int cmd_estimate(const RunConfig& cfg, OutputSet& out, std::ostream& log, bool tilted) {
    const ModelParams& p = cfg.model;
    json reports = json::array();
    for (std::size_t b = 0; b < cfg.B.size(); ++b) {
        const double B = cfg.B[b];
        const InitialCondition init = initial_for(cfg, p, B, log);
        std::vector<ReplicaOutcome> replicas;
        EstimatorOptions eo;
        eo.threads = cfg.threads;
        if (cfg.dump_replicas) eo.replicas = &replicas;
        const EstimatorReport r = in_module("rare_event", [&] {
            return tilted ? tilted_estimate(p, B, cfg.replicas, *cfg.seed, init, eo)
                          : naive_estimate(p, B, cfg.replicas, *cfg.seed, init, eo);
        });
        if (r.ess_warning) {
            log << "rare_event: effective sample size " << format_number(r.ess) << " < 10 at B = " << format_number(B)
                << "; weights are degenerate\n";
        }
        reports.push_back(report(r));
        if (cfg.dump_replicas) {
            CsvWriter csv(out.file(numbered("replicas_B", b, cfg.B.size(), ".csv")),
                          {"replica", "hit", "log_weight", "emissions", "final_k"});
            for (std::size_t i = 0; i < replicas.size(); ++i) {
                const auto& o = replicas[i];
                csv.cell(static_cast<long long>(i)).cell(static_cast<long long>(o.hit)).cell(o.log_weight)
                    .cell(static_cast<long long>(o.emissions)).cell(static_cast<long long>(o.final_k)).end_row();
            }
        }
    }
    write_json(out.file(tilted ? "tilted.json" : "naive.json"), {{"params", report(p)}, {"estimates", reports}});
    return exit_ok;
}

int cmd_slope(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
    SlopeOptions opt;
    opt.threads = cfg.threads;
    opt.tolerance = cfg.tolerance;
    if (cfg.probe) {
        ProbeOptions po;
        po.n_knots = cfg.knots;
        po.n_starts = cfg.starts;
        po.sub_steps = cfg.sub_steps;
        po.seed = *cfg.seed;
        po.threads = cfg.threads;
        opt.probe = po;
    }
    const SlopeReport r = in_module("rare_event", [&] {
        return ldp_slope_check(cfg.model, cfg.B.front(), cfg.N_list, cfg.replicas, *cfg.seed, opt);
    });
    CsvWriter csv(out.file("slope.csv"), {"N", "neg_log_p", "sigma", "ess"});
    for (const auto& pt : r.points)
        csv.cell(static_cast<long long>(pt.N)).cell(pt.neg_log_p).cell(pt.sigma).cell(pt.report.ess).end_row();
    write_json(out.file("slope.json"), {{"params", report(cfg.model)}, {"slope", report(r)}});
    if (!r.fitted) {
        log << "rare_event: slope fit not made: " << r.diagnostic << '\n';
        return exit_failure;
    }
    return exit_ok;
}

int dispatch(const RunConfig& cfg, OutputSet& out, std::ostream& log) {
    const std::string& c = cfg.command;
    if (c == "simulate") return cmd_simulate(cfg, out, log);
    if (c == "analyze fluid") return cmd_fluid(cfg, out, log);
    if (c == "analyze stationary") return cmd_stationary(cfg, out, log);
    if (c == "analyze regime") return cmd_regime(cfg, out, log);
    if (c == "analyze infimum") return cmd_infimum(cfg, out, log);
    if (c == "analyze probe") return cmd_probe(cfg, out, log);
    if (c == "rare naive") return cmd_estimate(cfg, out, log, false);
    if (c == "rare tilted") return cmd_estimate(cfg, out, log, true);
    if (c == "rare slope") return cmd_slope(cfg, out, log);
    throw config_error("unknown command '" + c + "'");
}

}  // namespace

RunResult execute(const RunConfig& cfg, const std::filesystem::path& dir, const std::vector<std::string>& argv,
                  std::ostream& log) {
    if (!cfg.seed) throw std::logic_error("execute: seed must be resolved before running");
    OutputSet out(dir);
    const std::string started = utc_now();
    RunResult result;
    std::string error;
    try {
        result.status = dispatch(cfg, out, log);
    } catch (const module_failure& e) {
        error = e.what();
        result.status = exit_failure;
    } catch (const std::ios_base::failure& e) {
        error = std::string("I/O: ") + e.what();
        result.status = exit_failure;
    }
    if (!error.empty()) log << error << '\n';
    result.digests = out.digests();

    json manifest = {{"tool", tool_name},
                     {"version", tool_version},
                     {"argv", argv},
                     {"config", to_json(cfg)},
                     {"seeds", {{"base", *cfg.seed}, {"generated", cfg.seed_generated}}},
                     {"started", started},
                     {"finished", utc_now()},
                     {"status", result.status},
                     {"error", error.empty() ? json(nullptr) : json(error)},
                     {"outputs", result.digests}};
    write_json(dir / "manifest.json", manifest);
    return result;
}

}  // namespace bhldp::io
