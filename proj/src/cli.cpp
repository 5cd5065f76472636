#include "bhldp/io/cli.hpp"

#include <random>

#include "CLI11.hpp"
#include "bhldp/errors.hpp"
#include "bhldp/io/output.hpp"

namespace bhldp::io {

namespace {

struct Options {
    std::string config;
    std::string out = "out";
    std::string model;
    std::string physical;
    std::string manifest;
    RawSection run;  // flag overrides, applied after the config file
};

// Registers a string option that lands in the [run] overrides under `key`.
void run_option(CLI::App& app, Options& o, const std::string& flag, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(flag, [&o, key](const std::string& v) { o.run[key] = v; }, help);
}

int replay(const Options& o, unsigned threads_override, bool threads_given, std::ostream& out, std::ostream& err) {
    const nlohmann::json manifest = read_json(o.manifest);
    RunConfig cfg = config_from_json(manifest.at("config"));
    if (threads_given) cfg.threads = threads_override;
    const auto expected = manifest.at("outputs").get<std::map<std::string, std::string>>();
    const std::vector<std::string> argv = manifest.at("argv").get<std::vector<std::string>>();
    const RunResult r = execute(cfg, o.out, argv, err);

    std::size_t mismatches = 0;
    for (const auto& [name, digest] : expected) {
        const auto it = r.digests.find(name);
        if (it == r.digests.end()) {
            err << "replay: " << name << " was not produced\n";
            ++mismatches;
        } else if (it->second != digest) {
            err << "replay: " << name << " differs (" << it->second << " != " << digest << ")\n";
            ++mismatches;
        }
    }
    for (const auto& [name, digest] : r.digests)
        if (!expected.count(name)) {
            err << "replay: extra output " << name << '\n';
            ++mismatches;
        }
    if (mismatches) return exit_failure;
    out << "replay: " << expected.size() << " outputs identical\n";
    return r.status;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic black-hole emission model: simulation, large deviations, rare events", tool_name};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    Options o;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    app.add_option("--config", o.config, "INI file with [model] or [physical], and [run]");
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "base seed (generated and recorded when absent)");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads (results do not depend on it)")
                            ->check(CLI::PositiveNumber);
    app.add_option("--model", o.model, "inline model block, e.g. lambda=1,mu=1,N=100,T=5");
    app.add_option("--physical", o.physical, "inline physical block, e.g. E=..,V=..,N=..,T=..,sigma=..");
    run_option(app, o, "--replicas", "replicas", "number of replicas");
    run_option(app, o, "--B", "B", "emission rate target(s), comma separated");
    run_option(app, o, "--N", "N_list", "system sizes for the slope study, comma separated");
    run_option(app, o, "--steps", "n_steps", "output grid steps for ODE paths");
    run_option(app, o, "--rtol", "rtol", "relative ODE tolerance");
    run_option(app, o, "--atol", "atol", "absolute ODE tolerance");
    run_option(app, o, "--initial", "initial", "initial k: auto, uniform or an integer");
    run_option(app, o, "--x0", "x0", "initial fluid fraction");
    run_option(app, o, "--knots", "knots", "probe knots");
    run_option(app, o, "--starts", "starts", "probe starts");
    run_option(app, o, "--sub-steps", "sub_steps", "probe quadrature cells per knot interval");
    run_option(app, o, "--tolerance", "tolerance", "relative tolerance of the slope check");
    app.add_flag_callback("--dump-replicas", [&o] { o.run["dump_replicas"] = "true"; },
                          "write per-replica indicator and log-weight CSV");
    app.add_flag_callback("--probe", [&o] { o.run["probe"] = "true"; }, "run the hypothesis probe with the slope");

    std::string command;
    auto* sim = app.add_subcommand("simulate", "simulate jump trajectories");
    sim->callback([&] { command = "simulate"; });
    auto* analyze = app.add_subcommand("analyze", "deterministic analyses");
    analyze->require_subcommand(1);
    const std::pair<const char*, const char*> analyses[] = {
        {"fluid", "integrate the fluid limit from --x0"},
        {"stationary", "stationary hole sizes and the existence threshold"},
        {"regime", "stationary emission regime for each B"},
        {"infimum", "rate infimum over constant paths for each B"},
        {"probe", "piecewise-linear relaxation of the constant-path infimum"},
    };
    for (const auto& [name, help] : analyses) {
        auto* sub = analyze->add_subcommand(name, help);
        sub->callback([&command, name] { command = std::string("analyze ") + name; });
        sub->fallthrough();
    }
    auto* rare = app.add_subcommand("rare", "rare-event estimators");
    rare->require_subcommand(1);
    const std::pair<const char*, const char*> estimators[] = {
        {"naive", "plain Monte Carlo estimate of the emission event"},
        {"tilted", "importance sampling under the regime tilt"},
        {"slope", "fit -ln p against N and compare with the rate infimum"},
    };
    for (const auto& [name, help] : estimators) {
        auto* sub = rare->add_subcommand(name, help);
        sub->callback([&command, name] { command = std::string("rare ") + name; });
        sub->fallthrough();
    }
    auto* rep = app.add_subcommand("replay", "re-run a manifest and compare output digests");
    rep->add_option("manifest", o.manifest, "manifest.json of an earlier run")->required();
    rep->callback([&] { command = "replay"; });
    for (auto* sub : {sim, analyze, rare, rep}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << tool_version << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << tool_name << ": " << e.what() << '\n';
        return exit_usage;
    }

    std::vector<std::string> args(argv, argv + argc);
    try {
        if (command == "replay") return replay(o, threads, threads_opt->count() > 0, out, err);

        RunConfig cfg;
        cfg.command = command;
        if (!o.config.empty()) apply_raw(cfg, read_ini(o.config));
        if (!o.model.empty() && !o.physical.empty()) throw config_error("give only one of --model and --physical");
        for (const auto& [section, text] : {std::pair{"model", &o.model}, std::pair{"physical", &o.physical}}) {
            if (text->empty()) continue;
            cfg.param_source.clear();
            cfg.param_values.clear();
            apply_section(cfg, section, parse_inline(*text, std::string("--") + section));
        }
        apply_section(cfg, "run", o.run);
        if (seed_opt->count()) cfg.seed = seed;
        if (threads_opt->count()) cfg.threads = threads;
        resolve(cfg);
        if (!cfg.seed) {
            std::random_device rd;
            cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
            cfg.seed_generated = true;
            err << "seed: none given, generated " << *cfg.seed << " (recorded in the manifest)\n";
        }
        const RunResult r = execute(cfg, o.out, args, err);
        return r.status;
    } catch (const config_error& e) {
        err << tool_name << ": " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << tool_name << ": " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace bhldp::io
