#include "bhldp/io/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "bhldp/errors.hpp"

namespace bhldp::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw config_error("key '" + key + "': expected a number, got '" + text + "'");
    return v;
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw config_error("key '" + key + "': expected an integer, got '" + text + "'");
    return v;
}

std::size_t parse_count(const std::string& text, const std::string& key) {
    const std::int64_t v = parse_int(text, key);
    if (v < 1) throw config_error("key '" + key + "': must be >= 1, got " + std::to_string(v));
    return static_cast<std::size_t>(v);
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw config_error("key '" + key + "': expected an unsigned 64-bit integer, got '" + text + "'");
    return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw config_error("key '" + key + "': expected true or false, got '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const std::set<std::string> model_keys{"lambda", "mu", "N", "T"};
const std::set<std::string> physical_keys{"E", "V", "N", "T", "sigma", "G", "c", "hbar"};

std::string join(const std::set<std::string>& keys) {
    std::string out;
    for (const auto& k : keys) out += (out.empty() ? "" : ", ") + k;
    return out;
}

bool needs_B(const std::string& command) {
    return command == "analyze regime" || command == "analyze infimum" || command == "analyze probe" ||
           command.rfind("rare ", 0) == 0;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_double(item, key));
    if (out.empty()) throw config_error("key '" + key + "': empty list");
    return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& key) {
    std::vector<std::int64_t> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_int(item, key));
    if (out.empty()) throw config_error("key '" + key + "': empty list");
    return out;
}

RawConfig read_ini(const std::string& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw config_error(e.what());
    }
    RawConfig raw;
    for (const auto& [section, body] : tree) {
        // A top-level key carries a value; an empty section does not.
        if (body.empty() && !body.data().empty())
            throw config_error(path + ": key '" + section + "' outside of any section");
        RawSection& out = raw[section];
        for (const auto& [key, value] : body) out[key] = value.get_value<std::string>();
    }
    return raw;
}

RawSection parse_inline(const std::string& text, const std::string& what) {
    RawSection out;
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw config_error(what + ": expected key=value, got '" + item + "'");
        const std::string key = trim(item.substr(0, eq));
        if (!out.emplace(key, trim(item.substr(eq + 1))).second)
            throw config_error(what + ": duplicate key '" + key + "'");
    }
    return out;
}

void apply_section(RunConfig& cfg, const std::string& section, const RawSection& values) {
    if (section == "model" || section == "physical") {
        const auto& allowed = section == "model" ? model_keys : physical_keys;
        for (const auto& [key, value] : values)
            if (!allowed.count(key))
                throw config_error("[" + section + "]: unknown key '" + key + "' (allowed: " + join(allowed) + ")");
        if (!cfg.param_source.empty() && cfg.param_source != section)
            throw config_error("both [model] and [physical] parameters given; use exactly one");
        cfg.param_source = section;
        for (const auto& [key, value] : values) cfg.param_values[key] = value;
        return;
    }
    if (section != "run") throw config_error("unknown section [" + section + "] (allowed: model, physical, run)");

    for (const auto& [key, value] : values) {
        if (key == "seed") cfg.seed = parse_u64(value, key);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_count(value, key));
        else if (key == "replicas") cfg.replicas = parse_count(value, key);
        else if (key == "B") cfg.B = parse_double_list(value, key);
        else if (key == "N_list") cfg.N_list = parse_int_list(value, key);
        else if (key == "n_steps") cfg.n_steps = parse_count(value, key);
        else if (key == "rtol") cfg.rtol = parse_double(value, key);
        else if (key == "atol") cfg.atol = parse_double(value, key);
        else if (key == "initial") cfg.initial = trim(value);
        else if (key == "x0") cfg.x0 = parse_double(value, key);
        else if (key == "knots") cfg.knots = parse_count(value, key);
        else if (key == "starts") cfg.starts = parse_count(value, key);
        else if (key == "sub_steps") cfg.sub_steps = parse_count(value, key);
        else if (key == "tolerance") cfg.tolerance = parse_double(value, key);
        else if (key == "dump_replicas") cfg.dump_replicas = parse_bool(value, key);
        else if (key == "probe") cfg.probe = parse_bool(value, key);
        else throw config_error("[run]: unknown key '" + key + "'");
    }
}

void apply_raw(RunConfig& cfg, const RawConfig& raw) {
    for (const auto& [section, values] : raw) apply_section(cfg, section, values);
}

void resolve(RunConfig& cfg) {
    if (cfg.param_source.empty())
        throw config_error("no parameters: give a [model] or [physical] section, or --model / --physical");
    const auto& pv = cfg.param_values;
    auto require = [&](const std::string& key) -> const std::string& {
        const auto it = pv.find(key);
        if (it == pv.end()) throw config_error("[" + cfg.param_source + "]: missing required key '" + key + "'");
        return it->second;
    };
    auto optional = [&](const std::string& key) -> const std::string* {
        const auto it = pv.find(key);
        return it == pv.end() ? nullptr : &it->second;
    };

    try {
        if (cfg.param_source == "model") {
            cfg.physical.reset();
            const double T = optional("T") ? parse_double(*optional("T"), "T") : 1.0;
            cfg.model = dimensionless_params(parse_double(require("lambda"), "lambda"),
                                             parse_double(require("mu"), "mu"), parse_int(require("N"), "N"), T);
        } else {
            PhysicalBlock ph;
            ph.E = parse_double(require("E"), "E");
            ph.V = parse_double(require("V"), "V");
            ph.N = parse_int(require("N"), "N");
            if (const auto* t = optional("T")) ph.T = parse_double(*t, "T");
            const std::string sigma = trim(require("sigma"));
            ph.sigma_placeholder = sigma == "placeholder";
            ph.sigma = ph.sigma_placeholder ? placeholder_sigma : parse_double(sigma, "sigma");
            if (const auto* v = optional("G")) ph.G = parse_double(*v, "G");
            if (const auto* v = optional("c")) ph.c = parse_double(*v, "c");
            if (const auto* v = optional("hbar")) ph.hbar = parse_double(*v, "hbar");
            cfg.model = model_params_from_physical(ph.constants(), ph.scale());
            cfg.physical = ph;
        }
    } catch (const range_error& e) {
        throw config_error(std::string("params: ") + e.what() + " (intermediate " + e.intermediate() + ")");
    } catch (const invalid_parameter& e) {
        throw config_error(std::string("params: ") + e.what());
    }

    if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0)) throw config_error("rtol and atol must be > 0");
    if (!(cfg.tolerance > 0.0)) throw config_error("tolerance must be > 0");
    if (cfg.x0 && !(*cfg.x0 > 0.0 && *cfg.x0 <= 1.0)) throw config_error("x0 must lie in (0, 1]");
    if (cfg.knots < 2) throw config_error("knots must be >= 2");
    if (cfg.initial != "auto" && cfg.initial != "uniform") {
        const std::int64_t k = parse_int(cfg.initial, "initial");
        if (k < 1 || k > cfg.model.N)
            throw config_error("initial: k must lie in 1.." + std::to_string(cfg.model.N) + ", got " + cfg.initial);
    }

    if (needs_B(cfg.command) && cfg.B.empty()) throw config_error(cfg.command + ": missing required key 'B'");
    for (double B : cfg.B) {
        const bool zero_ok = cfg.command == "rare naive";
        if (!(zero_ok ? B >= 0.0 : B > 0.0) || !std::isfinite(B))
            throw config_error(std::string("B must be ") + (zero_ok ? ">= 0" : "> 0") + ", got " + format_double(B));
    }
    if (cfg.command == "rare slope") {
        if (cfg.B.size() != 1) throw config_error("rare slope: give exactly one value of B");
        if (cfg.N_list.size() < 3) throw config_error("rare slope: N_list needs at least 3 values");
        for (std::int64_t n : cfg.N_list)
            if (n < 2) throw config_error("N_list: every N must be >= 2");
        if (cfg.initial != "auto") throw config_error("rare slope: initial is fixed at round(N x_B); leave it as auto");
    }
}

nlohmann::json to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["command"] = cfg.command;
    j["parameters"]["source"] = cfg.param_source;
    j["parameters"]["values"] = cfg.param_values;
    j["parameters"]["model"] = {{"lambda", cfg.model.lambda},
                                {"mu", cfg.model.mu},
                                {"N", cfg.model.N},
                                {"T", cfg.model.T_horizon}};
    if (cfg.seed) j["seed"] = *cfg.seed;
    j["seed_generated"] = cfg.seed_generated;
    j["threads"] = cfg.threads;
    nlohmann::json& r = j["run"];
    r["replicas"] = cfg.replicas;
    r["B"] = cfg.B;
    r["N_list"] = cfg.N_list;
    r["n_steps"] = cfg.n_steps;
    r["rtol"] = cfg.rtol;
    r["atol"] = cfg.atol;
    r["initial"] = cfg.initial;
    r["x0"] = cfg.x0 ? nlohmann::json(*cfg.x0) : nlohmann::json(nullptr);
    r["knots"] = cfg.knots;
    r["starts"] = cfg.starts;
    r["sub_steps"] = cfg.sub_steps;
    r["tolerance"] = cfg.tolerance;
    r["dump_replicas"] = cfg.dump_replicas;
    r["probe"] = cfg.probe;
    return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    try {
        cfg.command = j.at("command").get<std::string>();
        cfg.param_source = j.at("parameters").at("source").get<std::string>();
        cfg.param_values = j.at("parameters").at("values").get<RawSection>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.seed_generated = j.at("seed_generated").get<bool>();
        cfg.threads = j.at("threads").get<unsigned>();
        const auto& r = j.at("run");
        cfg.replicas = r.at("replicas").get<std::size_t>();
        cfg.B = r.at("B").get<std::vector<double>>();
        cfg.N_list = r.at("N_list").get<std::vector<std::int64_t>>();
        cfg.n_steps = r.at("n_steps").get<std::size_t>();
        cfg.rtol = r.at("rtol").get<double>();
        cfg.atol = r.at("atol").get<double>();
        cfg.initial = r.at("initial").get<std::string>();
        if (!r.at("x0").is_null()) cfg.x0 = r.at("x0").get<double>();
        cfg.knots = r.at("knots").get<std::size_t>();
        cfg.starts = r.at("starts").get<std::size_t>();
        cfg.sub_steps = r.at("sub_steps").get<std::size_t>();
        cfg.tolerance = r.at("tolerance").get<double>();
        cfg.dump_replicas = r.at("dump_replicas").get<bool>();
        cfg.probe = r.at("probe").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("manifest configuration: ") + e.what());
    }
    resolve(cfg);
    return cfg;
}

}  // namespace bhldp::io
