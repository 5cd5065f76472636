#ifndef BHLDP_IO_CONFIG_HPP
#define BHLDP_IO_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bhldp/params.hpp"
#include "json.hpp"

namespace bhldp::io {

using RawSection = std::map<std::string, std::string>;
using RawConfig = std::map<std::string, RawSection>;

// Physical parameter block as written by the user. sigma has no default; the
// stand-in value is reachable only as `sigma = placeholder`.
struct PhysicalBlock {
    double E = 0.0;
    double V = 0.0;
    std::int64_t N = 0;
    double T = 1.0;
    double sigma = 0.0;
    bool sigma_placeholder = false;
    double G = PhysicalConstants::codata(placeholder_sigma).G;
    double c = PhysicalConstants::codata(placeholder_sigma).c;
    double hbar = PhysicalConstants::codata(placeholder_sigma).hbar;

    PhysicalConstants constants() const { return {G, c, hbar, sigma}; }
    SystemScale scale() const { return {E, V, N, T}; }
};

struct RunConfig {
    std::string command;  // "simulate", "analyze regime", "rare slope", ...

    std::string param_source;  // "model" or "physical"
    RawSection param_values;                // as written, before resolution
    std::optional<PhysicalBlock> physical;  // set by resolve()
    ModelParams model{};                    // set by resolve()

    std::optional<std::uint64_t> seed;
    bool seed_generated = false;
    unsigned threads = 1;

    std::size_t replicas = 1000;
    std::vector<double> B;
    std::vector<std::int64_t> N_list;
    std::size_t n_steps = 1000;
    double rtol = 1e-9;
    double atol = 1e-12;
    std::string initial = "auto";  // auto | uniform | <k>
    std::optional<double> x0;
    std::size_t knots = 8;
    std::size_t starts = 8;
    std::size_t sub_steps = 16;
    double tolerance = 0.15;
    bool dump_replicas = false;
    bool probe = false;
};

// INI sections: [model] or [physical], plus [run]. Lines starting with ';'
// are comments.
RawConfig read_ini(const std::string& path);
RawSection parse_inline(const std::string& text, const std::string& what);

// Applies one raw section onto cfg; throws config_error on unknown keys or
// malformed values.
void apply_section(RunConfig& cfg, const std::string& section, const RawSection& values);
void apply_raw(RunConfig& cfg, const RawConfig& raw);

// Checks that exactly one parameter block is present, resolves ModelParams and
// checks the options the command needs. Throws config_error.
void resolve(RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

std::vector<double> parse_double_list(const std::string& text, const std::string& key);
std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& key);

}  // namespace bhldp::io

#endif  // BHLDP_IO_CONFIG_HPP
