#ifndef BHLDP_IO_CLI_HPP
#define BHLDP_IO_CLI_HPP

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "bhldp/io/config.hpp"

namespace bhldp::io {

inline constexpr const char* tool_name = "bhldp";
inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2 };

struct RunResult {
    int status = exit_ok;
    std::map<std::string, std::string> digests;  // file name -> sha256
};

// Runs a resolved configuration, writing outputs and manifest.json into dir.
RunResult execute(const RunConfig& cfg, const std::filesystem::path& dir, const std::vector<std::string>& argv,
                  std::ostream& log);

// Full command line front end; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bhldp::io

#endif  // BHLDP_IO_CLI_HPP
