#ifndef BHLDP_IO_OUTPUT_HPP
#define BHLDP_IO_OUTPUT_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace bhldp::io {

// 17 significant digits, enough to round-trip any double.
std::string format_number(double v);

// Non-finite values become JSON null.
nlohmann::json json_number(double v);

// CSV with a one-line header; every cell written with format_number unless
// passed as text.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(const std::string& text);
    void end_row();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

// UTF-8 JSON, keys sorted, two-space indent, trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

std::string sha256_file(const std::filesystem::path& path);

// Files written by one invocation, relative to the output directory.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir);
    std::filesystem::path file(const std::string& name);
    const std::filesystem::path& dir() const { return dir_; }
    std::map<std::string, std::string> digests() const;

private:
    std::filesystem::path dir_;
    std::vector<std::string> names_;
};

}  // namespace bhldp::io

#endif  // BHLDP_IO_OUTPUT_HPP
