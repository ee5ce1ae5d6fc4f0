#pragma once

// Command-line front end: verify, rules, crude, table and conjecture.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mpa/report.hpp"

namespace mpa {

inline constexpr int exit_pass = 0;
inline constexpr int exit_fail = 1;
inline constexpr int exit_usage = 2;

struct RunConfig {
    std::int64_t default_order = 30;
    int threads = 1;
    std::filesystem::path output_dir;
};

// `key = value` lines with keys default_order, threads, output_dir; blank
// lines and '#' comments are skipped.  Throws std::invalid_argument on an
// unknown key or an invalid value.
RunConfig parse_config(std::istream &in);
RunConfig load_config(const std::filesystem::path &path);

// Runs reports on up to `threads` workers; the result keeps the order of `jobs`.
std::vector<Report> run_parallel(const std::vector<std::function<Report()>> &jobs, int threads);

// One JSON object for a single report, an array otherwise.
std::string reports_to_json(const std::vector<Report> &reports);
std::string reports_to_text(const std::vector<Report> &reports);

// Exit code 0 when every report passes, 1 otherwise.
int exit_code(const std::vector<Report> &reports);

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace mpa
