#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace boed {

/// Exit statuses of the command-line verbs.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

struct CommandOptions {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out = ".";
    std::vector<std::filesystem::path> designs;
    std::optional<std::string> scenario;
    std::optional<std::string> objective;
    std::optional<int> segments;
};

/// Writes design.json, trace.csv and manifest.json.
int run_optimize(const CommandOptions& opts, std::ostream& log);
/// Writes table.csv and manifest.json.
int run_compare(const CommandOptions& opts, std::ostream& log);
/// Writes network.json and manifest.json.
int run_simulate_network(const CommandOptions& opts, std::ostream& log);
/// Writes utility.json and manifest.json.
int run_estimate_utility(const CommandOptions& opts, std::ostream& log);

/// Format a double with round-trip precision.
std::string format_double(double v);

}  // namespace boed
