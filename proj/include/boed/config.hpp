#pragma once

#include "boed/ace.hpp"
#include "boed/studies.hpp"
#include "boed/utility.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace boed {

/// Malformed or inconsistent configuration, or a referenced file that cannot be read.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ScenarioSpec {
    std::string id;
    AnomalyGenParams anomaly;
};

/// Parsed run configuration with the model, design space and defaults it implies.
struct RunConfig {
    nlohmann::json raw;
    std::string hash;
    bool spatiotemporal = false;
    int n = 0;
    int T = 1;
    StudyModel model;
    std::shared_ptr<const RiverNetwork> network;
    std::shared_ptr<const UtilityModel> study;
    DesignSpace space;
    std::vector<ScenarioSpec> scenarios;
    std::string default_scenario;
    UtilityConfig utility;
    AceOptions ace;
    int evaluation_B = 1000;
    std::uint64_t seed = 0;

    const ScenarioSpec& scenario(const std::string& id) const;
    /// Utility settings with the scenario's anomaly generator.
    UtilityConfig utility_for(const ScenarioSpec& s) const;
    /// Utility function for the optimizer under the given settings.
    UtilityFunction utility_function(const UtilityConfig& config) const;
};

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

/// Relative file references resolve against base_dir.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json design_to_json(const Design& d, const RunConfig& config);
Design design_from_json(const nlohmann::json& j, const RunConfig& config);
Design load_design(const std::filesystem::path& path, const RunConfig& config);

}  // namespace boed
