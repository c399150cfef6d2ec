#include "boed/cli.hpp"

#include "boed/config.hpp"
#include "boed/linalg.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace boed {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

json manifest(const std::string& command, const RunConfig* config, std::uint64_t seed,
              const std::vector<std::string>& outputs) {
    json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["seed"] = seed;
    if (config) {
        j["config_hash"] = config->hash;
        j["config"] = config->raw;
    }
    j["outputs"] = outputs;
    j["decisions"] = {
        {"acceptance_test", "normal approximation to the difference of mean utilities"},
        {"specificity", "pooled confusion matrix over draws"},
        {"emulator", "squared-exponential GP with noise, profiled likelihood grid search"},
        {"seeding", "counter-based seed derivation from the root seed"},
    };
    j["jitter_events"] = jitter_events();
    return j;
}

std::string csv_header(std::uint64_t seed, const std::string& hash) {
    return "# seed=" + std::to_string(seed) + ", config_hash=" + hash + "\n";
}

int guarded(const std::function<int()>& body, std::ostream& log) {
    try {
        return body();
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

RunConfig load(const CommandOptions& opts) {
    if (opts.config.empty()) throw ConfigError("--config is required");
    if (!std::filesystem::exists(opts.config)) throw ConfigError("config file not found: " + opts.config.string());
    return load_config(opts.config);
}

void prepare_out(const std::filesystem::path& out) { std::filesystem::create_directories(out); }

std::string cell(double v, bool defined) { return defined ? format_double(v) : "-"; }

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run_optimize(const CommandOptions& opts, std::ostream& log) {
    return guarded(
        [&] {
            const RunConfig config = load(opts);
            const std::uint64_t seed = opts.seed.value_or(config.seed);
            const ScenarioSpec& scen = config.scenario(opts.scenario.value_or(config.default_scenario));
            UtilityConfig u = config.utility_for(scen);
            if (opts.objective) u.objective = parse_objective(*opts.objective);
            prepare_out(opts.out);

            log << "optimize: scenario " << scen.id << ", objective " << objective_name(u.objective) << ", K="
                << config.ace.K << ", N1=" << config.ace.N1 << '\n';
            const AceResult result = optimize(config.space, config.utility_function(u), config.ace, seed);

            json d = design_to_json(result.best, config);
            d["utility"] = result.best_evaluation.value;
            d["se"] = result.best_evaluation.se;
            d["start"] = result.best_start;
            d["scenario"] = scen.id;
            d["objective"] = objective_name(u.objective);
            d["seed"] = seed;
            d["config_hash"] = config.hash;
            write_file(opts.out / "design.json", d.dump(2) + "\n");

            std::ostringstream trace;
            trace << csv_header(seed, config.hash);
            write_trace_csv(trace, result);
            write_file(opts.out / "trace.csv", trace.str());

            json m = manifest("optimize", &config, seed, {"design.json", "trace.csv", "manifest.json"});
            m["scenario"] = scen.id;
            m["objective"] = objective_name(u.objective);
            json starts = json::array();
            for (const auto& s : result.starts) {
                starts.push_back({{"failed", s.failed},
                                  {"error", s.error},
                                  {"utility", s.failed ? json() : json(s.final_evaluation.value)}});
            }
            m["starts"] = starts;
            write_file(opts.out / "manifest.json", m.dump(2) + "\n");
            log << "best utility " << format_double(result.best_evaluation.value) << " from start "
                << result.best_start << '\n';
            return kExitOk;
        },
        log);
}

int run_compare(const CommandOptions& opts, std::ostream& log) {
    return guarded(
        [&] {
            const RunConfig config = load(opts);
            const std::uint64_t seed = opts.seed.value_or(config.seed);
            if (opts.designs.empty()) throw ConfigError("compare needs at least one --design");
            std::vector<Design> designs;
            for (const auto& p : opts.designs) designs.push_back(load_design(p, config));
            std::vector<const ScenarioSpec*> scenarios;
            if (opts.scenario) {
                scenarios.push_back(&config.scenario(*opts.scenario));
            } else {
                for (const auto& s : config.scenarios) scenarios.push_back(&s);
            }
            prepare_out(opts.out);

            std::ostringstream table;
            table << csv_header(seed, config.hash);
            table << "design,scenario,irmse_cleaned,irmse_cleaned_sd,irmse_anom,irmse_anom_sd,irmse_clean,"
                     "irmse_clean_sd,specificity,accuracy,sensitivity,mcc,pct_removed,pct_retained,U\n";
            for (const ScenarioSpec* scen : scenarios) {
                UtilityConfig u = config.utility_for(*scen);
                if (opts.objective) u.objective = parse_objective(*opts.objective);
                // Every design sees the same draws within a scenario.
                const auto index = static_cast<std::uint64_t>(scen - config.scenarios.data());
                const std::uint64_t scen_seed = derive_seed(seed, stream::final_eval, index);
                for (std::size_t k = 0; k < designs.size(); ++k) {
                    const UtilityEstimate e = estimate_utility(designs[k], u, *config.study, scen_seed);
                    const Metrics m = metrics(e.confusion);
                    const DataQuality q = data_quality_report(e.confusion);
                    table << opts.designs[k].filename().string() << ',' << scen->id << ','
                          << format_double(e.cleaned.mean) << ',' << format_double(e.cleaned.sd) << ','
                          << format_double(e.anom.mean) << ',' << format_double(e.anom.sd) << ','
                          << format_double(e.clean.mean) << ',' << format_double(e.clean.sd) << ','
                          << cell(m.specificity, m.specificity_defined) << ','
                          << cell(m.accuracy, m.accuracy_defined) << ','
                          << cell(m.sensitivity, m.sensitivity_defined) << ',' << cell(m.mcc, m.mcc_defined) << ','
                          << cell(q.pct_removed, q.removed_defined) << ','
                          << cell(q.pct_retained, q.retained_defined) << ',' << format_double(e.value) << '\n';
                }
                log << "compare: scenario " << scen->id << " done\n";
            }
            write_file(opts.out / "table.csv", table.str());
            json m = manifest("compare", &config, seed, {"table.csv", "manifest.json"});
            json files = json::array();
            for (const auto& p : opts.designs) files.push_back(p.filename().string());
            m["designs"] = files;
            m["B"] = config.evaluation_B;
            write_file(opts.out / "manifest.json", m.dump(2) + "\n");
            return kExitOk;
        },
        log);
}

int run_simulate_network(const CommandOptions& opts, std::ostream& log) {
    return guarded(
        [&] {
            std::optional<RunConfig> config;
            if (!opts.config.empty()) config = load(opts);
            int segments = 0;
            std::uint64_t seed = 0;
            if (config) {
                seed = config->seed;
                const auto& m = config->raw.at("model");
                if (m.contains("network") && m.at("network").contains("generate")) {
                    const auto& g = m.at("network").at("generate");
                    segments = g.value("segments", 0);
                    seed = g.value("seed", seed);
                }
            }
            if (opts.segments) segments = *opts.segments;
            if (opts.seed) seed = *opts.seed;
            if (segments < 1) throw ConfigError("simulate-network needs --segments or a network generate block");
            prepare_out(opts.out);
            const RiverNetwork net = generate_network(segments, seed);
            save_network(net, opts.out / "network.json");
            json m = manifest("simulate-network", config ? &*config : nullptr, seed, {"network.json", "manifest.json"});
            m["segments"] = segments;
            m["paths"] = enumerate_paths(net).size();
            write_file(opts.out / "manifest.json", m.dump(2) + "\n");
            log << "network with " << segments << " segments written\n";
            return kExitOk;
        },
        log);
}

int run_estimate_utility(const CommandOptions& opts, std::ostream& log) {
    return guarded(
        [&] {
            const RunConfig config = load(opts);
            const std::uint64_t seed = opts.seed.value_or(config.seed);
            if (opts.designs.size() != 1) throw ConfigError("estimate-utility needs exactly one --design");
            const Design d = load_design(opts.designs.front(), config);
            const ScenarioSpec& scen = config.scenario(opts.scenario.value_or(config.default_scenario));
            UtilityConfig u = config.utility_for(scen);
            if (opts.objective) u.objective = parse_objective(*opts.objective);
            prepare_out(opts.out);
            const UtilityEstimate e = estimate_utility(d, u, *config.study, seed);
            json j = to_json(e);
            j["scenario"] = scen.id;
            j["config_hash"] = config.hash;
            write_file(opts.out / "utility.json", j.dump(2) + "\n");
            json m = manifest("estimate-utility", &config, seed, {"utility.json", "manifest.json"});
            m["scenario"] = scen.id;
            write_file(opts.out / "manifest.json", m.dump(2) + "\n");
            log << "utility " << format_double(e.value) << " (se " << format_double(e.se) << ")\n";
            return kExitOk;
        },
        log);
}

}  // namespace boed
