#include "boed/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Bayesian sensor design under anomalous data"};
    app.require_subcommand(1);
    boed::CommandOptions opts;
    std::string config;
    std::string out = ".";
    std::vector<std::string> designs;
    std::uint64_t seed = 0;
    std::string scenario;
    std::string objective;
    int segments = 0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", config, "configuration file (JSON)");
        if (config_required) c->required();
        sub->add_option("--seed", seed, "root seed (overrides the config)");
        sub->add_option("--out", out, "output directory");
    };

    auto* optimize = app.add_subcommand("optimize", "optimize a design with coordinate exchange");
    add_common(optimize, true);
    optimize->add_option("--scenario", scenario, "anomaly scenario id");
    optimize->add_option("--objective", objective, "dual | irmse-only | specificity-only");

    auto* compare = app.add_subcommand("compare", "compare designs across scenarios");
    add_common(compare, true);
    compare->add_option("--design", designs, "design file (repeatable)")->required();
    compare->add_option("--scenario", scenario, "restrict to one scenario id");
    compare->add_option("--objective", objective, "objective for the U column");

    auto* simulate = app.add_subcommand("simulate-network", "generate a random river network");
    add_common(simulate, false);
    simulate->add_option("--segments", segments, "number of segments");

    auto* estimate = app.add_subcommand("estimate-utility", "estimate the expected utility of a design");
    add_common(estimate, true);
    estimate->add_option("--design", designs, "design file")->required();
    estimate->add_option("--scenario", scenario, "anomaly scenario id");
    estimate->add_option("--objective", objective, "dual | irmse-only | specificity-only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : boed::kExitConfig;
    }

    opts.config = config;
    opts.out = out;
    for (const auto& d : designs) opts.designs.emplace_back(d);
    CLI::App* used = app.get_subcommands().front();
    if (used->count("--seed")) opts.seed = seed;
    if (!scenario.empty()) opts.scenario = scenario;
    if (!objective.empty()) opts.objective = objective;
    if (used == simulate && simulate->count("--segments")) opts.segments = segments;

    if (used == optimize) return boed::run_optimize(opts, std::cerr);
    if (used == compare) return boed::run_compare(opts, std::cerr);
    if (used == simulate) return boed::run_simulate_network(opts, std::cerr);
    return boed::run_estimate_utility(opts, std::cerr);
}
