#include "boed/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace boed {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

const json& require(const json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(std::string("missing field '") + key + "' in " + where);
    }
    return j.at(key);
}

Distribution parse_distribution(const std::string& name, const json& j) {
    if (j.is_number()) return Distribution::point(j.get<double>());
    if (!j.is_object()) throw ConfigError("prior '" + name + "' must be a number or an object");
    const std::string dist = get_or<std::string>(j, "dist", "");
    if (dist == "point") return Distribution::point(require(j, "value", "point prior").get<double>());
    if (dist == "uniform") {
        return Distribution::uniform(require(j, "lower", "uniform prior").get<double>(),
                                     require(j, "upper", "uniform prior").get<double>());
    }
    if (dist == "gamma" || dist == "inverse-gamma") {
        const double shape = require(j, "shape", "gamma prior").get<double>();
        const double rate = require(j, "rate", "gamma prior").get<double>();
        return dist == "gamma" ? Distribution::gamma(shape, rate) : Distribution::inverse_gamma(shape, rate);
    }
    throw ConfigError("prior '" + name + "' has unknown dist '" + dist + "'");
}

Point2 parse_point(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(std::string(what) + " must be a two-element array");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::string scenario_id(const json& j) {
    const json& id = require(j, "id", "scenario");
    if (id.is_string()) return id.get<std::string>();
    if (id.is_number_integer()) return std::to_string(id.get<long long>());
    throw ConfigError("scenario id must be a string or integer");
}

RunConfig parse_impl(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    RunConfig c;
    c.raw = j;
    c.hash = config_hash(j);
    c.seed = get_or<std::uint64_t>(j, "seed", 0);

    const json& m = require(j, "model", "configuration");
    const std::string kind = get_or<std::string>(m, "kind", "spatial");
    if (kind != "spatial" && kind != "spatiotemporal") throw ConfigError("model kind must be spatial or spatiotemporal");
    c.spatiotemporal = kind == "spatiotemporal";
    c.n = require(m, "n", "model").get<int>();
    if (c.n < 1) throw ConfigError("model n must be positive");
    c.T = get_or<int>(m, "T", 1);
    if (c.T < 1) throw ConfigError("model T must be positive");
    if (!c.spatiotemporal && c.T != 1) throw ConfigError("spatial models have T = 1");

    const json& cov = require(m, "covariance", "model");
    for (const auto& comp : require(cov, "components", "covariance")) {
        c.model.covariance.components.push_back(parse_component(comp.get<std::string>()));
    }
    if (m.contains("priors")) {
        for (const auto& [name, value] : m.at("priors").items()) {
            c.model.prior.params[name] = parse_distribution(name, value);
        }
    }
    c.model.prior.validate();
    c.model.tau2 = get_or<double>(m, "tau2", 0.0);

    if (!c.spatiotemporal) {
        Point2 lower{0.0, 0.0};
        Point2 upper{1.0, 1.0};
        if (m.contains("region")) {
            lower = parse_point(require(m.at("region"), "lower", "region"), "region lower");
            upper = parse_point(require(m.at("region"), "upper", "region"), "region upper");
        }
        std::vector<Point2> prediction;
        if (m.contains("prediction_points")) {
            for (const auto& p : m.at("prediction_points")) prediction.push_back(parse_point(p, "prediction point"));
        } else {
            const json grid = m.contains("prediction_grid") ? m.at("prediction_grid") : json::array({4, 4});
            if (!grid.is_array() || grid.size() != 2) throw ConfigError("prediction_grid must be [nx, ny]");
            prediction = grid_cell_centres(lower, upper, grid[0].get<int>(), grid[1].get<int>());
        }
        c.study = std::make_shared<SpatialStudy>(c.model, std::move(prediction));
        c.space = DesignSpace::planar(c.n, {{lower[0], upper[0]}, {lower[1], upper[1]}});
    } else {
        const json& net = require(m, "network", "model");
        if (net.contains("file")) {
            std::filesystem::path p = net.at("file").get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            if (!std::filesystem::exists(p)) throw ConfigError("network file not found: " + p.string());
            try {
                c.network = std::make_shared<RiverNetwork>(load_network(p));
            } catch (const std::exception& e) {
                throw ConfigError("cannot read network file " + p.string() + ": " + e.what());
            }
        } else if (net.contains("generate")) {
            const json& g = net.at("generate");
            c.network = std::make_shared<RiverNetwork>(
                generate_network(require(g, "segments", "network generate").get<int>(), get_or<std::uint64_t>(g, "seed", 0)));
        } else {
            throw ConfigError("network needs 'file' or 'generate'");
        }
        std::vector<NetworkLocation> prediction;
        const json pred = m.contains("prediction") ? m.at("prediction") : json::object();
        if (pred.contains("locations")) {
            for (const auto& loc : pred.at("locations")) {
                prediction.push_back({require(loc, "segment", "location").get<int>(),
                                      require(loc, "offset", "location").get<double>()});
            }
        } else {
            prediction = segment_midpoints(*c.network, get_or<int>(pred, "count", 12));
        }
        auto paths = enumerate_paths(*c.network);
        c.study = std::make_shared<RiverStudy>(c.network, paths, c.model, c.T, std::move(prediction));
        c.space = DesignSpace::network(c.n, std::move(paths));
    }

    const json& scen = require(j, "scenarios", "configuration");
    if (!scen.is_array() || scen.empty()) throw ConfigError("scenarios must be a nonempty array");
    std::set<std::string> ids;
    for (const auto& s : scen) {
        ScenarioSpec spec;
        spec.id = scenario_id(s);
        if (!ids.insert(spec.id).second) throw ConfigError("duplicate scenario id '" + spec.id + "'");
        spec.anomaly.p_A = get_or<double>(s, "p_A", 0.0);
        spec.anomaly.lambda_A = get_or<double>(s, "lambda_A", 0.0);
        spec.anomaly.mu_A = get_or<double>(s, "mu_A", 5.0);
        if (s.contains("sigma2_A")) {
            spec.anomaly.sigma_A = std::sqrt(s.at("sigma2_A").get<double>());
        } else {
            spec.anomaly.sigma_A = get_or<double>(s, "sigma_A", std::sqrt(10.0));
        }
        spec.anomaly.validate();
        c.scenarios.push_back(spec);
    }
    if (j.contains("scenario")) {
        const json& d = j.at("scenario");
        c.default_scenario = d.is_string() ? d.get<std::string>() : std::to_string(d.get<long long>());
        c.scenario(c.default_scenario);
    } else {
        c.default_scenario = c.scenarios.back().id;
    }

    const json det = j.contains("detector") ? j.at("detector") : json::object();
    auto& dc = c.utility.detector;
    dc.kind = parse_detector(get_or<std::string>(det, "kind", c.spatiotemporal ? "oddstream" : "spatial-knn"));
    dc.k = get_or<int>(det, "k", 3);
    dc.B_train = get_or<int>(det, "B_train", 100);
    dc.train_panels = get_or<int>(det, "train_panels", 1);
    dc.oddstream.tau_F = get_or<double>(det, "tau_F", 0.95);
    dc.oddstream.extremes = get_or<int>(det, "extremes", 100000);
    dc.oddstream.batch = get_or<int>(det, "batch", 0);
    if (det.contains("features")) {
        dc.oddstream.features.clear();
        for (const auto& f : det.at("features")) dc.oddstream.features.push_back(parse_feature(f.get<std::string>()));
    }
    c.utility.window = get_or<int>(det, "window", 0);
    if (c.utility.window > c.T) throw ConfigError("detector window exceeds T");
    if (dc.kind == DetectorKind::spatial_knn && c.T != 1) throw ConfigError("spatial-knn detector needs T = 1");
    if (dc.kind == DetectorKind::spatial_knn && dc.k >= c.n) throw ConfigError("detector k must be below n");
    if (dc.kind == DetectorKind::oddstream && c.T < 3) throw ConfigError("oddstream needs T >= 3");

    c.utility.objective = parse_objective(get_or<std::string>(j, "objective", "dual"));
    c.utility.threads = get_or<int>(j, "threads", 1);

    const json opt = j.contains("optimizer") ? j.at("optimizer") : json::object();
    c.ace.N1 = get_or<int>(opt, "N1", c.spatiotemporal ? 40 : 30);
    c.ace.K = get_or<int>(opt, "K", 1);
    c.ace.Q = get_or<int>(opt, "Q", 20);
    c.ace.B1 = get_or<int>(opt, "B1", 1500);
    c.ace.B2 = get_or<int>(opt, "B2", 1000);
    c.ace.grid = get_or<int>(opt, "grid", 1000);
    c.ace.validate();

    const json ev = j.contains("evaluation") ? j.at("evaluation") : json::object();
    c.evaluation_B = get_or<int>(ev, "B", 1000);
    if (c.evaluation_B < 1) throw ConfigError("evaluation B must be positive");
    c.utility.B = c.evaluation_B;
    c.utility.validate();
    return c;
}

}  // namespace

const ScenarioSpec& RunConfig::scenario(const std::string& id) const {
    for (const auto& s : scenarios) {
        if (s.id == id) return s;
    }
    throw ConfigError("unknown scenario '" + id + "'");
}

UtilityConfig RunConfig::utility_for(const ScenarioSpec& s) const {
    UtilityConfig u = utility;
    u.anomaly = s.anomaly;
    return u;
}

UtilityFunction RunConfig::utility_function(const UtilityConfig& config) const {
    auto model = study;
    return [model, config](const Design& d, int B, std::uint64_t seed) {
        UtilityConfig u = config;
        u.B = B;
        const UtilityEstimate e = estimate_utility(d, u, *model, seed);
        return Evaluation{e.value, e.se};
    };
}

std::string config_hash(const nlohmann::json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    try {
        return parse_impl(j, base_dir);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse config file " + path.string() + ": " + e.what());
    }
    return parse_config(j, path.parent_path());
}

nlohmann::json design_to_json(const Design& d, const RunConfig& config) {
    nlohmann::json j;
    nlohmann::json pts = nlohmann::json::array();
    if (config.space.on_network()) {
        j["kind"] = "network";
        const auto& study = dynamic_cast<const RiverStudy&>(*config.study);
        const auto locs = study.locations(d);
        for (Eigen::Index i = 0; i < d.points(); ++i) {
            nlohmann::json p;
            p["path"] = d.path[static_cast<std::size_t>(i)];
            p["distance"] = d.coords(i, 0);
            p["segment"] = locs[static_cast<std::size_t>(i)].segment;
            p["offset"] = locs[static_cast<std::size_t>(i)].offset;
            if (!config.network->coords().empty()) {
                const Point2 xy = config.network->embed(locs[static_cast<std::size_t>(i)]);
                p["xy"] = {xy[0], xy[1]};
            }
            pts.push_back(p);
        }
    } else {
        j["kind"] = "planar";
        for (Eigen::Index i = 0; i < d.points(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index k = 0; k < d.dims(); ++k) row.push_back(d.coords(i, k));
            pts.push_back(row);
        }
    }
    j["points"] = pts;
    return j;
}

Design design_from_json(const nlohmann::json& j, const RunConfig& config) {
    try {
        const auto& pts = j.at("points");
        Design d;
        const auto n = static_cast<Eigen::Index>(pts.size());
        if (config.space.on_network()) {
            d.coords.resize(n, 1);
            for (Eigen::Index i = 0; i < n; ++i) {
                d.path.push_back(pts[static_cast<std::size_t>(i)].at("path").get<int>());
                d.coords(i, 0) = pts[static_cast<std::size_t>(i)].at("distance").get<double>();
            }
        } else {
            d.coords.resize(n, 2);
            for (Eigen::Index i = 0; i < n; ++i) {
                const Point2 p = parse_point(pts[static_cast<std::size_t>(i)], "design point");
                d.coords(i, 0) = p[0];
                d.coords(i, 1) = p[1];
            }
        }
        if (!config.space.contains(d)) throw ConfigError("design lies outside the design space");
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed design: ") + e.what());
    }
}

Design load_design(const std::filesystem::path& path, const RunConfig& config) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open design file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse design file " + path.string() + ": " + e.what());
    }
    return design_from_json(j, config);
}

}  // namespace boed
