#include "boed/network.hpp"

#include "boed/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace boed {

RiverNetwork::RiverNetwork(std::vector<Segment> segments, int outlet, std::map<int, Point2> coords)
    : segments_(std::move(segments)), outlet_(outlet), coords_(std::move(coords)) {
    if (segments_.empty()) throw NetworkError("network has no segments");
    const std::size_t n = segments_.size();
    std::unordered_map<int, std::size_t> by_child;  // upstream junction -> segment index
    for (std::size_t i = 0; i < n; ++i) {
        const Segment& s = segments_[i];
        if (!index_.emplace(s.id, i).second) {
            throw NetworkError("duplicate segment id " + std::to_string(s.id));
        }
        if (!(s.length > 0.0) || !std::isfinite(s.length)) {
            throw NetworkError("segment " + std::to_string(s.id) + " has non-positive length");
        }
        if (!(s.additive > 0.0) || !std::isfinite(s.additive)) {
            throw NetworkError("segment " + std::to_string(s.id) + " has non-positive additive value");
        }
        if (s.parent == s.child) {
            throw NetworkError("segment " + std::to_string(s.id) + " is a self-loop");
        }
        if (!by_child.emplace(s.child, i).second) {
            throw NetworkError("junction " + std::to_string(s.child) +
                               " is the upstream end of more than one segment");
        }
    }

    downstream_.assign(n, -1);
    upstream_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        const Segment& s = segments_[i];
        if (s.parent == outlet_) {
            if (root_ != -1) throw NetworkError("more than one segment drains to the outlet");
            root_ = s.id;
            continue;
        }
        auto it = by_child.find(s.parent);
        if (it == by_child.end()) {
            throw NetworkError("segment " + std::to_string(s.id) + " drains to junction " +
                               std::to_string(s.parent) + " which has no downstream segment");
        }
        downstream_[i] = segments_[it->second].id;
        upstream_[it->second].push_back(s.id);
    }
    if (root_ == -1) throw NetworkError("no segment drains to the outlet junction");
    for (auto& ups : upstream_) std::sort(ups.begin(), ups.end());

    // Breadth-first from the root; anything unreached sits on a cycle.
    base_distance_.assign(n, 0.0);
    depth_.assign(n, -1);
    std::vector<int> order{root_};
    depth_[idx(root_)] = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = idx(order[k]);
        for (int up : upstream_[i]) {
            const std::size_t j = idx(up);
            depth_[j] = depth_[i] + 1;
            base_distance_[j] = base_distance_[i] + segments_[i].length;
            order.push_back(up);
        }
    }
    if (order.size() != n) throw NetworkError("network contains a cycle or disconnected segments");

    for (std::size_t i = 0; i < n; ++i) {
        double inflow = 0.0;
        for (int up : upstream_[i]) inflow += segments_[idx(up)].additive;
        if (segments_[i].additive < inflow * (1.0 - 1e-12)) {
            throw NetworkError("additive value decreases downstream at segment " +
                               std::to_string(segments_[i].id));
        }
    }
}

std::size_t RiverNetwork::idx(int id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw NetworkError("unknown segment " + std::to_string(id));
    return it->second;
}

const Segment& RiverNetwork::segment(int id) const { return segments_[idx(id)]; }
int RiverNetwork::downstream(int id) const { return downstream_[idx(id)]; }
const std::vector<int>& RiverNetwork::upstream(int id) const { return upstream_[idx(id)]; }
double RiverNetwork::base_distance(int id) const { return base_distance_[idx(id)]; }
int RiverNetwork::depth(int id) const { return depth_[idx(id)]; }

double RiverNetwork::distance_to_outlet(const NetworkLocation& loc) const {
    return base_distance(loc.segment) + loc.offset;
}

void RiverNetwork::check(const NetworkLocation& loc) const {
    const Segment& s = segment(loc.segment);
    if (!(loc.offset >= 0.0 && loc.offset <= s.length)) {
        throw NetworkError("offset " + std::to_string(loc.offset) + " outside segment " +
                           std::to_string(loc.segment));
    }
}

Point2 RiverNetwork::embed(const NetworkLocation& loc) const {
    const Segment& s = segment(loc.segment);
    auto down = coords_.find(s.parent);
    auto up = coords_.find(s.child);
    if (down == coords_.end() || up == coords_.end()) {
        throw NetworkError("network has no embedding for segment " + std::to_string(s.id));
    }
    const double f = loc.offset / s.length;
    return {down->second[0] + f * (up->second[0] - down->second[0]),
            down->second[1] + f * (up->second[1] - down->second[1])};
}

RiverNetwork generate_network(int segment_count, std::uint64_t seed, const GeneratorOptions& opts) {
    if (segment_count < 1) throw NetworkError("segment_count must be at least 1");
    if (!(opts.min_length > 0.0) || opts.max_length < opts.min_length) {
        throw NetworkError("invalid segment length range");
    }
    Rng rng = make_rng(derive_seed(seed, stream::network));
    std::uniform_real_distribution<double> length(opts.min_length, opts.max_length);

    std::vector<Segment> segs;
    std::vector<double> angle;
    std::vector<int> headwaters;
    int next_junction = 1;
    auto add = [&](int parent_junction, double a) {
        Segment s;
        s.id = static_cast<int>(segs.size());
        s.parent = parent_junction;
        s.child = next_junction++;
        s.length = length(rng);
        segs.push_back(s);
        angle.push_back(a);
        return s.id;
    };
    headwaters.push_back(add(0, std::numbers::pi / 2));
    std::vector<int> depth{0};

    while (static_cast<int>(segs.size()) < segment_count) {
        std::uniform_int_distribution<std::size_t> pick(0, headwaters.size() - 1);
        const std::size_t h = pick(rng);
        const int parent = headwaters[h];
        const int junction = segs[parent].child;
        const double spread = 0.9 * std::pow(0.8, depth[parent]);
        headwaters.erase(headwaters.begin() + static_cast<std::ptrdiff_t>(h));
        if (segment_count - static_cast<int>(segs.size()) >= 2) {
            for (double sign : {-1.0, 1.0}) {
                headwaters.push_back(add(junction, angle[parent] + sign * spread));
                depth.push_back(depth[parent] + 1);
            }
        } else {
            headwaters.push_back(add(junction, angle[parent]));
            depth.push_back(depth[parent] + 1);
        }
    }

    // Children always carry larger ids than their downstream segment.
    std::vector<std::vector<int>> ups(segs.size());
    std::unordered_map<int, int> by_child;
    for (const auto& s : segs) by_child[s.child] = s.id;
    for (const auto& s : segs) {
        if (s.parent != 0) ups[by_child.at(s.parent)].push_back(s.id);
    }
    for (int i = static_cast<int>(segs.size()) - 1; i >= 0; --i) {
        if (ups[i].empty()) {
            segs[i].additive = 1.0;
        } else {
            double sum = 0.0;
            for (int u : ups[i]) sum += segs[u].additive;
            segs[i].additive = sum;
        }
    }

    std::map<int, Point2> coords;
    coords[0] = {0.0, 0.0};
    for (const auto& s : segs) {
        const Point2 base = coords.at(s.parent);
        coords[s.child] = {base[0] + s.length * std::cos(angle[s.id]),
                           base[1] + s.length * std::sin(angle[s.id])};
    }
    return RiverNetwork(std::move(segs), 0, std::move(coords));
}

namespace {

struct Relation {
    bool connected;
    double distance;
    int upstream_segment;    // connected pairs only
    int downstream_segment;  // connected pairs only
};

Relation relate(const RiverNetwork& net, const NetworkLocation& a, const NetworkLocation& b) {
    net.check(a);
    net.check(b);
    const double da = net.distance_to_outlet(a);
    const double db = net.distance_to_outlet(b);
    if (a.segment == b.segment) {
        return {true, std::abs(da - db), a.segment, a.segment};
    }
    int x = a.segment;
    int y = b.segment;
    while (net.depth(x) > net.depth(y)) x = net.downstream(x);
    while (net.depth(y) > net.depth(x)) y = net.downstream(y);
    if (x == y) {
        const bool a_upstream = net.depth(a.segment) > net.depth(b.segment);
        return {true, std::abs(da - db), a_upstream ? a.segment : b.segment,
                a_upstream ? b.segment : a.segment};
    }
    while (x != y) {
        x = net.downstream(x);
        y = net.downstream(y);
    }
    const double confluence = net.base_distance(x) + net.segment(x).length;
    return {false, da + db - 2.0 * confluence, -1, -1};
}

}  // namespace

double stream_distance(const RiverNetwork& net, const NetworkLocation& a, const NetworkLocation& b) {
    return relate(net, a, b).distance;
}

bool flow_connected(const RiverNetwork& net, const NetworkLocation& a, const NetworkLocation& b) {
    return relate(net, a, b).connected;
}

double tailup_weight(const RiverNetwork& net, const NetworkLocation& a, const NetworkLocation& b) {
    const Relation r = relate(net, a, b);
    if (!r.connected) return 0.0;
    return std::sqrt(net.segment(r.upstream_segment).additive /
                     net.segment(r.downstream_segment).additive);
}

std::vector<NetworkPath> enumerate_paths(const RiverNetwork& net) {
    std::vector<int> heads;
    for (const auto& s : net.segments()) {
        if (net.is_headwater(s.id)) heads.push_back(s.id);
    }
    std::sort(heads.begin(), heads.end());
    std::vector<NetworkPath> paths;
    paths.reserve(heads.size());
    for (int h : heads) {
        NetworkPath p;
        for (int s = h; s != -1; s = net.downstream(s)) {
            p.segments.push_back(s);
            p.length += net.segment(s).length;
        }
        paths.push_back(std::move(p));
    }
    return paths;
}

NetworkLocation locate_on_path(const RiverNetwork& net, const NetworkPath& path, double upstream_distance) {
    if (path.segments.empty()) throw NetworkError("empty path");
    const double u = std::clamp(upstream_distance, 0.0, path.length);
    for (auto it = path.segments.rbegin(); it != path.segments.rend(); ++it) {
        const Segment& s = net.segment(*it);
        const double base = net.base_distance(*it);
        if (u <= base + s.length || std::next(it) == path.segments.rend()) {
            return {*it, std::clamp(u - base, 0.0, s.length)};
        }
    }
    return {path.segments.front(), net.segment(path.segments.front()).length};
}

nlohmann::json network_to_json(const RiverNetwork& net) {
    nlohmann::json j;
    j["segments"] = nlohmann::json::array();
    for (const auto& s : net.segments()) {
        j["segments"].push_back({{"id", s.id},
                                 {"parent", s.parent},
                                 {"child", s.child},
                                 {"length", s.length},
                                 {"additive", s.additive}});
    }
    j["outlet"] = net.outlet();
    nlohmann::json coords = nlohmann::json::object();
    for (const auto& [junction, xy] : net.coords()) {
        coords[std::to_string(junction)] = {xy[0], xy[1]};
    }
    j["coords"] = coords;
    return j;
}

RiverNetwork network_from_json(const nlohmann::json& j) {
    try {
        std::vector<Segment> segs;
        for (const auto& s : j.at("segments")) {
            segs.push_back({s.at("id").get<int>(), s.at("parent").get<int>(), s.at("child").get<int>(),
                            s.at("length").get<double>(), s.at("additive").get<double>()});
        }
        std::map<int, Point2> coords;
        if (j.contains("coords")) {
            for (const auto& [key, xy] : j.at("coords").items()) {
                coords[std::stoi(key)] = {xy.at(0).get<double>(), xy.at(1).get<double>()};
            }
        }
        return RiverNetwork(std::move(segs), j.at("outlet").get<int>(), std::move(coords));
    } catch (const nlohmann::json::exception& e) {
        throw NetworkError(std::string("malformed network JSON: ") + e.what());
    }
}

RiverNetwork load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NetworkError("cannot open network file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw NetworkError("cannot parse network file " + path.string() + ": " + e.what());
    }
    return network_from_json(j);
}

void save_network(const RiverNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw NetworkError("cannot write network file " + path.string());
    out << network_to_json(net).dump(2) << '\n';
}

}  // namespace boed
