#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace boed {

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * One stream segment. Water flows from the upstream (child) junction to the
 * downstream (parent) junction. `additive` is the additive-flow value used
 * for tail-up weights and is constant along the segment.
 */
struct Segment {
    int id = 0;
    int parent = 0;  // downstream junction
    int child = 0;   // upstream junction
    double length = 0.0;
    double additive = 1.0;
};

/// A site on the network: segment plus distance above the segment's downstream end.
struct NetworkLocation {
    int segment = 0;
    double offset = 0.0;
};

/// Segments from a headwater down to the outlet, in flow order.
struct NetworkPath {
    std::vector<int> segments;
    double length = 0.0;
};

using Point2 = std::array<double, 2>;

/**
 * Dendritic river network: a tree of segments rooted at a single outlet.
 * Immutable after construction; the constructor validates the topology and
 * throws NetworkError on cycles, multiple outlets, dangling junctions,
 * non-positive lengths/additive values, or additive values that decrease
 * downstream.
 */
class RiverNetwork {
public:
    RiverNetwork(std::vector<Segment> segments, int outlet, std::map<int, Point2> coords = {});

    const std::vector<Segment>& segments() const noexcept { return segments_; }
    int outlet() const noexcept { return outlet_; }
    const std::map<int, Point2>& coords() const noexcept { return coords_; }
    std::size_t size() const noexcept { return segments_.size(); }

    bool has_segment(int id) const { return index_.count(id) != 0; }
    const Segment& segment(int id) const;
    /// Segment directly downstream of `id`, or -1 for the outlet segment.
    int downstream(int id) const;
    const std::vector<int>& upstream(int id) const;
    bool is_headwater(int id) const { return upstream(id).empty(); }
    int root_segment() const noexcept { return root_; }

    /// Distance along the network from the segment's downstream end to the outlet.
    double base_distance(int id) const;
    double distance_to_outlet(const NetworkLocation& loc) const;
    /// Number of segments between `id` and the outlet segment (root has depth 0).
    int depth(int id) const;

    /// Throws NetworkError if the segment is unknown or the offset is out of bounds.
    void check(const NetworkLocation& loc) const;

    /// 2-D position of a location, interpolated between junction coordinates.
    Point2 embed(const NetworkLocation& loc) const;

private:
    std::size_t idx(int id) const;

    std::vector<Segment> segments_;
    int outlet_;
    std::map<int, Point2> coords_;
    std::unordered_map<int, std::size_t> index_;
    std::vector<int> downstream_;
    std::vector<std::vector<int>> upstream_;
    std::vector<double> base_distance_;
    std::vector<int> depth_;
    int root_ = -1;
};

struct GeneratorOptions {
    double min_length = 0.1;
    double max_length = 0.4;
};

/**
 * Random dendritic network with exactly `segment_count` segments. Starting
 * from a single outlet segment, a uniformly chosen headwater is repeatedly
 * split into two tributaries (or extended by one segment when only one more
 * segment is needed). Additive values follow Shreve order.
 */
RiverNetwork generate_network(int segment_count, std::uint64_t seed, const GeneratorOptions& opts = {});

/// Hydrologic distance between two locations, measured along the network.
double stream_distance(const RiverNetwork& net, const NetworkLocation& a, const NetworkLocation& b);

/// True iff one location lies on the downstream route of the other.
bool flow_connected(const RiverNetwork& net, const NetworkLocation& a, const NetworkLocation& b);

/// sqrt(additive upstream / additive downstream) for flow-connected pairs, else 0.
double tailup_weight(const RiverNetwork& net, const NetworkLocation& a, const NetworkLocation& b);

/// One path per headwater segment, ordered by headwater id.
std::vector<NetworkPath> enumerate_paths(const RiverNetwork& net);

/// Location at `upstream_distance` above the outlet along `path` (clamped to the path).
NetworkLocation locate_on_path(const RiverNetwork& net, const NetworkPath& path, double upstream_distance);

nlohmann::json network_to_json(const RiverNetwork& net);
RiverNetwork network_from_json(const nlohmann::json& j);
RiverNetwork load_network(const std::filesystem::path& path);
void save_network(const RiverNetwork& net, const std::filesystem::path& path);

}  // namespace boed
