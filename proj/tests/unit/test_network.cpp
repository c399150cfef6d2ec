#include "boed/network.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>

using namespace boed;

namespace {

// Stem 0 (length 1, additive 2) with tributaries 1 (length 1) and 2 (length 2).
RiverNetwork y_network() {
    std::vector<Segment> segs = {
        {0, 0, 1, 1.0, 2.0},
        {1, 1, 2, 1.0, 1.0},
        {2, 1, 3, 2.0, 1.0},
    };
    return RiverNetwork(segs, 0, {{0, {0.0, 0.0}}, {1, {0.0, 1.0}}, {2, {-0.7, 1.7}}, {3, {1.4, 2.4}}});
}

}  // namespace

TEST(Network, YNetworkStructure) {
    const RiverNetwork net = y_network();
    EXPECT_EQ(net.root_segment(), 0);
    EXPECT_EQ(net.downstream(1), 0);
    EXPECT_EQ(net.downstream(0), -1);
    EXPECT_EQ(net.upstream(0), (std::vector<int>{1, 2}));
    EXPECT_TRUE(net.is_headwater(2));
    EXPECT_DOUBLE_EQ(net.base_distance(2), 1.0);
    EXPECT_DOUBLE_EQ(net.distance_to_outlet({2, 0.5}), 1.5);
}

TEST(Network, StreamDistanceCases) {
    const RiverNetwork net = y_network();
    EXPECT_DOUBLE_EQ(stream_distance(net, {2, 0.7}, {2, 0.7}), 0.0);
    EXPECT_DOUBLE_EQ(stream_distance(net, {2, 0.5}, {2, 1.75}), 1.25);
    // Siblings each 1.0 above the shared junction.
    EXPECT_DOUBLE_EQ(stream_distance(net, {1, 1.0}, {2, 1.0}), 2.0);
    // Tributary to stem.
    EXPECT_DOUBLE_EQ(stream_distance(net, {1, 0.5}, {0, 0.25}), 1.25);
}

TEST(Network, StreamDistanceOnLongSegment) {
    const RiverNetwork net({{0, 0, 1, 10.0, 1.0}}, 0);
    EXPECT_DOUBLE_EQ(stream_distance(net, {0, 2.0}, {0, 5.0}), 3.0);
}

TEST(Network, FlowConnection) {
    const RiverNetwork net = y_network();
    EXPECT_TRUE(flow_connected(net, {1, 0.3}, {1, 0.3}));
    EXPECT_TRUE(flow_connected(net, {1, 0.3}, {0, 0.9}));
    EXPECT_TRUE(flow_connected(net, {0, 0.9}, {2, 1.5}));
    EXPECT_FALSE(flow_connected(net, {1, 0.3}, {2, 0.3}));
}

TEST(Network, TailUpWeights) {
    const RiverNetwork net = y_network();
    EXPECT_DOUBLE_EQ(tailup_weight(net, {1, 0.4}, {1, 0.4}), 1.0);
    EXPECT_DOUBLE_EQ(tailup_weight(net, {1, 0.4}, {2, 0.4}), 0.0);
    EXPECT_DOUBLE_EQ(tailup_weight(net, {1, 0.4}, {0, 0.4}), std::sqrt(0.5));
    EXPECT_DOUBLE_EQ(tailup_weight(net, {0, 0.4}, {2, 0.4}), std::sqrt(0.5));

    const RiverNetwork chain({{0, 0, 1, 1.0, 8.0}, {1, 1, 2, 1.0, 2.0}}, 0);
    EXPECT_DOUBLE_EQ(tailup_weight(chain, {1, 0.5}, {0, 0.5}), 0.5);
}

TEST(Network, PathsOfYNetwork) {
    const RiverNetwork net = y_network();
    const auto paths = enumerate_paths(net);
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_EQ(paths[0].segments, (std::vector<int>{1, 0}));
    EXPECT_EQ(paths[1].segments, (std::vector<int>{2, 0}));
    EXPECT_DOUBLE_EQ(paths[1].length, 3.0);
    const NetworkLocation loc = locate_on_path(net, paths[1], 2.5);
    EXPECT_EQ(loc.segment, 2);
    EXPECT_DOUBLE_EQ(loc.offset, 1.5);
    const NetworkLocation low = locate_on_path(net, paths[1], 0.25);
    EXPECT_EQ(low.segment, 0);
    EXPECT_DOUBLE_EQ(low.offset, 0.25);
}

TEST(Network, RejectsInvalidNetworks) {
    EXPECT_THROW(RiverNetwork({}, 0), NetworkError);
    EXPECT_THROW(RiverNetwork({{0, 0, 1, -1.0, 1.0}}, 0), NetworkError);
    EXPECT_THROW(RiverNetwork({{0, 0, 1, 1.0, 1.0}, {0, 1, 2, 1.0, 1.0}}, 0), NetworkError);
    // Two roots.
    EXPECT_THROW(RiverNetwork({{0, 0, 1, 1.0, 1.0}, {1, 0, 2, 1.0, 1.0}}, 0), NetworkError);
    // Additive value falls downstream.
    EXPECT_THROW(RiverNetwork({{0, 0, 1, 1.0, 1.0}, {1, 1, 2, 1.0, 1.0}, {2, 1, 3, 1.0, 1.0}}, 0), NetworkError);
    // Cycle detached from the outlet.
    EXPECT_THROW(RiverNetwork({{0, 0, 1, 1.0, 1.0}, {1, 2, 3, 1.0, 1.0}, {2, 3, 2, 1.0, 1.0}}, 0), NetworkError);
}

TEST(Network, GeneratorSingleSegment) {
    const RiverNetwork net = generate_network(1, 99);
    EXPECT_EQ(net.size(), 1u);
    EXPECT_EQ(enumerate_paths(net).size(), 1u);
}

TEST(Network, GeneratorLargeTreeInvariants) {
    const RiverNetwork net = generate_network(300, 7);
    EXPECT_EQ(net.size(), 300u);
    int heads = 0;
    for (const auto& s : net.segments()) {
        EXPECT_GT(s.length, 0.0);
        double inflow = 0.0;
        for (int u : net.upstream(s.id)) inflow += net.segment(u).additive;
        if (net.is_headwater(s.id)) {
            ++heads;
            EXPECT_DOUBLE_EQ(s.additive, 1.0);
        } else {
            EXPECT_NEAR(s.additive, inflow, 1e-9);
        }
    }
    EXPECT_EQ(static_cast<int>(enumerate_paths(net).size()), heads);
}

TEST(Network, GeneratorDeterministic) {
    const auto a = network_to_json(generate_network(40, 3)).dump();
    const auto b = network_to_json(generate_network(40, 3)).dump();
    const auto c = network_to_json(generate_network(40, 4)).dump();
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Network, PathsCoverEverySegment) {
    const RiverNetwork net = generate_network(5, 1);
    const auto paths = enumerate_paths(net);
    std::set<int> seen;
    for (const auto& p : paths) {
        EXPECT_TRUE(net.is_headwater(p.segments.front()));
        EXPECT_EQ(p.segments.back(), net.root_segment());
        std::set<int> unique(p.segments.begin(), p.segments.end());
        EXPECT_EQ(unique.size(), p.segments.size());
        for (std::size_t k = 0; k + 1 < p.segments.size(); ++k) {
            EXPECT_EQ(net.downstream(p.segments[k]), p.segments[k + 1]);
        }
        seen.insert(p.segments.begin(), p.segments.end());
    }
    EXPECT_EQ(seen.size(), net.size());
}

TEST(Network, JsonRoundTrip) {
    const RiverNetwork net = generate_network(25, 11);
    const auto path = std::filesystem::temp_directory_path() / "boed_network_roundtrip.json";
    save_network(net, path);
    const RiverNetwork back = load_network(path);
    EXPECT_EQ(network_to_json(back).dump(), network_to_json(net).dump());
    std::filesystem::remove(path);
}

TEST(Network, MetricProperties) {
    const RiverNetwork net = generate_network(30, 5);
    const auto paths = enumerate_paths(net);
    std::vector<NetworkLocation> locs;
    for (std::size_t p = 0; p < paths.size(); ++p) {
        locs.push_back(locate_on_path(net, paths[p], 0.37 * paths[p].length));
        locs.push_back(locate_on_path(net, paths[p], 0.91 * paths[p].length));
    }
    for (const auto& a : locs) {
        for (const auto& b : locs) {
            EXPECT_NEAR(stream_distance(net, a, b), stream_distance(net, b, a), 1e-12);
            EXPECT_EQ(flow_connected(net, a, b), flow_connected(net, b, a));
            const double w = tailup_weight(net, a, b);
            EXPECT_GE(w, 0.0);
            EXPECT_LE(w, 1.0);
            for (const auto& c : locs) {
                EXPECT_LE(stream_distance(net, a, c), stream_distance(net, a, b) + stream_distance(net, b, c) + 1e-9);
            }
        }
    }
}
