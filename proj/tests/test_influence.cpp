#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "trafficlab/influence.h"

using namespace trafficlab;

namespace {

bool adjacent(const GridTopology &topo, int a, int b) {
    for (int m : topo.neighbors(a))
        if (m == b) return true;
    return false;
}

}  // namespace

TEST_CASE("3x3 influence graphs reproduce the endpoint facts") {
    GridTopology topo = GridTopology::make(3, 3);
    const int corners[] = {0, 2, 6, 8};
    const int center = 4;

    SUBCASE("inward: corner agents have no influencers") {
        InfluenceGraph g = buildInfluenceGraph(topo, InfluenceMode::Inward);
        for (int c : corners) CHECK(g.inDegree(c) == 0);
        CHECK(g.inDegree(center) == 4);
    }
    SUBCASE("outward: the center agent has no influencers") {
        InfluenceGraph g = buildInfluenceGraph(topo, InfluenceMode::Outward);
        CHECK(g.inDegree(center) == 0);
        for (int c : corners) CHECK(g.inDegree(c) == 2);
    }
    SUBCASE("fully connected: in-degree equals grid degree") {
        InfluenceGraph g =
            buildInfluenceGraph(topo, InfluenceMode::FullyConnected);
        CHECK(g.inDegree(center) == 4);
        for (int c : corners) CHECK(g.inDegree(c) == 2);
        CHECK(g.edgeCount() == 24);  // 12 adjacent pairs, both directions
    }
    SUBCASE("none: no edges at all") {
        InfluenceGraph g = buildInfluenceGraph(topo, InfluenceMode::None);
        for (int n = 0; n < 9; ++n) CHECK(g.inDegree(n) == 0);
    }
}

TEST_CASE("edge multiplicity per adjacent pair") {
    for (auto [rows, cols] : {std::pair{3, 3}, {1, 5}, {5, 3}}) {
        GridTopology topo = GridTopology::make(rows, cols);
        InfluenceGraph in = buildInfluenceGraph(topo, InfluenceMode::Inward);
        InfluenceGraph out = buildInfluenceGraph(topo, InfluenceMode::Outward);
        InfluenceGraph full =
            buildInfluenceGraph(topo, InfluenceMode::FullyConnected);
        for (int a = 0; a < topo.agentCount(); ++a) {
            for (int b : topo.neighbors(a)) {
                if (b < 0) continue;
                CHECK((in.hasEdge(a, b) ? 1 : 0) + (in.hasEdge(b, a) ? 1 : 0) == 1);
                CHECK((out.hasEdge(a, b) ? 1 : 0) + (out.hasEdge(b, a) ? 1 : 0) ==
                      1);
                CHECK(full.hasEdge(a, b));
                CHECK(full.hasEdge(b, a));
                // inward is exactly the reversal of outward
                CHECK(in.hasEdge(a, b) == out.hasEdge(b, a));
            }
            // edges never connect non-adjacent intersections
            for (int m : in.influencers(a)) CHECK(adjacent(topo, a, m));
            for (int m : out.influencers(a)) CHECK(adjacent(topo, a, m));
        }
    }
}

TEST_CASE("inward and outward need a center") {
    GridTopology even = GridTopology::make(2, 2);
    CHECK_THROWS_AS(buildInfluenceGraph(even, InfluenceMode::Inward),
                    ConfigError);
    CHECK_THROWS_AS(buildInfluenceGraph(even, InfluenceMode::Outward),
                    ConfigError);
    // explicit center unlocks even grids
    InfluenceGraph g =
        buildInfluenceGraph(even, InfluenceMode::Inward, GridPos{0, 0});
    CHECK(g.inDegree(even.index(0, 0)) == 2);
    CHECK(g.inDegree(even.index(1, 1)) == 0);
    CHECK_THROWS_AS(
        buildInfluenceGraph(even, InfluenceMode::Inward, GridPos{5, 0}),
        ConfigError);
    // fully connected and none never need one
    CHECK_NOTHROW(buildInfluenceGraph(even, InfluenceMode::FullyConnected));
    CHECK_NOTHROW(buildInfluenceGraph(even, InfluenceMode::None));
}

TEST_CASE("observation layout and dimensions") {
    GridTopology topo = GridTopology::make(3, 3);
    NetworkState state;
    state.intersections.assign(9, IntersectionState{});
    state.intersections[0].queues = {10, 0, 25, 5};
    state.intersections[0].phase = 2;
    std::vector<int> last(9, 0);

    SUBCASE("mode none gives dimension 8 for every agent") {
        InfluenceGraph g = buildInfluenceGraph(topo, InfluenceMode::None);
        for (int n = 0; n < 9; ++n) {
            CHECK(observationSize(n, g) == 8);
            CHECK(observe(n, state, last, g, 50.0).size() == 8);
        }
    }
    SUBCASE("fully connected corner agent sees 8 + 2 entries") {
        InfluenceGraph g =
            buildInfluenceGraph(topo, InfluenceMode::FullyConnected);
        CHECK(observationSize(0, g) == 10);
        auto obs = observe(0, state, last, g, 50.0);
        REQUIRE(obs.size() == 10);
        CHECK(obs[0] == doctest::Approx(0.2));   // west 10/50
        CHECK(obs[1] == doctest::Approx(0.0));
        CHECK(obs[2] == doctest::Approx(0.5));   // east 25/50
        CHECK(obs[3] == doctest::Approx(0.1));
        CHECK(obs[4] == 0.0);  // phase one-hot, phase = 2
        CHECK(obs[5] == 0.0);
        CHECK(obs[6] == 1.0);
        CHECK(obs[7] == 0.0);
        CHECK(obs[8] == 0.0);  // influencer actions start at zero
        CHECK(obs[9] == 0.0);
    }
    SUBCASE("influencer actions appear in row-major influencer order") {
        InfluenceGraph g =
            buildInfluenceGraph(topo, InfluenceMode::FullyConnected);
        std::vector<int> actions(9, 0);
        actions[1] = 1;  // east neighbor of agent 0
        actions[3] = 0;  // south neighbor of agent 0
        LastActionBuffer buf(9);
        buf.update(actions);
        auto obs = observe(0, state, buf.actions(), g, 50.0);
        CHECK(obs[8] == 1.0);  // influencer 1 comes before influencer 3
        CHECK(obs[9] == 0.0);
    }
    SUBCASE("bad inputs are rejected") {
        InfluenceGraph g = buildInfluenceGraph(topo, InfluenceMode::None);
        CHECK_THROWS_AS(observe(99, state, last, g, 50.0), InvalidArgument);
        CHECK_THROWS_AS(observe(0, state, last, g, 0.0), InvalidArgument);
    }
}

TEST_CASE("observation dimension is 8 plus in-degree under every mode") {
    GridTopology topo = GridTopology::make(3, 5);
    NetworkState state;
    state.intersections.assign(15, IntersectionState{});
    std::vector<int> last(15, 0);
    for (InfluenceMode mode :
         {InfluenceMode::None, InfluenceMode::Inward, InfluenceMode::Outward,
          InfluenceMode::FullyConnected}) {
        InfluenceGraph g = buildInfluenceGraph(topo, mode);
        for (int n = 0; n < 15; ++n)
            CHECK(observe(n, state, last, g, 50.0).size() ==
                  static_cast<size_t>(8 + g.inDegree(n)));
    }
}

TEST_CASE("last-action buffer semantics") {
    LastActionBuffer buf(3);
    CHECK(buf.actions() == std::vector<int>{0, 0, 0});
    buf.update({1, 0, 1});
    CHECK(buf.actions() == std::vector<int>{1, 0, 1});
    buf.update({0, 1, 0});
    CHECK(buf.actions() == std::vector<int>{0, 1, 0});
    CHECK_THROWS_AS(buf.update({1, 0}), InvalidArgument);
    buf.reset();
    CHECK(buf.actions() == std::vector<int>{0, 0, 0});
}
