#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "trafficlab/reward.h"
#include "trafficlab/rng.h"

using namespace trafficlab;

namespace {

NetworkState stateFor(const GridTopology &topo) {
    NetworkState s;
    s.intersections.assign(topo.agentCount(), IntersectionState{});
    return s;
}

}  // namespace

TEST_CASE("congestion cost is the sum of squared queues") {
    CHECK(congestionCost({1, 2, 3, 4}) == 30);
    CHECK(congestionCost({0, 0, 0, 0}) == 0);
    CHECK(congestionCost({5, 0, 0, 0}) == 25);
}

TEST_CASE("base reward is the negated congestion cost") {
    IntersectionState s;
    s.queues = {1, 2, 3, 4};
    CHECK(baseReward(s) == -30.0);
    s.queues = {0, 0, 0, 0};
    CHECK(baseReward(s) == 0.0);
    s.queues = {10, 10, 10, 10};
    CHECK(baseReward(s) == -400.0);
}

TEST_CASE("group utility sums congestion over the network") {
    GridTopology topo = GridTopology::make(1, 3);
    NetworkState s = stateFor(topo);
    CHECK(groupUtility(s) == 0.0);
    s.intersections[1].queues = {1, 2, 3, 4};
    CHECK(groupUtility(s) == -30.0);
    s.intersections[0].queues = {1, 0, 0, 0};
    s.intersections[1].queues = {1, 0, 0, 0};
    s.intersections[2].queues = {0, 0, 0, 0};
    CHECK(groupUtility(s) == -2.0);
}

TEST_CASE("adjusted reward applies social tie weights to neighbors") {
    GridTopology topo = GridTopology::make(1, 3);
    NetworkState s = stateFor(topo);
    s.intersections[0].queues = {1, 3, 0, 0};  // F = 10
    s.intersections[1].queues = {1, 2, 3, 4};  // F = 30
    s.intersections[2].queues = {4, 2, 0, 0};  // F = 20

    SUBCASE("uniform weights 0.25 on both neighbors") {
        SocialWeights w = SocialWeights::uniform(topo, 0.5);
        CHECK(w.weight(1, 0) == doctest::Approx(0.25));
        CHECK(w.weight(1, 2) == doctest::Approx(0.25));
        CHECK(adjustedReward(1, s, w) == doctest::Approx(-37.5));
    }
    SUBCASE("zero weights reduce to the base reward") {
        SocialWeights w = SocialWeights::uniform(topo, 0.0);
        for (int n = 0; n < 3; ++n)
            CHECK(adjustedReward(n, s, w) == baseReward(s.intersections[n]));
    }
    SUBCASE("unknown agent is rejected") {
        SocialWeights w = SocialWeights::uniform(topo, 0.5);
        CHECK_THROWS_AS(adjustedReward(7, s, w), InvalidArgument);
        CHECK_THROWS_AS(w.weight(-1, 0), InvalidArgument);
    }
}

TEST_CASE("3x3 center agent with unit weights") {
    GridTopology topo = GridTopology::make(3, 3);
    NetworkState s = stateFor(topo);
    for (auto &inter : s.intersections) inter.queues = {1, 1, 1, 1};
    s.intersections[4].queues = {2, 2, 2, 2};
    SocialWeights w = SocialWeights::uniform(topo, 4.0);  // 1 per neighbor
    CHECK(w.selfishIndex(4) == doctest::Approx(4.0));
    CHECK(adjustedReward(4, s, w) == doctest::Approx(-32.0));
}

TEST_CASE("per-edge weight overrides") {
    GridTopology topo = GridTopology::make(1, 2);
    SocialWeights w = SocialWeights::uniform(topo, 0.0);
    w.setWeight(0, 1, 0.75);
    CHECK(w.weight(0, 1) == doctest::Approx(0.75));
    CHECK(w.weight(1, 0) == 0.0);
    CHECK(w.selfishIndex(0) == doctest::Approx(0.75));
    CHECK_THROWS_AS(w.setWeight(0, 1, -0.5), InvalidArgument);
    CHECK_THROWS_AS(w.setWeight(0, 0, 0.5), InvalidArgument);
    GridTopology wide = GridTopology::make(1, 3);
    SocialWeights w3 = SocialWeights::uniform(wide, 0.0);
    CHECK_THROWS_AS(w3.setWeight(0, 2, 0.5), InvalidArgument);  // not adjacent
}

TEST_CASE("adjusted reward is monotone in neighbor queues") {
    GridTopology topo = GridTopology::make(3, 3);
    SocialWeights w = SocialWeights::uniform(topo, 1.0);
    NetworkState s = stateFor(topo);
    RngStream rng(11);
    for (auto &inter : s.intersections)
        for (int i = 0; i < 4; ++i)
            inter.queues[i] = static_cast<int>(rng.uniformInt(0, 10));
    for (int trial = 0; trial < 200; ++trial) {
        int agent = static_cast<int>(rng.uniformInt(0, 8));
        const auto &neighbors = w.neighbors(agent);
        int m = neighbors[rng.uniformInt(0, neighbors.size() - 1)];
        double before = adjustedReward(agent, s, w);
        int qi = static_cast<int>(rng.uniformInt(0, 3));
        s.intersections[m].queues[qi] += 1;
        double after = adjustedReward(agent, s, w);
        CHECK(after <= before);
    }
}

TEST_CASE("sum of adjusted rewards with zero weights equals group utility") {
    GridTopology topo = GridTopology::make(2, 3);
    SocialWeights w = SocialWeights::uniform(topo, 0.0);
    NetworkState s = stateFor(topo);
    RngStream rng(13);
    for (auto &inter : s.intersections)
        for (int i = 0; i < 4; ++i)
            inter.queues[i] = static_cast<int>(rng.uniformInt(0, 12));
    double sum = 0;
    for (int n = 0; n < topo.agentCount(); ++n) sum += adjustedReward(n, s, w);
    CHECK(sum == doctest::Approx(groupUtility(s)));
}

TEST_CASE("doubling the weights doubles the neighbor penalty") {
    GridTopology topo = GridTopology::make(3, 3);
    NetworkState s = stateFor(topo);
    RngStream rng(17);
    for (auto &inter : s.intersections)
        for (int i = 0; i < 4; ++i)
            inter.queues[i] = static_cast<int>(rng.uniformInt(0, 9));
    SocialWeights w1 = SocialWeights::uniform(topo, 0.7);
    SocialWeights w2 = SocialWeights::uniform(topo, 1.4);
    for (int n = 0; n < 9; ++n) {
        double base = baseReward(s.intersections[n]);
        double p1 = base - adjustedReward(n, s, w1);
        double p2 = base - adjustedReward(n, s, w2);
        CHECK(p2 == doctest::Approx(2.0 * p1));
    }
}
