#include "trafficlab/sim.h"

namespace trafficlab {

int stepLight(int phase, int action) {
    if (phase < 0 || phase > 3) throw InvalidArgument("phase out of range");
    if (action != 0 && action != 1) throw InvalidArgument("action must be 0 or 1");
    return (phase + action) % 4;
}

std::array<int, 4> computeDepartures(const IntersectionState &state, int ewRate,
                                     int nsRate) {
    std::array<int, 4> dep{0, 0, 0, 0};
    if (phaseServesEastWest(state.phase)) {
        dep[kWest] = std::min(state.queues[kWest], ewRate);
        dep[kEast] = std::min(state.queues[kEast], ewRate);
    } else if (phaseServesNorthSouth(state.phase)) {
        dep[kNorth] = std::min(state.queues[kNorth], nsRate);
        dep[kSouth] = std::min(state.queues[kSouth], nsRate);
    }
    return dep;
}

ArrivalField sampleArrivals(const GridTopology &topo, RngStream &rng) {
    ArrivalField field;
    field.perQueue.assign(topo.agentCount(), {0, 0, 0, 0});
    for (int n = 0; n < topo.agentCount(); ++n) {
        for (int i = 0; i < 4; ++i) {
            if (!topo.boundaryFed(n, i)) continue;
            int count = 0;
            if (topo.arrival.mode == ArrivalMode::Bernoulli) {
                double p = (i == kWest || i == kEast) ? topo.arrival.p1
                                                      : topo.arrival.p2;
                count = rng.bernoulli(p) ? 1 : 0;
            } else {
                count = static_cast<int>(
                    rng.uniformInt(0, topo.queueRoad(n, i).arrivalBound));
            }
            field.perQueue[n][i] = count;
            field.total += count;
        }
    }
    return field;
}

RoutedField routeVehicles(const std::vector<std::array<int, 4>> &departures,
                          const GridTopology &topo) {
    RoutedField out;
    out.internalArrivals.assign(topo.agentCount(), {0, 0, 0, 0});
    // travel direction per queue: west queue holds eastbound vehicles, etc.
    static constexpr int dRow[4] = {0, 1, 0, -1};
    static constexpr int dCol[4] = {1, 0, -1, 0};
    for (int n = 0; n < topo.agentCount(); ++n) {
        GridPos p = topo.pos(n);
        for (int i = 0; i < 4; ++i) {
            int count = departures[n][i];
            if (count == 0) continue;
            int r = p.row + dRow[i];
            int c = p.col + dCol[i];
            if (topo.inGrid(r, c))
                out.internalArrivals[topo.index(r, c)][i] += count;
            else
                out.exits += count;
        }
    }
    return out;
}

TrafficSim::TrafficSim(GridTopology topology, uint64_t seed)
    : topo(std::move(topology)), masterSeed(seed), rng(0) {
    reset(0);
}

void TrafficSim::reset(uint64_t episode) {
    st.intersections.assign(topo.agentCount(), IntersectionState{});
    st.time = 0;
    pending.assign(topo.agentCount(), {0, 0, 0, 0});
    rng = RngStream::derive(masterSeed, "env", episode);
}

void TrafficSim::setState(const NetworkState &state) {
    if (static_cast<int>(state.intersections.size()) != topo.agentCount())
        throw InvalidArgument("state has wrong intersection count");
    for (const auto &s : state.intersections) {
        if (s.phase < 0 || s.phase > 3)
            throw InvalidArgument("phase out of range");
        for (int q : s.queues)
            if (q < 0) throw InvalidArgument("queues must be >= 0");
    }
    st = state;
    pending.assign(topo.agentCount(), {0, 0, 0, 0});
}

StepStats TrafficSim::step(const std::vector<int> &actions) {
    const int n = topo.agentCount();
    if (static_cast<int>(actions.size()) != n)
        throw InvalidArgument("expected " + std::to_string(n) + " actions, got " +
                              std::to_string(actions.size()));

    std::vector<std::array<int, 4>> departures(n);
    for (int k = 0; k < n; ++k)
        departures[k] = computeDepartures(st.intersections[k],
                                          topo.ewPassingRate(k),
                                          topo.nsPassingRate(k));

    RoutedField routed = routeVehicles(departures, topo);
    ArrivalField external = sampleArrivals(topo, rng);

    const auto &incoming = topo.travelDelay ? pending : routed.internalArrivals;
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < 4; ++i) {
            st.intersections[k].queues[i] += incoming[k][i] -
                                             departures[k][i] +
                                             external.perQueue[k][i];
        }
    }
    if (topo.travelDelay) pending = routed.internalArrivals;

    for (int k = 0; k < n; ++k)
        st.intersections[k].phase = stepLight(st.intersections[k].phase, actions[k]);
    ++st.time;

    return StepStats{external.total, routed.exits};
}

int64_t TrafficSim::totalVehicles() const {
    int64_t total = 0;
    for (const auto &s : st.intersections)
        for (int q : s.queues) total += q;
    for (const auto &p : pending)
        for (int q : p) total += q;
    return total;
}

}  // namespace trafficlab
