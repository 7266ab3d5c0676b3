#ifndef TRAFFICLAB_SIM_H
#define TRAFFICLAB_SIM_H

#include <cstdint>
#include <vector>

#include "trafficlab/rng.h"
#include "trafficlab/types.h"

namespace trafficlab {

// Y(t+1) = (Y(t) + A(t)) mod 4
int stepLight(int phase, int action);

// Departures gated by phase, saturated by min(queue, rate).
// Phase 0 serves west/east at ewRate, phase 2 serves north/south at nsRate,
// yellows serve nothing.
std::array<int, 4> computeDepartures(const IntersectionState &state, int ewRate,
                                     int nsRate);

struct ArrivalField {
    std::vector<std::array<int, 4>> perQueue;  // zero on interior queues
    int64_t total = 0;
};

// External arrivals for every boundary-fed queue per the topology's model.
ArrivalField sampleArrivals(const GridTopology &topo, RngStream &rng);

struct RoutedField {
    std::vector<std::array<int, 4>> internalArrivals;
    int64_t exits = 0;
};

// Straight-through routing: west-queue departures join the eastern
// neighbor's west queue, etc.; off-grid hops are exits.
RoutedField routeVehicles(const std::vector<std::array<int, 4>> &departures,
                          const GridTopology &topo);

struct StepStats {
    int64_t externalArrivals = 0;
    int64_t exits = 0;
};

class TrafficSim {
public:
    TrafficSim(GridTopology topo, uint64_t seed);

    // all queues empty, all phases 0, time 0; re-derives the arrival stream
    // for the given episode so runs are reproducible episode by episode
    void reset(uint64_t episode = 0);

    // one action per intersection; returns per-step flow accounting
    StepStats step(const std::vector<int> &actions);

    const NetworkState &state() const { return st; }
    const GridTopology &topology() const { return topo; }
    int agentCount() const { return topo.agentCount(); }

    // scenario injection: replaces queues/phases/time, clears in-flight
    void setState(const NetworkState &state);

    // queued plus in-flight vehicles (exact conservation quantity)
    int64_t totalVehicles() const;

private:
    GridTopology topo;
    NetworkState st;
    std::vector<std::array<int, 4>> pending;  // in-flight when travelDelay
    uint64_t masterSeed;
    RngStream rng;
};

}  // namespace trafficlab

#endif
