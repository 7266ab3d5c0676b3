#ifndef TRAFFICLAB_INFLUENCE_H
#define TRAFFICLAB_INFLUENCE_H

#include <optional>
#include <string>
#include <vector>

#include "trafficlab/types.h"

namespace trafficlab {

enum class InfluenceMode { None, Inward, Outward, FullyConnected };

InfluenceMode influenceModeFromString(const std::string &name);
std::string influenceModeName(InfluenceMode mode);

// Directed influencer -> influencee edges over grid-adjacent intersections.
class InfluenceGraph {
public:
    InfluenceMode mode() const { return graphMode; }
    int agentCount() const { return static_cast<int>(influencerSets.size()); }
    // influencers of agent n, sorted row-major by grid index
    const std::vector<int> &influencers(int agent) const;
    int inDegree(int agent) const;
    bool hasEdge(int from, int to) const;
    int edgeCount() const;

private:
    friend InfluenceGraph buildInfluenceGraph(const GridTopology &, InfluenceMode,
                                              std::optional<GridPos>);
    InfluenceMode graphMode = InfluenceMode::None;
    std::vector<std::vector<int>> influencerSets;
};

// Inward: edges run border -> center (each adjacent pair oriented toward the
// cell nearer the center), so corner agents have no influencers on odd grids.
// Outward is the exact reversal. FullyConnected keeps both directions.
// Inward/Outward need a center cell: odd dimensions, or an explicit one.
InfluenceGraph buildInfluenceGraph(const GridTopology &topo, InfluenceMode mode,
                                   std::optional<GridPos> center = std::nullopt);

// Holds every agent's previous action; reads during step t see step t-1.
class LastActionBuffer {
public:
    explicit LastActionBuffer(int agents) : actions_(agents, 0) {}
    void update(const std::vector<int> &actions);
    const std::vector<int> &actions() const { return actions_; }
    void reset() { std::fill(actions_.begin(), actions_.end(), 0); }

private:
    std::vector<int> actions_;
};

int observationSize(int agent, const InfluenceGraph &graph);

// [queues/normalizer (4), phase one-hot (4), influencer last actions]
std::vector<double> observe(int agent, const NetworkState &state,
                            const std::vector<int> &lastActions,
                            const InfluenceGraph &graph, double normalizer);

}  // namespace trafficlab

#endif
