#include "trafficlab/influence.h"

#include <algorithm>
#include <cstdlib>

namespace trafficlab {

InfluenceMode influenceModeFromString(const std::string &name) {
    if (name == "none") return InfluenceMode::None;
    if (name == "inward") return InfluenceMode::Inward;
    if (name == "outward") return InfluenceMode::Outward;
    if (name == "full") return InfluenceMode::FullyConnected;
    throw ConfigError("unknown influence_mode '" + name +
                      "' (expected none|inward|outward|full)");
}

std::string influenceModeName(InfluenceMode mode) {
    switch (mode) {
        case InfluenceMode::None: return "none";
        case InfluenceMode::Inward: return "inward";
        case InfluenceMode::Outward: return "outward";
        case InfluenceMode::FullyConnected: return "full";
    }
    return "none";
}

const std::vector<int> &InfluenceGraph::influencers(int agent) const {
    if (agent < 0 || agent >= agentCount())
        throw InvalidArgument("unknown agent id " + std::to_string(agent));
    return influencerSets[agent];
}

int InfluenceGraph::inDegree(int agent) const {
    return static_cast<int>(influencers(agent).size());
}

bool InfluenceGraph::hasEdge(int from, int to) const {
    const auto &set = influencers(to);
    return std::find(set.begin(), set.end(), from) != set.end();
}

int InfluenceGraph::edgeCount() const {
    int total = 0;
    for (const auto &set : influencerSets) total += static_cast<int>(set.size());
    return total;
}

InfluenceGraph buildInfluenceGraph(const GridTopology &topo, InfluenceMode mode,
                                   std::optional<GridPos> center) {
    InfluenceGraph g;
    g.graphMode = mode;
    g.influencerSets.assign(topo.agentCount(), {});
    if (mode == InfluenceMode::None) return g;

    GridPos c{};
    if (mode != InfluenceMode::FullyConnected) {
        if (center) {
            c = *center;
            if (!topo.inGrid(c.row, c.col))
                throw ConfigError("influence_center lies outside the grid");
        } else if (topo.rows % 2 == 1 && topo.cols % 2 == 1) {
            c = {topo.rows / 2, topo.cols / 2};
        } else {
            throw ConfigError(
                "influence_mode " + influenceModeName(mode) +
                " needs odd grid dimensions or an explicit influence_center");
        }
    }

    auto distToCenter = [&](int n) {
        GridPos p = topo.pos(n);
        return std::abs(p.row - c.row) + std::abs(p.col - c.col);
    };

    for (int n = 0; n < topo.agentCount(); ++n) {
        for (int m : topo.neighbors(n)) {
            if (m < 0) continue;
            bool edgeFromM = false;  // m influences n?
            switch (mode) {
                case InfluenceMode::FullyConnected:
                    edgeFromM = true;
                    break;
                case InfluenceMode::Inward:
                    // adjacent cells differ by exactly 1 in distance-to-center
                    edgeFromM = distToCenter(m) > distToCenter(n);
                    break;
                case InfluenceMode::Outward:
                    edgeFromM = distToCenter(m) < distToCenter(n);
                    break;
                case InfluenceMode::None:
                    break;
            }
            if (edgeFromM) g.influencerSets[n].push_back(m);
        }
    }
    for (auto &set : g.influencerSets) std::sort(set.begin(), set.end());
    return g;
}

void LastActionBuffer::update(const std::vector<int> &actions) {
    if (actions.size() != actions_.size())
        throw InvalidArgument("expected " + std::to_string(actions_.size()) +
                              " actions, got " + std::to_string(actions.size()));
    actions_ = actions;
}

int observationSize(int agent, const InfluenceGraph &graph) {
    return 8 + graph.inDegree(agent);
}

std::vector<double> observe(int agent, const NetworkState &state,
                            const std::vector<int> &lastActions,
                            const InfluenceGraph &graph, double normalizer) {
    if (agent < 0 || agent >= static_cast<int>(state.intersections.size()))
        throw InvalidArgument("unknown agent id " + std::to_string(agent));
    if (normalizer <= 0) throw InvalidArgument("normalizer must be > 0");
    const IntersectionState &s = state.intersections[agent];
    std::vector<double> obs;
    obs.reserve(observationSize(agent, graph));
    for (int q : s.queues) obs.push_back(static_cast<double>(q) / normalizer);
    for (int p = 0; p < 4; ++p) obs.push_back(s.phase == p ? 1.0 : 0.0);
    for (int m : graph.influencers(agent))
        obs.push_back(static_cast<double>(lastActions.at(m)));
    return obs;
}

}  // namespace trafficlab
