#include "trafficlab/reward.h"

#include <algorithm>

namespace trafficlab {

int64_t congestionCost(const std::array<int, 4> &queues) {
    int64_t f = 0;
    for (int q : queues) f += static_cast<int64_t>(q) * q;
    return f;
}

double baseReward(const IntersectionState &state) {
    return -static_cast<double>(congestionCost(state.queues));
}

double groupUtility(const NetworkState &state) {
    int64_t total = 0;
    for (const auto &s : state.intersections) total += congestionCost(s.queues);
    return -static_cast<double>(total);
}

SocialWeights SocialWeights::uniform(const GridTopology &topo,
                                     double selfishIndex) {
    if (selfishIndex < 0)
        throw InvalidArgument("selfish index must be >= 0");
    SocialWeights w;
    const int n = topo.agentCount();
    w.neighborSets.resize(n);
    w.neighborWeights.resize(n);
    for (int a = 0; a < n; ++a) {
        for (int m : topo.neighbors(a))
            if (m >= 0) w.neighborSets[a].push_back(m);
        std::sort(w.neighborSets[a].begin(), w.neighborSets[a].end());
        double per = w.neighborSets[a].empty()
                         ? 0.0
                         : selfishIndex / static_cast<double>(w.neighborSets[a].size());
        w.neighborWeights[a].assign(w.neighborSets[a].size(), per);
    }
    return w;
}

void SocialWeights::setWeight(int agent, int neighbor, double value) {
    if (agent < 0 || agent >= agentCount())
        throw InvalidArgument("unknown agent id " + std::to_string(agent));
    if (value < 0) throw InvalidArgument("social weights must be >= 0");
    auto &set = neighborSets[agent];
    auto it = std::find(set.begin(), set.end(), neighbor);
    if (it == set.end())
        throw InvalidArgument("agents " + std::to_string(agent) + " and " +
                              std::to_string(neighbor) + " are not adjacent");
    neighborWeights[agent][it - set.begin()] = value;
}

double SocialWeights::weight(int agent, int neighbor) const {
    if (agent < 0 || agent >= agentCount())
        throw InvalidArgument("unknown agent id " + std::to_string(agent));
    const auto &set = neighborSets[agent];
    auto it = std::find(set.begin(), set.end(), neighbor);
    if (it == set.end()) return 0.0;
    return neighborWeights[agent][it - set.begin()];
}

const std::vector<int> &SocialWeights::neighbors(int agent) const {
    if (agent < 0 || agent >= agentCount())
        throw InvalidArgument("unknown agent id " + std::to_string(agent));
    return neighborSets[agent];
}

double SocialWeights::selfishIndex(int agent) const {
    if (agent < 0 || agent >= agentCount())
        throw InvalidArgument("unknown agent id " + std::to_string(agent));
    double sum = 0;
    for (double w : neighborWeights[agent]) sum += w;
    return sum;
}

double adjustedReward(int agent, const NetworkState &state,
                      const SocialWeights &weights) {
    if (agent < 0 || agent >= static_cast<int>(state.intersections.size()) ||
        agent >= weights.agentCount())
        throw InvalidArgument("unknown agent id " + std::to_string(agent));
    double r = baseReward(state.intersections[agent]);
    const auto &set = weights.neighbors(agent);
    for (int m : set) {
        r -= weights.weight(agent, m) *
             static_cast<double>(congestionCost(state.intersections[m].queues));
    }
    return r;
}

}  // namespace trafficlab
