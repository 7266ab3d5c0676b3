#ifndef TRAFFICLAB_REWARD_H
#define TRAFFICLAB_REWARD_H

#include <vector>

#include "trafficlab/types.h"

namespace trafficlab {

// F(X) = sum of squared queue lengths
int64_t congestionCost(const std::array<int, 4> &queues);

// r = -F(X)
double baseReward(const IntersectionState &state);

// negative total congestion over the whole network
double groupUtility(const NetworkState &state);

// Social tie weights w_nm over grid-adjacent pairs. The selfish index of
// agent n is the sum of its outgoing weights.
class SocialWeights {
public:
    // w_nm = selfishIndex / |M_n| for every neighbor of every agent
    static SocialWeights uniform(const GridTopology &topo, double selfishIndex);

    void setWeight(int agent, int neighbor, double w);
    double weight(int agent, int neighbor) const;
    const std::vector<int> &neighbors(int agent) const;
    double selfishIndex(int agent) const;
    int agentCount() const { return static_cast<int>(neighborSets.size()); }

private:
    std::vector<std::vector<int>> neighborSets;      // sorted by grid index
    std::vector<std::vector<double>> neighborWeights;
};

// Eq-style adjustment: own base reward minus weighted neighbor congestion
double adjustedReward(int agent, const NetworkState &state,
                      const SocialWeights &weights);

}  // namespace trafficlab

#endif
