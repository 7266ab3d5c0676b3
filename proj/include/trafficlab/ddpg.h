#ifndef TRAFFICLAB_DDPG_H
#define TRAFFICLAB_DDPG_H

#include <span>
#include <utility>

#include "trafficlab/mlp.h"
#include "trafficlab/ou_noise.h"
#include "trafficlab/replay.h"

namespace trafficlab {

struct LearnerConfig {
    double gamma = 0.99;
    double tau = 0.01;
    double actorLr = 1e-4;
    double criticLr = 1e-3;
    int batchSize = 64;
    size_t bufferCapacity = 100000;
    double ouTheta = 0.15;
    double ouMu = 0.0;
    double ouSigma = 0.3;
    double noiseDecay = 0.93;  // per-episode multiplier on the OU scale
    double steepness = 10.0;
    std::vector<int> hidden{64, 64, 32};
};

// One intersection's DDPG learner: actor/critic with target copies, replay
// buffer, OU exploration. The critic scores (observation, action) pairs.
class AgentLearner {
public:
    AgentLearner(int obsDim, const LearnerConfig &cfg, RngStream &initRng);

    // raw = clip(actor(obs) + noise, [0,1]); action = binarize(raw)
    std::pair<int, double> selectAction(const std::vector<double> &obs,
                                        bool explore, RngStream &noiseRng);

    // y_i = r_i + gamma * Q'(o'_i, mu'(o'_i)); no terminal masking
    std::vector<double> criticTargets(
        std::span<const Transition *const> batch) const;

    // one Adam step on mean squared error against fixed targets;
    // returns the pre-update loss
    double updateCritic(std::span<const Transition *const> batch);

    // ascends mean_i Q(o_i, mu(o_i)) through the critic's action gradient;
    // returns the pre-update objective estimate
    double updateActor(std::span<const Transition *const> batch);

    void softUpdateTargets();
    void resetNoise() { noise.reset(); }
    double noiseScale() const { return noise.scale(); }
    void setNoiseScale(double s) { noise.setScale(s); }

    ReplayBuffer &buffer() { return replay; }
    const ReplayBuffer &buffer() const { return replay; }

    MlpNetwork &actor() { return actorNet; }
    const MlpNetwork &actor() const { return actorNet; }
    MlpNetwork &critic() { return criticNet; }
    const MlpNetwork &critic() const { return criticNet; }
    MlpNetwork &targetActor() { return targetActorNet; }
    const MlpNetwork &targetActor() const { return targetActorNet; }
    MlpNetwork &targetCritic() { return targetCriticNet; }
    const MlpNetwork &targetCritic() const { return targetCriticNet; }

    int observationDim() const { return obsDim; }
    const LearnerConfig &config() const { return cfg; }

private:
    double criticValue(const MlpNetwork &critic, const MlpNetwork &actor,
                       const std::vector<double> &obs) const;

    int obsDim;
    LearnerConfig cfg;
    MlpNetwork actorNet, criticNet, targetActorNet, targetCriticNet;
    AdamOptimizer actorOpt, criticOpt;
    ReplayBuffer replay;
    OuNoise noise;
};

}  // namespace trafficlab

#endif
