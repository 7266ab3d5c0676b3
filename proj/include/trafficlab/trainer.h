#ifndef TRAFFICLAB_TRAINER_H
#define TRAFFICLAB_TRAINER_H

#include <filesystem>
#include <string>
#include <vector>

#include "trafficlab/config.h"

namespace trafficlab {

struct BaselinePolicy {
    enum class Kind { FixedCycle, Random, AlwaysSwitch };
    Kind kind = Kind::AlwaysSwitch;
    int stepsPerPhase = 4;      // FixedCycle
    bool neverSwitch = false;   // FixedCycle with k = inf
    double switchProbability = 0.5;  // Random

    // "always" | "fixed:<k>" | "fixed:inf" | "never" | "random:<p>"
    static BaselinePolicy parse(const std::string &spec);
    std::string name() const;
};

struct RunResult {
    std::filesystem::path runDir;
    std::vector<double> episodeUtility;     // per-episode mean group utility
    double finalMeanGroupUtility = 0.0;     // mean over the last 10% episodes
    std::vector<double> perAgentCongestion; // mean F per agent, same window
    std::vector<int> observationDims;
    double actorSaturationRate = 0.0;       // raw action in [0,.05] or [.95,1]
    int64_t transitionsPerAgent = 0;
};

// Full training loop: act with exploration, env step, influence-augmented
// next observations, reward adjustment, store, critic/actor updates, soft
// target updates. Writes metrics.csv (+ trajectory.csv, checkpoints) into
// runDir, which must exist.
RunResult trainRun(const ExperimentConfig &cfg,
                   const std::filesystem::path &runDir);

// Same episode/step budget and identical arrival streams under a hand-coded
// policy; logs the same metrics columns with zero losses.
RunResult baselineRun(const ExperimentConfig &cfg, const BaselinePolicy &policy,
                      const std::filesystem::path &runDir);

}  // namespace trafficlab

#endif
