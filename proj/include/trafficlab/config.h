#ifndef TRAFFICLAB_CONFIG_H
#define TRAFFICLAB_CONFIG_H

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "trafficlab/ddpg.h"
#include "trafficlab/influence.h"
#include "trafficlab/reward.h"
#include "trafficlab/types.h"

namespace trafficlab {

struct EdgeWeightOverride {
    GridPos agent;
    GridPos neighbor;
    double weight = 0.0;
};

// Fully resolved experiment configuration. Every field has a default; the
// loader rejects unknown keys and re-emits the resolved form as JSON.
struct ExperimentConfig {
    int rows = 1;
    int cols = 1;
    ArrivalModel arrival;
    int mainPassingRate = 16;
    int branchPassingRate = 4;
    int mainArrivalBound = 4;
    int branchArrivalBound = 1;
    std::vector<RoadKind> rowKinds;  // resolved to size rows
    std::vector<RoadKind> colKinds;  // resolved to size cols
    bool travelDelay = false;

    InfluenceMode influenceMode = InfluenceMode::None;
    std::optional<GridPos> influenceCenter;
    double selfishIndex = 0.0;
    std::vector<EdgeWeightOverride> edgeWeights;

    double queueNormalizer = 50.0;
    double rewardScale = 0.001;

    int episodes = 20;
    int stepsPerEpisode = 150;
    uint64_t seed = 1;
    std::string outputDir = "runs";
    std::string runName;  // derived from the config name when empty
    int checkpointEvery = 0;  // 0: final checkpoint only
    bool dumpTrajectory = false;

    LearnerConfig learner;
    std::string archName = "desk";  // desk | paper | custom
    int updateEvery = 1;

    GridTopology topology() const;
    SocialWeights socialWeights() const;
    InfluenceGraph influenceGraph() const;
    nlohmann::json toJson() const;

    // hash over the environment-determining fields (topology, arrivals,
    // seed, horizon) used to pair training runs with baselines
    uint64_t envHash() const;
};

// Accepts a file path, a preset name (resolved against $TRAFFICLAB_PRESET_DIR
// then ./presets), or "-" for all defaults. Overrides are dotted
// "key.path=value" strings applied after the file is read.
ExperimentConfig loadConfig(const std::string &pathOrPreset,
                            const std::vector<std::string> &overrides = {});

ExperimentConfig configFromJson(const nlohmann::json &doc);

void applyOverride(nlohmann::json &doc, const std::string &assignment);

void writeResolvedConfig(const ExperimentConfig &cfg,
                         const std::filesystem::path &runDir);

}  // namespace trafficlab

#endif
