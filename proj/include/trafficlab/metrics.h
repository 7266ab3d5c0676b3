#ifndef TRAFFICLAB_METRICS_H
#define TRAFFICLAB_METRICS_H

#include <array>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "trafficlab/errors.h"

namespace trafficlab {

std::string formatDouble(double v);

// Append-only training log: one row per (episode, step, agent).
class MetricsWriter {
public:
    explicit MetricsWriter(const std::filesystem::path &path);
    void row(int episode, int step, int agent, double reward,
             double adjustedReward, double groupUtility, double criticLoss,
             double actorObjective, double noiseScale);

private:
    std::ofstream out;
};

// One row per (step, intersection): queue snapshot after the step.
class TrajectoryWriter {
public:
    explicit TrajectoryWriter(const std::filesystem::path &path);
    void row(int64_t step, int intersection, const std::array<int, 4> &queues,
             int phase, int action, double reward);

private:
    std::ofstream out;
};

void writeSummary(const nlohmann::json &summary,
                  const std::filesystem::path &runDir);
nlohmann::json readSummary(const std::filesystem::path &runDir);

}  // namespace trafficlab

#endif
