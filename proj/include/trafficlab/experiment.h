#ifndef TRAFFICLAB_EXPERIMENT_H
#define TRAFFICLAB_EXPERIMENT_H

#include <filesystem>
#include <string>
#include <vector>

#include "trafficlab/config.h"
#include "trafficlab/trainer.h"

namespace trafficlab {

// Output root precedence: explicit override > $TRAFFICLAB_OUT > config value.
std::filesystem::path resolveOutputRoot(const ExperimentConfig &cfg,
                                        const std::string &overrideRoot);

// Runs training into a fresh run directory under the output root; writes
// resolved_config.json, metrics.csv, checkpoints/ and summary.json (with
// deltas against any baseline runs that share the environment hash).
std::filesystem::path runExperiment(const std::string &configArg,
                                    const std::vector<std::string> &overrides,
                                    const std::string &outputRoot);

std::filesystem::path runBaselineExperiment(
    const std::string &configArg, const std::string &policySpec,
    const std::vector<std::string> &overrides, const std::string &outputRoot);

// One training run per value of the swept key; emits sweep_summary.csv.
std::filesystem::path runSweep(const std::string &configArg,
                               const std::string &key,
                               const std::string &valuesCsv,
                               const std::vector<std::string> &overrides,
                               const std::string &outputRoot);

struct GradCheckResult {
    int trials = 0;
    double maxRelativeError = 0.0;
    bool passed = false;
};

// Central finite-difference audit of the analytic gradients on random
// small networks.
GradCheckResult runGradCheck(uint64_t seed, int trials, double tolerance);

}  // namespace trafficlab

#endif
