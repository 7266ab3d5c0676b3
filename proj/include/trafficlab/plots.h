#ifndef TRAFFICLAB_PLOTS_H
#define TRAFFICLAB_PLOTS_H

#include <filesystem>
#include <string>
#include <vector>

namespace trafficlab {

// Batch SVG emission from run directories (metrics.csv + resolved config):
//   learning_curve.svg     smoothed episode vs group utility, runs overlaid
//   congestion_<run>.svg   per-agent mean congestion bars, one per run
//   selfish_curve.svg      selfish index vs final utility, when >= 2 runs
//                          carry distinct selfish_index values
// Returns the paths written. Rejects missing or too-short metrics.
std::vector<std::filesystem::path> emitPlots(
    const std::vector<std::filesystem::path> &runDirs,
    const std::filesystem::path &outDir);

}  // namespace trafficlab

#endif
