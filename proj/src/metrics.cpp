#include "trafficlab/metrics.h"

#include <cstdio>

namespace trafficlab {

std::string formatDouble(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

MetricsWriter::MetricsWriter(const std::filesystem::path &path) : out(path) {
    if (!out) throw IoError("cannot write metrics file " + path.string());
    out << "episode,step,agent,reward,adjusted_reward,group_utility,"
           "critic_loss,actor_objective,noise_scale\n";
}

void MetricsWriter::row(int episode, int step, int agent, double reward,
                        double adjustedReward, double groupUtility,
                        double criticLoss, double actorObjective,
                        double noiseScale) {
    out << episode << ',' << step << ',' << agent << ','
        << formatDouble(reward) << ',' << formatDouble(adjustedReward) << ','
        << formatDouble(groupUtility) << ',' << formatDouble(criticLoss) << ','
        << formatDouble(actorObjective) << ',' << formatDouble(noiseScale)
        << '\n';
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path &path)
    : out(path) {
    if (!out) throw IoError("cannot write trajectory file " + path.string());
    out << "step,intersection,q_w,q_n,q_e,q_s,phase,action,reward\n";
}

void TrajectoryWriter::row(int64_t step, int intersection,
                           const std::array<int, 4> &queues, int phase,
                           int action, double reward) {
    out << step << ',' << intersection << ',' << queues[0] << ',' << queues[1]
        << ',' << queues[2] << ',' << queues[3] << ',' << phase << ','
        << action << ',' << formatDouble(reward) << '\n';
}

void writeSummary(const nlohmann::json &summary,
                  const std::filesystem::path &runDir) {
    std::ofstream out(runDir / "summary.json");
    if (!out) throw IoError("cannot write summary into " + runDir.string());
    out << summary.dump(2) << "\n";
}

nlohmann::json readSummary(const std::filesystem::path &runDir) {
    std::ifstream in(runDir / "summary.json");
    if (!in) throw IoError("no summary.json in " + runDir.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw IoError("malformed summary in " + runDir.string() + ": " +
                      e.what());
    }
    return doc;
}

}  // namespace trafficlab
