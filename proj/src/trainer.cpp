#include "trafficlab/trainer.h"

#include <cmath>
#include <memory>

#include "trafficlab/metrics.h"
#include "trafficlab/sim.h"

namespace trafficlab {

namespace {

struct EpisodeAccumulator {
    double utilitySum = 0.0;
    int steps = 0;
    void add(double groupUtil) {
        utilitySum += groupUtil;
        ++steps;
    }
    double mean() const { return steps ? utilitySum / steps : 0.0; }
};

int finalWindow(int episodes) { return std::max(1, (episodes + 9) / 10); }

// shared scaffolding for training and baseline runs
struct RunContext {
    const ExperimentConfig &cfg;
    GridTopology topo;
    InfluenceGraph graph;
    SocialWeights weights;
    TrafficSim sim;
    LastActionBuffer lastActions;
    std::unique_ptr<MetricsWriter> metrics;
    std::unique_ptr<TrajectoryWriter> trajectory;
    std::vector<EpisodeAccumulator> episodes;
    std::vector<double> congestionSum;  // per agent, final window only
    int64_t congestionSteps = 0;

    RunContext(const ExperimentConfig &config,
               const std::filesystem::path &runDir)
        : cfg(config),
          topo(config.topology()),
          graph(config.influenceGraph()),
          weights(config.socialWeights()),
          sim(topo, config.seed),
          lastActions(topo.agentCount()),
          metrics(std::make_unique<MetricsWriter>(runDir / "metrics.csv")),
          congestionSum(topo.agentCount(), 0.0) {
        if (config.dumpTrajectory)
            trajectory =
                std::make_unique<TrajectoryWriter>(runDir / "trajectory.csv");
        episodes.resize(config.episodes);
    }

    bool inFinalWindow(int episode) const {
        return episode >= cfg.episodes - finalWindow(cfg.episodes);
    }

    void logStep(int episode, int step, const std::vector<int> &actions,
                 const std::vector<double> &criticLoss,
                 const std::vector<double> &actorObjective, double noiseScale) {
        const NetworkState &state = sim.state();
        double util = groupUtility(state);
        episodes[episode].add(util);
        bool finalW = inFinalWindow(episode);
        for (int j = 0; j < topo.agentCount(); ++j) {
            double base = baseReward(state.intersections[j]);
            double adjusted = adjustedReward(j, state, weights);
            metrics->row(episode, step, j, base, adjusted, util, criticLoss[j],
                         actorObjective[j], noiseScale);
            if (finalW) congestionSum[j] += -base;
        }
        if (finalW) ++congestionSteps;
        if (trajectory) {
            int64_t globalStep =
                static_cast<int64_t>(episode) * cfg.stepsPerEpisode + step;
            for (int j = 0; j < topo.agentCount(); ++j) {
                const IntersectionState &s = state.intersections[j];
                trajectory->row(globalStep, j, s.queues, s.phase, actions[j],
                                baseReward(s));
            }
        }
    }

    RunResult finish(const std::filesystem::path &runDir) {
        RunResult res;
        res.runDir = runDir;
        for (const auto &e : episodes) res.episodeUtility.push_back(e.mean());
        int window = finalWindow(cfg.episodes);
        double sum = 0;
        for (int e = cfg.episodes - window; e < cfg.episodes; ++e)
            sum += res.episodeUtility[e];
        res.finalMeanGroupUtility = sum / window;
        for (double c : congestionSum)
            res.perAgentCongestion.push_back(
                congestionSteps ? c / static_cast<double>(congestionSteps) : 0.0);
        for (int j = 0; j < topo.agentCount(); ++j)
            res.observationDims.push_back(observationSize(j, graph));
        return res;
    }
};

}  // namespace

BaselinePolicy BaselinePolicy::parse(const std::string &spec) {
    BaselinePolicy p;
    if (spec == "always") {
        p.kind = Kind::AlwaysSwitch;
        return p;
    }
    if (spec == "never" || spec == "fixed:inf") {
        p.kind = Kind::FixedCycle;
        p.neverSwitch = true;
        return p;
    }
    if (spec.rfind("fixed:", 0) == 0) {
        p.kind = Kind::FixedCycle;
        try {
            p.stepsPerPhase = std::stoi(spec.substr(6));
        } catch (const std::exception &) {
            throw InvalidArgument("bad fixed-cycle policy spec '" + spec + "'");
        }
        if (p.stepsPerPhase < 1)
            throw InvalidArgument("fixed-cycle steps per phase must be >= 1");
        return p;
    }
    if (spec.rfind("random:", 0) == 0) {
        p.kind = Kind::Random;
        try {
            p.switchProbability = std::stod(spec.substr(7));
        } catch (const std::exception &) {
            throw InvalidArgument("bad random policy spec '" + spec + "'");
        }
        if (p.switchProbability < 0 || p.switchProbability > 1)
            throw InvalidArgument("random policy probability must lie in [0,1]");
        return p;
    }
    throw InvalidArgument("unknown baseline policy '" + spec +
                          "' (always | fixed:<k> | fixed:inf | random:<p>)");
}

std::string BaselinePolicy::name() const {
    switch (kind) {
        case Kind::AlwaysSwitch: return "always";
        case Kind::FixedCycle:
            return neverSwitch ? "fixed-inf"
                               : "fixed-" + std::to_string(stepsPerPhase);
        case Kind::Random: {
            std::string p = formatDouble(switchProbability);
            for (char &ch : p)
                if (ch == '.') ch = '_';
            return "random-" + p;
        }
    }
    return "policy";
}

RunResult trainRun(const ExperimentConfig &cfg,
                   const std::filesystem::path &runDir) {
    RunContext ctx(cfg, runDir);
    const int agents = ctx.topo.agentCount();

    std::vector<AgentLearner> learners;
    std::vector<RngStream> replayRngs;
    learners.reserve(agents);
    for (int j = 0; j < agents; ++j) {
        RngStream initRng = RngStream::derive(cfg.seed, "init", j);
        learners.emplace_back(observationSize(j, ctx.graph), cfg.learner,
                              initRng);
        replayRngs.push_back(RngStream::derive(cfg.seed, "replay", j));
    }

    auto checkpoint = [&](const std::string &label) {
        std::filesystem::path dir = runDir / "checkpoints" / label;
        std::filesystem::create_directories(dir);
        for (int j = 0; j < agents; ++j) {
            learners[j].actor().saveJson(
                dir / ("agent" + std::to_string(j) + "_actor.json"));
            learners[j].critic().saveJson(
                dir / ("agent" + std::to_string(j) + "_critic.json"));
        }
    };

    int64_t saturated = 0, rawCount = 0;
    std::vector<std::vector<double>> obs(agents), nextObs(agents);
    std::vector<int> actions(agents, 0);
    std::vector<double> criticLoss(agents, 0.0), actorObjective(agents, 0.0);

    for (int e = 0; e < cfg.episodes; ++e) {
        ctx.sim.reset(e);
        ctx.lastActions.reset();
        const double noiseScale =
            cfg.learner.ouSigma * std::pow(cfg.learner.noiseDecay, e);
        std::vector<RngStream> ouRngs;
        for (int j = 0; j < agents; ++j) {
            learners[j].resetNoise();
            learners[j].setNoiseScale(noiseScale);
            ouRngs.push_back(RngStream::derive(cfg.seed, "ou", j, e));
        }
        for (int t = 0; t < cfg.stepsPerEpisode; ++t) {
            for (int j = 0; j < agents; ++j) {
                obs[j] = observe(j, ctx.sim.state(), ctx.lastActions.actions(),
                                 ctx.graph, cfg.queueNormalizer);
                auto [action, raw] =
                    learners[j].selectAction(obs[j], true, ouRngs[j]);
                actions[j] = action;
                ++rawCount;
                if (raw <= 0.05 || raw >= 0.95) ++saturated;
            }
            ctx.sim.step(actions);
            ctx.lastActions.update(actions);
            const NetworkState &state = ctx.sim.state();
            for (int j = 0; j < agents; ++j) {
                nextObs[j] = observe(j, state, ctx.lastActions.actions(),
                                     ctx.graph, cfg.queueNormalizer);
                double adjusted = adjustedReward(j, state, ctx.weights);
                learners[j].buffer().push(Transition{
                    obs[j], static_cast<double>(actions[j]),
                    adjusted * cfg.rewardScale, nextObs[j]});
            }
            bool updateNow = t % cfg.updateEvery == 0;
            for (int j = 0; j < agents; ++j) {
                criticLoss[j] = 0.0;
                actorObjective[j] = 0.0;
                if (!updateNow ||
                    learners[j].buffer().size() <
                        static_cast<size_t>(cfg.learner.batchSize))
                    continue;
                auto batch = learners[j].buffer().sample(
                    cfg.learner.batchSize, replayRngs[j]);
                criticLoss[j] = learners[j].updateCritic(batch);
                actorObjective[j] = learners[j].updateActor(batch);
                learners[j].softUpdateTargets();
                if (!std::isfinite(criticLoss[j]) ||
                    !std::isfinite(actorObjective[j]))
                    throw DivergedError(
                        "training diverged (non-finite loss) at episode " +
                        std::to_string(e) + " step " + std::to_string(t) +
                        " agent " + std::to_string(j));
            }
            ctx.logStep(e, t, actions, criticLoss, actorObjective, noiseScale);
        }
        if (cfg.checkpointEvery > 0 && (e + 1) % cfg.checkpointEvery == 0)
            checkpoint("ep" + std::to_string(e + 1));
    }
    checkpoint("final");

    RunResult res = ctx.finish(runDir);
    res.actorSaturationRate =
        rawCount ? static_cast<double>(saturated) / rawCount : 0.0;
    res.transitionsPerAgent =
        agents ? static_cast<int64_t>(learners[0].buffer().size()) : 0;
    return res;
}

RunResult baselineRun(const ExperimentConfig &cfg, const BaselinePolicy &policy,
                      const std::filesystem::path &runDir) {
    RunContext ctx(cfg, runDir);
    const int agents = ctx.topo.agentCount();
    std::vector<int> actions(agents, 0);
    std::vector<int> dwell(agents, 0);
    const std::vector<double> zeros(agents, 0.0);

    for (int e = 0; e < cfg.episodes; ++e) {
        ctx.sim.reset(e);
        ctx.lastActions.reset();
        std::fill(dwell.begin(), dwell.end(), 0);
        RngStream policyRng = RngStream::derive(cfg.seed, "policy", e);
        for (int t = 0; t < cfg.stepsPerEpisode; ++t) {
            for (int j = 0; j < agents; ++j) {
                switch (policy.kind) {
                    case BaselinePolicy::Kind::AlwaysSwitch:
                        actions[j] = 1;
                        break;
                    case BaselinePolicy::Kind::FixedCycle:
                        if (policy.neverSwitch) {
                            actions[j] = 0;
                        } else if (dwell[j] + 1 >= policy.stepsPerPhase) {
                            actions[j] = 1;
                            dwell[j] = 0;
                        } else {
                            actions[j] = 0;
                            ++dwell[j];
                        }
                        break;
                    case BaselinePolicy::Kind::Random:
                        actions[j] =
                            policyRng.bernoulli(policy.switchProbability) ? 1 : 0;
                        break;
                }
            }
            ctx.sim.step(actions);
            ctx.lastActions.update(actions);
            ctx.logStep(e, t, actions, zeros, zeros, 0.0);
        }
    }
    return ctx.finish(runDir);
}

}  // namespace trafficlab
