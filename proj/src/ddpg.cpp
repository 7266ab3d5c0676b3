#include "trafficlab/ddpg.h"

#include <algorithm>
#include <cmath>

namespace trafficlab {

namespace {

MlpLayout actorLayout(int obsDim, const LearnerConfig &cfg) {
    MlpLayout l;
    l.sizes.push_back(obsDim);
    for (int h : cfg.hidden) l.sizes.push_back(h);
    l.sizes.push_back(1);
    l.output = OutputActivation::SteepSigmoid;
    l.steepness = cfg.steepness;
    return l;
}

MlpLayout criticLayout(int obsDim, const LearnerConfig &cfg) {
    MlpLayout l;
    l.sizes.push_back(obsDim + 1);  // observation plus scalar action
    for (int h : cfg.hidden) l.sizes.push_back(h);
    l.sizes.push_back(1);
    l.output = OutputActivation::Linear;
    return l;
}

std::vector<double> criticInput(const std::vector<double> &obs, double action) {
    std::vector<double> in;
    in.reserve(obs.size() + 1);
    in.insert(in.end(), obs.begin(), obs.end());
    in.push_back(action);
    return in;
}

}  // namespace

AgentLearner::AgentLearner(int obsDimension, const LearnerConfig &config,
                           RngStream &initRng)
    : obsDim(obsDimension),
      cfg(config),
      actorNet(MlpNetwork::randomInit(actorLayout(obsDimension, config), initRng)),
      criticNet(MlpNetwork::randomInit(criticLayout(obsDimension, config), initRng)),
      targetActorNet(actorNet),
      targetCriticNet(criticNet),
      actorOpt(actorNet),
      criticOpt(criticNet),
      replay(config.bufferCapacity),
      noise(config.ouTheta, config.ouMu, config.ouSigma) {
    if (cfg.gamma < 0 || cfg.gamma > 1) throw InvalidArgument("gamma must be in [0,1]");
    if (cfg.batchSize <= 0) throw InvalidArgument("batch size must be positive");
}

std::pair<int, double> AgentLearner::selectAction(const std::vector<double> &obs,
                                                  bool explore,
                                                  RngStream &noiseRng) {
    double raw = actorNet.forward(obs)[0];
    if (explore) raw += noise.sample(noiseRng);
    raw = std::clamp(raw, 0.0, 1.0);
    return {binarize(raw), raw};
}

std::vector<double> AgentLearner::criticTargets(
    std::span<const Transition *const> batch) const {
    if (batch.empty()) throw InvalidArgument("empty batch");
    std::vector<double> targets;
    targets.reserve(batch.size());
    for (const Transition *t : batch) {
        double nextAction = targetActorNet.forward(t->nextObservation)[0];
        double nextQ =
            targetCriticNet.forward(criticInput(t->nextObservation, nextAction))[0];
        targets.push_back(t->reward + cfg.gamma * nextQ);
    }
    return targets;
}

double AgentLearner::updateCritic(std::span<const Transition *const> batch) {
    if (batch.size() < 1) throw InvalidArgument("empty batch");
    std::vector<double> targets = criticTargets(batch);
    Gradients grads = criticNet.zeroGradients();
    ForwardTrace trace;
    const double invN = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    for (size_t i = 0; i < batch.size(); ++i) {
        const Transition *t = batch[i];
        double q = criticNet.forward(criticInput(t->observation, t->action), trace)[0];
        double residual = q - targets[i];
        loss += residual * residual * invN;
        criticNet.backward(trace, {2.0 * residual * invN}, grads);
    }
    criticOpt.step(criticNet, grads, cfg.criticLr);
    return loss;
}

double AgentLearner::updateActor(std::span<const Transition *const> batch) {
    if (batch.size() < 1) throw InvalidArgument("empty batch");
    Gradients actorGrads = actorNet.zeroGradients();
    Gradients criticScratch = criticNet.zeroGradients();
    ForwardTrace actorTrace, criticTrace;
    std::vector<double> inputGrad;
    const double invN = 1.0 / static_cast<double>(batch.size());
    double objective = 0.0;
    for (const Transition *t : batch) {
        double a = actorNet.forward(t->observation, actorTrace)[0];
        double q = criticNet.forward(criticInput(t->observation, a), criticTrace)[0];
        objective += q * invN;
        criticNet.backward(criticTrace, {invN}, criticScratch, &inputGrad);
        double dQda = inputGrad.back();  // action is the last critic input
        actorNet.backward(actorTrace, {-dQda}, actorGrads);  // negate to ascend
    }
    actorOpt.step(actorNet, actorGrads, cfg.actorLr);
    return objective;
}

void AgentLearner::softUpdateTargets() {
    softUpdate(targetActorNet, actorNet, cfg.tau);
    softUpdate(targetCriticNet, criticNet, cfg.tau);
}

}  // namespace trafficlab
