#include "trafficlab/experiment.h"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "trafficlab/metrics.h"
#include "trafficlab/mlp.h"

namespace trafficlab {

namespace {

namespace fs = std::filesystem;

fs::path uniqueRunDir(const fs::path &root, const std::string &name) {
    fs::create_directories(root);
    fs::path dir = root / name;
    int suffix = 2;
    while (fs::exists(dir)) {
        dir = root / (name + "-" + std::to_string(suffix));
        ++suffix;
    }
    fs::create_directories(dir);
    return dir;
}

nlohmann::json baseSummary(const ExperimentConfig &cfg, const RunResult &res,
                           const std::string &kind) {
    nlohmann::json s;
    s["kind"] = kind;
    s["seed"] = cfg.seed;
    s["episodes"] = cfg.episodes;
    s["steps_per_episode"] = cfg.stepsPerEpisode;
    s["agents"] = cfg.rows * cfg.cols;
    s["influence_mode"] = influenceModeName(cfg.influenceMode);
    s["selfish_index"] = cfg.selfishIndex;
    s["env_hash"] = cfg.envHash();
    s["final_mean_group_utility"] = res.finalMeanGroupUtility;
    s["per_agent_congestion_mean"] = res.perAgentCongestion;
    s["observation_dims"] = res.observationDims;
    return s;
}

// deltas against sibling baseline runs over the identical arrival stream
void attachBaselineDeltas(nlohmann::json &summary, const fs::path &root,
                          const fs::path &selfDir, uint64_t envHash) {
    nlohmann::json deltas = nlohmann::json::object();
    std::error_code ec;
    for (const auto &entry : fs::directory_iterator(root, ec)) {
        if (!entry.is_directory() || entry.path() == selfDir) continue;
        if (!fs::exists(entry.path() / "summary.json")) continue;
        try {
            nlohmann::json other = readSummary(entry.path());
            if (other.value("kind", "") != "baseline") continue;
            if (other.value("env_hash", uint64_t{0}) != envHash) continue;
            double theirs = other.value("final_mean_group_utility", 0.0);
            double ours = summary["final_mean_group_utility"].get<double>();
            deltas[other.value("policy", entry.path().filename().string())] =
                ours - theirs;
        } catch (const Error &) {
            // unreadable sibling: not a baseline we can compare against
        }
    }
    if (!deltas.empty()) summary["baseline_deltas"] = std::move(deltas);
}

std::vector<std::string> splitValues(const std::string &csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string v;
    while (std::getline(ss, v, ',')) {
        if (!v.empty()) out.push_back(v);
    }
    if (out.empty()) throw InvalidArgument("no sweep values given");
    return out;
}

}  // namespace

fs::path resolveOutputRoot(const ExperimentConfig &cfg,
                           const std::string &overrideRoot) {
    if (!overrideRoot.empty()) return overrideRoot;
    if (const char *env = std::getenv("TRAFFICLAB_OUT"); env && *env)
        return env;
    return cfg.outputDir;
}

fs::path runExperiment(const std::string &configArg,
                       const std::vector<std::string> &overrides,
                       const std::string &outputRoot) {
    ExperimentConfig cfg = loadConfig(configArg, overrides);
    fs::path root = resolveOutputRoot(cfg, outputRoot);
    fs::path runDir = uniqueRunDir(
        root, cfg.runName + "-train-s" + std::to_string(cfg.seed));
    writeResolvedConfig(cfg, runDir);
    RunResult res = trainRun(cfg, runDir);
    nlohmann::json summary = baseSummary(cfg, res, "train");
    summary["actor_saturation_rate"] = res.actorSaturationRate;
    attachBaselineDeltas(summary, root, runDir, cfg.envHash());
    writeSummary(summary, runDir);
    return runDir;
}

fs::path runBaselineExperiment(const std::string &configArg,
                               const std::string &policySpec,
                               const std::vector<std::string> &overrides,
                               const std::string &outputRoot) {
    ExperimentConfig cfg = loadConfig(configArg, overrides);
    BaselinePolicy policy = BaselinePolicy::parse(policySpec);
    fs::path root = resolveOutputRoot(cfg, outputRoot);
    fs::path runDir =
        uniqueRunDir(root, cfg.runName + "-baseline-" + policy.name() + "-s" +
                               std::to_string(cfg.seed));
    writeResolvedConfig(cfg, runDir);
    RunResult res = baselineRun(cfg, policy, runDir);
    nlohmann::json summary = baseSummary(cfg, res, "baseline");
    summary["policy"] = policy.name();
    writeSummary(summary, runDir);
    return runDir;
}

fs::path runSweep(const std::string &configArg, const std::string &key,
                  const std::string &valuesCsv,
                  const std::vector<std::string> &overrides,
                  const std::string &outputRoot) {
    if (key.empty()) throw InvalidArgument("sweep key must be nonempty");
    std::vector<std::string> values = splitValues(valuesCsv);
    ExperimentConfig probe = loadConfig(configArg, overrides);
    fs::path root = resolveOutputRoot(probe, outputRoot);
    std::string keySlug = key;
    for (char &c : keySlug)
        if (c == '.') c = '_';
    fs::path sweepDir = uniqueRunDir(root, probe.runName + "-sweep-" + keySlug);

    std::ofstream table(sweepDir / "sweep_summary.csv");
    if (!table) throw IoError("cannot write sweep summary");
    table << key << ",run_dir,final_mean_group_utility\n";
    for (const std::string &value : values) {
        std::vector<std::string> ov = overrides;
        ov.push_back(key + "=" + value);
        ov.push_back("run_name=" + probe.runName + "-" + keySlug + "-" + value);
        fs::path run = runExperiment(configArg, ov, sweepDir.string());
        nlohmann::json summary = readSummary(run);
        table << value << "," << run.filename().string() << ","
              << formatDouble(summary.value("final_mean_group_utility", 0.0))
              << "\n";
    }
    return sweepDir;
}

GradCheckResult runGradCheck(uint64_t seed, int trials, double tolerance) {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    GradCheckResult result;
    result.trials = trials;
    RngStream rng(seed);
    for (int trial = 0; trial < trials; ++trial) {
        MlpLayout layout;
        int depth = static_cast<int>(rng.uniformInt(2, 4));
        for (int l = 0; l < depth; ++l)
            layout.sizes.push_back(static_cast<int>(rng.uniformInt(2, 8)));
        layout.output = trial % 2 == 0 ? OutputActivation::Linear
                                       : OutputActivation::SteepSigmoid;
        layout.steepness = 2.0;
        MlpNetwork net = MlpNetwork::randomInit(layout, rng);

        std::vector<double> input(net.inputSize());
        for (double &x : input) x = 2.0 * rng.u01() - 1.0;
        std::vector<double> upstream(net.outputSize());
        for (double &u : upstream) u = 2.0 * rng.u01() - 1.0;

        ForwardTrace trace;
        net.forward(input, trace);
        Gradients grads = net.zeroGradients();
        std::vector<double> inputGrad;
        net.backward(trace, upstream, grads, &inputGrad);

        auto lossAt = [&]() {
            std::vector<double> y = net.forward(input);
            double s = 0;
            for (size_t i = 0; i < y.size(); ++i) s += upstream[i] * y[i];
            return s;
        };
        const double h = 1e-5;
        auto check = [&](double *param, double analytic) {
            double saved = *param;
            *param = saved + h;
            double up = lossAt();
            *param = saved - h;
            double down = lossAt();
            *param = saved;
            double numeric = (up - down) / (2 * h);
            double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
            result.maxRelativeError = std::max(
                result.maxRelativeError, std::abs(analytic - numeric) / denom);
        };
        for (size_t l = 0; l < net.layers().size(); ++l) {
            auto &layer = net.layers()[l];
            for (size_t i = 0; i < layer.weights.data.size(); ++i)
                check(&layer.weights.data[i], grads.layers[l].weights.data[i]);
            for (size_t i = 0; i < layer.bias.size(); ++i)
                check(&layer.bias[i], grads.layers[l].bias[i]);
        }
        for (size_t i = 0; i < input.size(); ++i) {
            double saved = input[i];
            input[i] = saved + h;
            double up = lossAt();
            input[i] = saved - h;
            double down = lossAt();
            input[i] = saved;
            double numeric = (up - down) / (2 * h);
            double denom =
                std::max({std::abs(inputGrad[i]), std::abs(numeric), 1e-6});
            result.maxRelativeError = std::max(
                result.maxRelativeError, std::abs(inputGrad[i] - numeric) / denom);
        }
    }
    result.passed = result.maxRelativeError <= tolerance;
    return result;
}

}  // namespace trafficlab
