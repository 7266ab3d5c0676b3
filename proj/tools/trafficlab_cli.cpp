// Command-line front end for the trafficlab shared library. Talks to the
// library exclusively through the C API so it doubles as a usage example
// for embedders.
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "trafficlab/trafficlab.h"

namespace {

std::vector<const char *> pointers(const std::vector<std::string> &v) {
    std::vector<const char *> out;
    out.reserve(v.size());
    for (const auto &s : v) out.push_back(s.c_str());
    return out;
}

int report(int status) {
    if (status != TL_OK)
        std::fprintf(stderr, "error (%s): %s\n", tl_status_name(status),
                     tl_last_error());
    return status;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"grid traffic signal control laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tl_version()));

    std::string config, outputRoot, policy = "random:0.5";
    std::vector<std::string> overrides;

    auto addCommon = [&](CLI::App *cmd) {
        cmd->add_option("config", config,
                        "config file, preset name, or '-' for defaults")
            ->required();
        cmd->add_option("--out", outputRoot,
                        "output root (default: $TRAFFICLAB_OUT, then the "
                        "config's output_dir)");
        cmd->add_option("--set", overrides,
                        "config override key.path=value (repeatable)");
    };

    CLI::App *train = app.add_subcommand("train", "train multi-agent DDPG");
    addCommon(train);

    CLI::App *baseline =
        app.add_subcommand("baseline", "run a hand-coded signal policy");
    addCommon(baseline);
    baseline->add_option("--policy", policy,
                         "always | fixed:<k> | fixed:inf | random:<p>");

    std::string sweepKey = "selfish_index", sweepValues;
    CLI::App *sweep =
        app.add_subcommand("sweep", "one training run per value of a key");
    addCommon(sweep);
    sweep->add_option("--key", sweepKey, "config key to sweep");
    sweep->add_option("--values", sweepValues, "comma-separated values")
        ->required();

    double arrivalRate = 1.0, departureRate = 4.0;
    int periodMax = 8;
    bool noDeviations = false;
    std::string eqOut;
    CLI::App *equilibrium = app.add_subcommand(
        "equilibrium", "deterministic stability and deviation analysis");
    equilibrium->add_option("--c", arrivalRate, "arrival rate per fed flow")
        ->required();
    equilibrium->add_option("--d", departureRate, "departures per green step")
        ->required();
    equilibrium->add_option("--pmax", periodMax, "max cyclic policy period");
    equilibrium->add_flag("--no-deviations", noDeviations,
                          "skip the 2-intersection deviation audit");
    equilibrium->add_option("--out", eqOut, "directory for report.txt and "
                                            "frontier.csv");

    uint64_t gcSeed = 1;
    int gcTrials = 25;
    double gcTol = 1e-4;
    CLI::App *gradcheck = app.add_subcommand(
        "gradcheck", "finite-difference audit of network gradients");
    gradcheck->add_option("--seed", gcSeed, "rng seed");
    gradcheck->add_option("--trials", gcTrials, "number of random networks");
    gradcheck->add_option("--tol", gcTol, "max relative error accepted");

    std::vector<std::string> plotDirs;
    std::string plotOut = "plots";
    CLI::App *plot = app.add_subcommand("plot", "emit SVG charts for runs");
    plot->add_option("run-dirs", plotDirs, "run directories")->required();
    plot->add_option("--out", plotOut, "output directory for images");

    CLI11_PARSE(app, argc, argv);

    char pathBuf[4096] = {0};
    auto ov = pointers(overrides);

    if (train->parsed()) {
        int rc = tl_train(config.c_str(),
                          outputRoot.empty() ? nullptr : outputRoot.c_str(),
                          ov.data(), ov.size(), pathBuf, sizeof(pathBuf));
        if (rc == TL_OK) std::printf("run directory: %s\n", pathBuf);
        return report(rc);
    }
    if (baseline->parsed()) {
        int rc = tl_baseline(config.c_str(), policy.c_str(),
                             outputRoot.empty() ? nullptr : outputRoot.c_str(),
                             ov.data(), ov.size(), pathBuf, sizeof(pathBuf));
        if (rc == TL_OK) std::printf("run directory: %s\n", pathBuf);
        return report(rc);
    }
    if (sweep->parsed()) {
        int rc = tl_sweep(config.c_str(), sweepKey.c_str(), sweepValues.c_str(),
                          outputRoot.empty() ? nullptr : outputRoot.c_str(),
                          ov.data(), ov.size(), pathBuf, sizeof(pathBuf));
        if (rc == TL_OK) std::printf("sweep directory: %s\n", pathBuf);
        return report(rc);
    }
    if (equilibrium->parsed()) {
        std::vector<char> text(1 << 16, 0);
        int rc = tl_equilibrium(arrivalRate, departureRate, periodMax,
                                noDeviations ? 0 : 1,
                                eqOut.empty() ? nullptr : eqOut.c_str(),
                                text.data(), text.size());
        if (rc == TL_OK) {
            std::fputs(text.data(), stdout);
            if (!eqOut.empty())
                std::printf("\nwrote %s/report.txt and %s/frontier.csv\n",
                            eqOut.c_str(), eqOut.c_str());
        }
        return report(rc);
    }
    if (gradcheck->parsed()) {
        double maxErr = 0;
        int rc = tl_gradcheck(gcSeed, gcTrials, gcTol, &maxErr);
        std::printf("gradcheck: %d networks, max relative error %.3g (%s)\n",
                    gcTrials, maxErr, rc == TL_OK ? "PASS" : "FAIL");
        return report(rc);
    }
    if (plot->parsed()) {
        auto dirs = pointers(plotDirs);
        int rc = tl_plot(dirs.data(), dirs.size(), plotOut.c_str());
        if (rc == TL_OK) std::printf("plots written to %s\n", plotOut.c_str());
        return report(rc);
    }
    return 0;
}
