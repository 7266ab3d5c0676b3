#include "trafficlab/trafficlab.h"

#include <cstring>
#include <fstream>

#include "trafficlab/equilibrium.h"
#include "trafficlab/experiment.h"
#include "trafficlab/metrics.h"
#include "trafficlab/plots.h"
#include "trafficlab/reward.h"
#include "trafficlab/sim.h"

namespace {

thread_local std::string g_lastError;

using trafficlab::ConfigError;
using trafficlab::DivergedError;
using trafficlab::InvalidArgument;
using trafficlab::IoError;

template <typename Fn>
int guarded(Fn &&fn) {
    try {
        fn();
        g_lastError.clear();
        return TL_OK;
    } catch (const InvalidArgument &e) {
        g_lastError = e.what();
        return TL_ERR_INVALID_ARGUMENT;
    } catch (const ConfigError &e) {
        g_lastError = e.what();
        return TL_ERR_CONFIG;
    } catch (const IoError &e) {
        g_lastError = e.what();
        return TL_ERR_IO;
    } catch (const DivergedError &e) {
        g_lastError = e.what();
        return TL_ERR_DIVERGED;
    } catch (const std::exception &e) {
        g_lastError = e.what();
        return TL_ERR_INTERNAL;
    } catch (...) {
        g_lastError = "unknown error";
        return TL_ERR_INTERNAL;
    }
}

void copyOut(const std::string &s, char *buf, size_t size) {
    if (!buf || size == 0) return;
    size_t n = std::min(s.size(), size - 1);
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
}

std::vector<std::string> collectOverrides(const char *const *overrides,
                                          size_t n) {
    std::vector<std::string> out;
    for (size_t i = 0; i < n; ++i) {
        if (!overrides || !overrides[i])
            throw InvalidArgument("null override string");
        out.emplace_back(overrides[i]);
    }
    return out;
}

std::string requireString(const char *s, const char *what) {
    if (!s) throw InvalidArgument(std::string(what) + " must not be null");
    return s;
}

}  // namespace

struct tl_sim {
    trafficlab::TrafficSim impl;
};

extern "C" {

const char *tl_version(void) { return "0.1.0"; }

const char *tl_status_name(int status) {
    switch (status) {
        case TL_OK: return "ok";
        case TL_ERR_INVALID_ARGUMENT: return "invalid_argument";
        case TL_ERR_CONFIG: return "config_error";
        case TL_ERR_IO: return "io_error";
        case TL_ERR_DIVERGED: return "diverged";
        case TL_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

const char *tl_last_error(void) { return g_lastError.c_str(); }

int tl_train(const char *config, const char *output_root,
             const char *const *overrides, size_t n_overrides, char *run_dir,
             size_t run_dir_size) {
    return guarded([&] {
        auto dir = trafficlab::runExperiment(
            requireString(config, "config"),
            collectOverrides(overrides, n_overrides),
            output_root ? output_root : "");
        copyOut(dir.string(), run_dir, run_dir_size);
    });
}

int tl_baseline(const char *config, const char *policy, const char *output_root,
                const char *const *overrides, size_t n_overrides, char *run_dir,
                size_t run_dir_size) {
    return guarded([&] {
        auto dir = trafficlab::runBaselineExperiment(
            requireString(config, "config"), requireString(policy, "policy"),
            collectOverrides(overrides, n_overrides),
            output_root ? output_root : "");
        copyOut(dir.string(), run_dir, run_dir_size);
    });
}

int tl_sweep(const char *config, const char *key, const char *values_csv,
             const char *output_root, const char *const *overrides,
             size_t n_overrides, char *sweep_dir, size_t sweep_dir_size) {
    return guarded([&] {
        auto dir = trafficlab::runSweep(
            requireString(config, "config"), requireString(key, "key"),
            requireString(values_csv, "values"),
            collectOverrides(overrides, n_overrides),
            output_root ? output_root : "");
        copyOut(dir.string(), sweep_dir, sweep_dir_size);
    });
}

int tl_equilibrium(double arrival_rate, double departure_rate, int period_max,
                   int with_deviations, const char *output_dir, char *report,
                   size_t report_size) {
    return guarded([&] {
        auto instance = trafficlab::DeterministicInstance::symmetric(
            1, arrival_rate, departure_rate);
        std::string text = trafficlab::renderEquilibriumReport(
            instance, period_max, with_deviations != 0);
        if (output_dir && *output_dir) {
            std::filesystem::path dir(output_dir);
            std::filesystem::create_directories(dir);
            std::ofstream out(dir / "report.txt");
            if (!out)
                throw IoError("cannot write report into " + dir.string());
            out << text;
            trafficlab::writeFrontierCsv(
                trafficlab::nashFeasibilityFrontier(instance, period_max),
                dir / "frontier.csv");
        }
        copyOut(text, report, report_size);
    });
}

int tl_gradcheck(uint64_t seed, int trials, double tolerance,
                 double *max_rel_error) {
    return guarded([&] {
        auto result = trafficlab::runGradCheck(seed, trials, tolerance);
        if (max_rel_error) *max_rel_error = result.maxRelativeError;
        if (!result.passed)
            throw trafficlab::Error(
                "gradient check failed: max relative error " +
                trafficlab::formatDouble(result.maxRelativeError) +
                " exceeds tolerance " + trafficlab::formatDouble(tolerance));
    });
}

int tl_plot(const char *const *run_dirs, size_t n_dirs, const char *out_dir) {
    return guarded([&] {
        std::vector<std::filesystem::path> dirs;
        for (size_t i = 0; i < n_dirs; ++i)
            dirs.emplace_back(requireString(run_dirs ? run_dirs[i] : nullptr,
                                            "run directory"));
        trafficlab::emitPlots(dirs,
                              requireString(out_dir, "output directory"));
    });
}

int tl_sim_create(const char *config, const char *const *overrides,
                  size_t n_overrides, tl_sim **out_sim) {
    return guarded([&] {
        if (!out_sim) throw InvalidArgument("out_sim must not be null");
        auto cfg = trafficlab::loadConfig(
            requireString(config, "config"),
            collectOverrides(overrides, n_overrides));
        *out_sim = new tl_sim{trafficlab::TrafficSim(cfg.topology(), cfg.seed)};
    });
}

void tl_sim_destroy(tl_sim *sim) { delete sim; }

int tl_sim_reset(tl_sim *sim, uint64_t episode) {
    return guarded([&] {
        if (!sim) throw InvalidArgument("null simulator handle");
        sim->impl.reset(episode);
    });
}

int tl_sim_agent_count(const tl_sim *sim, int *count) {
    return guarded([&] {
        if (!sim || !count) throw InvalidArgument("null argument");
        *count = sim->impl.agentCount();
    });
}

int tl_sim_step(tl_sim *sim, const int *actions, size_t n_actions) {
    return guarded([&] {
        if (!sim || !actions) throw InvalidArgument("null argument");
        std::vector<int> a(actions, actions + n_actions);
        sim->impl.step(a);
    });
}

int tl_sim_queues(const tl_sim *sim, int intersection, int queues[4]) {
    return guarded([&] {
        if (!sim || !queues) throw InvalidArgument("null argument");
        const auto &st = sim->impl.state();
        if (intersection < 0 ||
            intersection >= static_cast<int>(st.intersections.size()))
            throw InvalidArgument("intersection index out of range");
        for (int i = 0; i < 4; ++i)
            queues[i] = st.intersections[intersection].queues[i];
    });
}

int tl_sim_phase(const tl_sim *sim, int intersection, int *phase) {
    return guarded([&] {
        if (!sim || !phase) throw InvalidArgument("null argument");
        const auto &st = sim->impl.state();
        if (intersection < 0 ||
            intersection >= static_cast<int>(st.intersections.size()))
            throw InvalidArgument("intersection index out of range");
        *phase = st.intersections[intersection].phase;
    });
}

int tl_sim_time(const tl_sim *sim, int64_t *time) {
    return guarded([&] {
        if (!sim || !time) throw InvalidArgument("null argument");
        *time = sim->impl.state().time;
    });
}

int tl_sim_group_utility(const tl_sim *sim, double *utility) {
    return guarded([&] {
        if (!sim || !utility) throw InvalidArgument("null argument");
        *utility = trafficlab::groupUtility(sim->impl.state());
    });
}

}  // extern "C"
