/* trafficlab C API: grid traffic simulation and multi-agent DDPG training
 * behind a shared-library boundary. All functions return a tl_status code
 * (0 on success); tl_last_error() describes the most recent failure on the
 * calling thread. Handles are opaque and must be released with their
 * destroy function. */
#ifndef TRAFFICLAB_TRAFFICLAB_H
#define TRAFFICLAB_TRAFFICLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TRAFFICLAB_BUILD)
#define TL_API __declspec(dllexport)
#else
#define TL_API __declspec(dllimport)
#endif
#else
#define TL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
    TL_OK = 0,
    TL_ERR_INVALID_ARGUMENT = 1,
    TL_ERR_CONFIG = 2,
    TL_ERR_IO = 3,
    TL_ERR_DIVERGED = 4,
    TL_ERR_INTERNAL = 5
} tl_status;

TL_API const char *tl_version(void);
TL_API const char *tl_status_name(int status);
/* message for the last failed call on this thread; empty string if none */
TL_API const char *tl_last_error(void);

/* `config` is a JSON file path, a preset name (resolved against
 * $TRAFFICLAB_PRESET_DIR then ./presets), or "-" for all defaults.
 * `overrides` are "key.path=value" strings applied on top, may be NULL.
 * `output_root` may be NULL/empty: $TRAFFICLAB_OUT then the config's
 * output_dir decide. On success the created run directory path is copied
 * into run_dir (truncated if needed) when run_dir is non-NULL. */
TL_API int tl_train(const char *config, const char *output_root,
                    const char *const *overrides, size_t n_overrides,
                    char *run_dir, size_t run_dir_size);

/* policy: "always" | "fixed:<k>" | "fixed:inf" | "random:<p>" */
TL_API int tl_baseline(const char *config, const char *policy,
                       const char *output_root, const char *const *overrides,
                       size_t n_overrides, char *run_dir, size_t run_dir_size);

/* values_csv: comma-separated override values for `key`, one run each */
TL_API int tl_sweep(const char *config, const char *key, const char *values_csv,
                    const char *output_root, const char *const *overrides,
                    size_t n_overrides, char *sweep_dir, size_t sweep_dir_size);

/* Deterministic-instance analysis: stability of the always-switch policy at
 * arrival rate c and green departure rate d, the cycle-length feasibility
 * frontier up to period_max, and (if with_deviations) the brute-force
 * unilateral-deviation audit on the 2-intersection line. Writes report.txt
 * and frontier.csv into output_dir (unless NULL/empty) and copies the
 * human-readable report into `report` when non-NULL. */
TL_API int tl_equilibrium(double arrival_rate, double departure_rate,
                          int period_max, int with_deviations,
                          const char *output_dir, char *report,
                          size_t report_size);

/* Finite-difference audit of the network gradients. *max_rel_error receives
 * the worst relative error (may be NULL). Fails with TL_ERR_INTERNAL if the
 * error exceeds tolerance. */
TL_API int tl_gradcheck(uint64_t seed, int trials, double tolerance,
                        double *max_rel_error);

/* Emit SVG plots for the given run directories into out_dir. */
TL_API int tl_plot(const char *const *run_dirs, size_t n_dirs,
                   const char *out_dir);

/* ---- simulator handle (for embedding) ---- */
typedef struct tl_sim tl_sim;

TL_API int tl_sim_create(const char *config, const char *const *overrides,
                         size_t n_overrides, tl_sim **out_sim);
TL_API void tl_sim_destroy(tl_sim *sim);
/* empty queues, phases 0, time 0; episode selects the arrival stream */
TL_API int tl_sim_reset(tl_sim *sim, uint64_t episode);
TL_API int tl_sim_agent_count(const tl_sim *sim, int *count);
/* one action (0 continue / 1 switch) per intersection, row-major */
TL_API int tl_sim_step(tl_sim *sim, const int *actions, size_t n_actions);
/* queues in west, north, east, south order */
TL_API int tl_sim_queues(const tl_sim *sim, int intersection, int queues[4]);
TL_API int tl_sim_phase(const tl_sim *sim, int intersection, int *phase);
TL_API int tl_sim_time(const tl_sim *sim, int64_t *time);
/* negative total squared queue length over the network */
TL_API int tl_sim_group_utility(const tl_sim *sim, double *utility);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif
