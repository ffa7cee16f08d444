#ifndef COGRELAY_H
#define COGRELAY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status code returned by every entry point.
 */
typedef enum CrStatus {
  CR_STATUS_OK = 0,
  CR_STATUS_NULL_POINTER = 1,
  CR_STATUS_INVALID_ARGUMENT = 2,
  CR_STATUS_DEGENERATE = 3,
  CR_STATUS_NON_CONVERGENCE = 4,
  CR_STATUS_IO = 5,
  CR_STATUS_CONFIG = 6,
  CR_STATUS_MISSING_CONFIG = 7,
  CR_STATUS_PANIC = 8,
} CrStatus;

typedef enum CrFadingKind {
  CR_FADING_KIND_RAYLEIGH = 0,
  CR_FADING_KIND_NAKAGAMI = 1,
} CrFadingKind;

typedef struct CrCampaign CrCampaign;

typedef struct CrDecisionMatrix CrDecisionMatrix;

typedef struct CrSampleSet CrSampleSet;

/*
 Constraint thresholds. Powers in dBm, capacity in bits/s/Hz.
 */
typedef struct CrConstraintConfig {
  double i_th_dbm;
  double eps_i_out;
  double c_th;
  double eps_c_out;
  double noise_power_dbm;
} CrConstraintConfig;

/*
 SNR law of one link. `kind` holds a `CrFadingKind` value; `m` is ignored
 for Rayleigh.
 */
typedef struct CrSnrDist {
  uint32_t kind;
  double gamma_bar;
  double m;
} CrSnrDist;

typedef struct CrFadingFit {
  struct CrSnrDist dist;
  double mse;
  /*
   True when the shape estimate was raised to its minimum.
   */
  bool clamped;
} CrFadingFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread, or null if none.
 The pointer stays valid until the next failing call on the same thread.
 */
const char *cr_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *cr_version(void);

/*
 Default thresholds: −90 dBm, 0.1, 7.5 bits/s/Hz, 0.1, −119.5 dBm.
 */
struct CrConstraintConfig cr_constraint_config_default(void);

/*
 # Safety
 `out` must be null or valid for writes.
 */
enum CrStatus cr_log_distance_pl(double pl_d0, double d0, double n, double d, double *out);

/*
 # Safety
 `out` must be null or valid for writes.
 */
enum CrStatus cr_itu_r_pl(double f_mhz, double n, double l_floors, double d, double *out);

/*
 # Safety
 `out` must be null or valid for writes.
 */
enum CrStatus cr_winner2_pl(double f_ghz, double l_w, double n_w, double d, double *out);

/*
 Linear mean SNR from transmit power, path loss and noise power.

 # Safety
 `out` must be null or valid for writes.
 */
enum CrStatus cr_mean_snr_from_budget(double p_tx_dbm, double pl_db, double noise_dbm, double *out);

/*
 # Safety
 `dist` must be null or point to a valid `CrSnrDist`; `out` must be null or
 valid for writes.
 */
enum CrStatus cr_snr_cdf(const struct CrSnrDist *dist, double gamma, double *out);

/*
 # Safety
 As for [`cr_snr_cdf`].
 */
enum CrStatus cr_interference_cdf(double i_th_dbm,
                                  double noise_power_dbm,
                                  const struct CrSnrDist *dist,
                                  double *out);

/*
 # Safety
 As for [`cr_snr_cdf`].
 */
enum CrStatus cr_capacity_cdf(double c_th, const struct CrSnrDist *dist, double *out);

/*
 # Safety
 `dist` and `cfg` must be null or valid; `out` must be null or valid for writes.
 */
enum CrStatus cr_check_ic(const struct CrSnrDist *dist,
                          const struct CrConstraintConfig *cfg,
                          bool *out);

/*
 # Safety
 As for [`cr_check_ic`].
 */
enum CrStatus cr_check_cc(const struct CrSnrDist *dist,
                          const struct CrConstraintConfig *cfg,
                          bool *out);

/*
 Copies `len` linear SNR samples into a new sample set.

 # Safety
 `node_id` must be a NUL-terminated string, `samples` valid for `len`
 reads, `out` valid for writes.
 */
enum CrStatus cr_sample_set_new(const char *node_id,
                                const double *samples,
                                size_t len,
                                struct CrSampleSet **out);

/*
 Maximum-likelihood fit of `kind` (a `CrFadingKind` value) to the sample set.

 # Safety
 `set` must come from [`cr_sample_set_new`]; `out` valid for writes.
 */
enum CrStatus cr_sample_set_fit(const struct CrSampleSet *set,
                                uint32_t kind,
                                struct CrFadingFit *out);

/*
 # Safety
 `set` must be null or come from [`cr_sample_set_new`], and not be used afterwards.
 */
void cr_sample_set_free(struct CrSampleSet *set);

/*
 Decision matrix of `num_pr` PR laws against `num_id` ID laws.

 # Safety
 The arrays must be valid for their lengths; `cfg` valid; `out` valid for writes.
 */
enum CrStatus cr_decision_matrix_build(const struct CrSnrDist *pr_dists,
                                       size_t num_pr,
                                       const struct CrSnrDist *id_dists,
                                       size_t num_id,
                                       const struct CrConstraintConfig *cfg,
                                       struct CrDecisionMatrix **out);

/*
 # Safety
 `m` must be a live matrix handle; the out pointers valid for writes.
 */
enum CrStatus cr_decision_matrix_dims(const struct CrDecisionMatrix *m,
                                      size_t *num_pr,
                                      size_t *num_id);

/*
 Whether snapshot (`pr`, `id`) is enabled, both zero-based.

 # Safety
 `m` must be a live matrix handle; `out` valid for writes.
 */
enum CrStatus cr_decision_matrix_cell(const struct CrDecisionMatrix *m,
                                      size_t pr,
                                      size_t id,
                                      bool *out);

/*
 # Safety
 `m` must be a live matrix handle; `out` valid for writes.
 */
enum CrStatus cr_decision_matrix_enabled_count(const struct CrDecisionMatrix *m, size_t *out);

/*
 # Safety
 `m` must be null or a matrix handle, and not be used afterwards.
 */
void cr_decision_matrix_free(struct CrDecisionMatrix *m);

/*
 Campaign on the built-in 4 PR × 5 ID layout with the given seed.

 # Safety
 `out` must be valid for writes.
 */
enum CrStatus cr_campaign_from_preset(uint64_t seed, struct CrCampaign **out);

/*
 Campaign described by a config file.

 # Safety
 `path` must be a NUL-terminated string; `out` valid for writes.
 */
enum CrStatus cr_campaign_from_config(const char *path, struct CrCampaign **out);

/*
 Runs the campaign. `threads` = 0 uses the default pool. Results do not
 depend on the thread count.

 # Safety
 `c` must be a live campaign handle.
 */
enum CrStatus cr_campaign_run(struct CrCampaign *c, size_t threads);

/*
 Copy of the decision matrix of a finished run; free it separately.

 # Safety
 `c` must be a live campaign handle; `out` valid for writes.
 */
enum CrStatus cr_campaign_matrix(const struct CrCampaign *c, struct CrDecisionMatrix **out);

/*
 Writes the run's CSV files into `dir`, plus samples.csv when `with_samples`.

 # Safety
 `c` must be a live campaign handle; `dir` a NUL-terminated string.
 */
enum CrStatus cr_campaign_write(const struct CrCampaign *c, const char *dir, bool with_samples);

/*
 # Safety
 `c` must be null or a campaign handle, and not be used afterwards.
 */
void cr_campaign_free(struct CrCampaign *c);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COGRELAY_H */
