/* C interface for the bellwave simulation library.
 *
 * Conventions:
 *   - Handles are opaque; release them with the matching *_free, which
 *     tolerates NULL.
 *   - Every fallible call returns a bw_status; out-parameters are written
 *     only when the call returns BW_OK.
 *   - Two-qubit density matrices cross the boundary as 32 doubles:
 *     row-major 4x4 in the basis {gg, ge, eg, ee}, each entry an
 *     interleaved (re, im) pair.
 *   - Times and step sizes are in units of T1 = 1/gamma.
 *   - The library never unwinds across this boundary; internal panics are
 *     reported as BW_ERR_PANIC.
 */

#ifndef BELLWAVE_H
#define BELLWAVE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bw_status {
  BW_OK = 0,
  BW_ERR_NULL = 1,
  BW_ERR_BAD_PARAM = 2,
  BW_ERR_BAD_STATE = 3,
  BW_ERR_STEP_TOO_LARGE = 4,
  BW_ERR_POSITIVITY_LOST = 5,
  BW_ERR_NUMERIC = 6,
  BW_ERR_EMPTY = 7,
  BW_ERR_OUT_OF_RANGE = 8,
  BW_ERR_PANIC = 9
} bw_status;

/* Waveguide parity at the qubit spacing: even (0) or odd (1). */
#define BW_PARITY_EVEN 0
#define BW_PARITY_ODD 1

/* Measurement unraveling: photon counting (0) or homodyne (1). */
#define BW_MODE_JUMP 0
#define BW_MODE_HOMODYNE 1

/* Detector click channels. */
#define BW_CHANNEL_LEFT 0
#define BW_CHANNEL_RIGHT 1

typedef struct bw_model bw_model;
typedef struct bw_trajectory bw_trajectory;
typedef struct bw_ensemble bw_ensemble;

/* Library version as a static NUL-terminated string. */
const char *bw_version(void);

/* Static name for a status code ("ok", "null_pointer", ...). */
const char *bw_status_name(bw_status status);

/* Builds a model. gamma must be positive, efficiencies in [0, 1],
 * parity BW_PARITY_EVEN or BW_PARITY_ODD. On BW_OK, *out receives a
 * handle owned by the caller. */
bw_status bw_model_new(double gamma, double omega_tilde, int32_t parity,
                       double eta_l, double eta_r, bw_model **out);

void bw_model_free(bw_model *model);

/* Concurrence of a density matrix (32 interleaved doubles). */
bw_status bw_concurrence(const double *rho, double *out);

/* Solves the unconditioned master equation from rho0 and writes the
 * concurrence at the round(t_max/dt) + 1 grid points. Fails with
 * BW_ERR_OUT_OF_RANGE if capacity is too small; *written receives the
 * number of points produced. */
bw_status bw_lindblad_evolve(const bw_model *model, const double *rho0,
                             double dt, double t_max, double *concurrence_out,
                             size_t capacity, size_t *written);

/* Simulates one conditioned trajectory (mode BW_MODE_JUMP or
 * BW_MODE_HOMODYNE) on the grid t_i = i * dt. */
bw_status bw_trajectory_run(const bw_model *model, const double *rho0,
                            int32_t mode, double dt, double t_max, uint64_t seed,
                            bw_trajectory **out);

void bw_trajectory_free(bw_trajectory *traj);

/* Number of grid points in the record (0 for NULL). */
size_t bw_trajectory_len(const bw_trajectory *traj);

bw_status bw_trajectory_time(const bw_trajectory *traj, size_t i, double *out);

bw_status bw_trajectory_concurrence(const bw_trajectory *traj, size_t i,
                                    double *out);

/* Conditioned state at grid point i, written as 32 interleaved doubles. */
bw_status bw_trajectory_state(const bw_trajectory *traj, size_t i,
                              double *rho_out);

/* Number of detector clicks in the record (0 for NULL or homodyne mode). */
size_t bw_trajectory_click_count(const bw_trajectory *traj);

/* Click i: grid time and channel (BW_CHANNEL_LEFT or BW_CHANNEL_RIGHT). */
bw_status bw_trajectory_click(const bw_trajectory *traj, size_t i,
                              double *t_out, int32_t *channel_out);

/* Runs n_trajectories independent trajectories seeded from master_seed and
 * aggregates them. workers = 0 uses all cores; results are identical for
 * any worker count. */
bw_status bw_ensemble_run(const bw_model *model, const double *rho0,
                          int32_t mode, double dt, double t_max,
                          size_t n_trajectories, uint64_t master_seed,
                          size_t workers, bw_ensemble **out);

void bw_ensemble_free(bw_ensemble *ens);

/* Number of grid points in the aggregated curves (0 for NULL). */
size_t bw_ensemble_len(const bw_ensemble *ens);

/* Ensemble-mean concurrence at grid point i, with its standard error. */
bw_status bw_ensemble_concurrence(const bw_ensemble *ens, size_t i,
                                  double *mean_out, double *stderr_out);

/* Fraction of trajectories settled into the dark Bell state, with a 95%
 * bootstrap interval. */
bw_status bw_ensemble_dark_fraction(const bw_ensemble *ens, double *fraction_out,
                                    double *ci_low_out, double *ci_high_out);

/* Ensemble-mean conditioned state at grid point i (32 interleaved doubles);
 * generally mixed. */
bw_status bw_ensemble_mean_state(const bw_ensemble *ens, size_t i,
                                 double *rho_out);

#ifdef __cplusplus
}
#endif

#endif /* BELLWAVE_H */
