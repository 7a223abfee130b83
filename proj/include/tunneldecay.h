/* C interface to the tunneling-decay simulator.
 *
 * A model is created from a JSON experiment config (see the README for the
 * schema), queried pointwise, or asked to run a whole experiment that writes
 * CSV artifacts plus a timescale report. All handles are opaque; every
 * function returns a status code and leaves details in the handle's error
 * message. Results never depend on the thread count.
 */
#ifndef TUNNELDECAY_H
#define TUNNELDECAY_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define TD_API __declspec(dllexport)
#else
#define TD_API __attribute__((visibility("default")))
#endif

typedef enum td_status {
  TD_OK = 0,
  TD_ERR_INVALID_ARGUMENT = 1,
  TD_ERR_BAD_CONFIG = 2,
  TD_ERR_ACCURACY = 3,
  TD_ERR_PHASE = 4,
  TD_ERR_DIVERGENT = 5,
  TD_ERR_DEGENERATE = 6,
  TD_ERR_HORIZON = 7,
  TD_ERR_TRUNCATED = 8,
  TD_ERR_MEASUREMENT = 9,
  TD_ERR_IO = 10,
  TD_ERR_INTERNAL = 99
} td_status;

typedef struct td_model td_model;

TD_API const char *td_version(void);

/* Build a model from a JSON config string; *out_model owns all state.   */
TD_API td_status td_model_create(const char *config_json, td_model **out_model);
/* Same, reading the config from a file. */
TD_API td_status td_model_create_from_file(const char *config_path,
                                           td_model **out_model);
TD_API void td_model_destroy(td_model *model);

/* Message describing the last failure on this handle (or on creation when
 * the handle is NULL). Valid until the next call on the same handle. */
TD_API const char *td_last_error(const td_model *model);

/* Worker threads for subsequent calls (0 = hardware concurrency). Changes
 * speed only; results are bit-identical for any value. */
TD_API td_status td_model_set_threads(td_model *model, int32_t threads);

/* --- spectrum ---------------------------------------------------------- */
TD_API td_status td_bound_count(td_model *model, int32_t *count);
TD_API td_status td_bound_energy(td_model *model, int32_t index,
                                 double *energy);
/* Opening amplitude G(k) of the initial state over the barrier basis. */
TD_API td_status td_opening_amplitude(td_model *model, double k, double *g);

/* --- wavefunction ------------------------------------------------------ */
/* out[0..3] = Re psi, Im psi, Re dpsi/dx, Im dpsi/dx. Honors the configured
 * closing time (t routes to the open or the closed phase automatically). */
TD_API td_status td_sample(td_model *model, double x, double t,
                           double out[4]);
TD_API td_status td_density(td_model *model, double x, double t, double *rho);
TD_API td_status td_flux(td_model *model, double x, double t, double *j);
TD_API td_status td_well_probability(td_model *model, double t, double *w1);

/* --- experiments ------------------------------------------------------- */
/* mode: "eigen" | "decay" | "detector" | "closing-scan". Artifacts land in
 * out_dir (overrides the config's output_dir when non-NULL). */
TD_API td_status td_run(td_model *model, const char *mode,
                        const char *out_dir);

/* Timescale report of the last "decay" or "detector" run as JSON. Writes at
 * most buf_len bytes including the terminator; *needed gets the full size. */
TD_API td_status td_report_json(td_model *model, char *buf, size_t buf_len,
                                size_t *needed);

/* Bundled dataset of one reference figure: "fig2" .. "fig10". */
TD_API td_status td_reproduce_figure(const char *name, const char *out_dir,
                                     int32_t threads, char *errbuf,
                                     size_t errbuf_len);

#ifdef __cplusplus
}
#endif

#endif /* TUNNELDECAY_H */
