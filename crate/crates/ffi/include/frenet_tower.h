#ifndef FRENET_TOWER_H
#define FRENET_TOWER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FtStatus {
  FT_STATUS_OK = 0,
  FT_STATUS_NULL_POINTER = 1,
  FT_STATUS_INVALID_UTF8 = 2,
  FT_STATUS_PANIC = 3,
  FT_STATUS_NON_FINITE = 10,
  FT_STATUS_INVALID_ARGUMENT = 11,
  FT_STATUS_SIGMA_UNDEFINED = 12,
  FT_STATUS_AXIS_UNDEFINED = 13,
  FT_STATUS_FRAME_COLLAPSE = 14,
  FT_STATUS_PROFILE_EVAL_ERROR = 15,
  FT_STATUS_NEGATIVE_CURVATURE = 16,
  FT_STATUS_INSUFFICIENT_SAMPLES = 17,
  FT_STATUS_NOT_REGULAR = 18,
  FT_STATUS_LEVEL_UNAVAILABLE = 19,
  FT_STATUS_UNCLASSIFIABLE = 20,
  FT_STATUS_NOT_NK_SLANT = 21,
  FT_STATUS_NK_SLANT_ONLY = 22,
  FT_STATUS_SYNTAX_ERROR = 23,
  FT_STATUS_UNKNOWN_IDENTIFIER = 24,
  FT_STATUS_ARITY_MISMATCH = 25,
  FT_STATUS_FORMAT_ERROR = 26,
  FT_STATUS_IO_ERROR = 27,
  FT_STATUS_OUT_OF_RANGE = 28,
} FtStatus;

typedef struct FtCurve FtCurve;

typedef struct FtProfile FtProfile;

typedef struct FtReport FtReport;

typedef struct FtTower FtTower;

typedef struct FtTolerances {
  double rel_tol;
  double abs_floor;
  double kappa_floor;
} FtTolerances;

typedef struct FtVec3 {
  double x;
  double y;
  double z;
} FtVec3;

typedef struct FtFrame {
  struct FtVec3 t;
  struct FtVec3 n;
  struct FtVec3 b;
} FtFrame;

/**
 * One sample of a framed curve. `sigma` is NaN where undefined.
 */
typedef struct FtSample {
  double s;
  struct FtVec3 point;
  struct FtFrame frame;
  double kappa;
  double tau;
  double sigma;
  bool degenerate;
} FtSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ft_version(void);

/**
 * Status of the last failed call on this thread, or `Ok`.
 */
enum FtStatus ft_last_error_code(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next `ft_*` call on this thread.
 */
const char *ft_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ft_string_free(char *s);

struct FtTolerances ft_tolerances_default(void);

/**
 * # Safety
 * `kappa` and `tau` must be NUL-terminated strings; `out` must be writable.
 */
enum FtStatus ft_profile_parse(const char *kappa, const char *tau, struct FtProfile **out);

/**
 * Profile κ = ω sin(μs+φ), τ = ω cos(μs+φ) on [s_min, s_max].
 *
 * # Safety
 * `out` must be writable.
 */
enum FtStatus ft_profile_precession(double omega,
                                    double mu,
                                    double phase,
                                    double s_min,
                                    double s_max,
                                    struct FtProfile **out);

/**
 * # Safety
 * `profile` must be a live handle; the out pointers must be writable.
 */
enum FtStatus ft_profile_eval(const struct FtProfile *profile,
                              double s,
                              double *out_kappa,
                              double *out_tau);

/**
 * # Safety
 * `profile` must come from `ft_profile_*` and not have been freed.
 */
void ft_profile_free(struct FtProfile *profile);

/**
 * Integrates the Frenet system over [s0, s1] with step h. NULL
 * `init_point` / `init_frame` mean the origin and the standard basis.
 *
 * # Safety
 * Pointers must be NULL or valid; `out` must be writable.
 */
enum FtStatus ft_integrate(const struct FtProfile *profile,
                           const struct FtVec3 *init_point,
                           const struct FtFrame *init_frame,
                           double s0,
                           double s1,
                           double h,
                           double kappa_floor,
                           struct FtCurve **out);

/**
 * Frame and curvatures estimated from `n` point samples.
 *
 * # Safety
 * `points` must point to `n` readable values; `out` must be writable.
 */
enum FtStatus ft_estimate(const struct FtVec3 *points,
                          size_t n,
                          bool closed,
                          double kappa_floor,
                          struct FtCurve **out);

/**
 * Number of samples, 0 for NULL.
 *
 * # Safety
 * `curve` must be NULL or a live handle.
 */
size_t ft_curve_len(const struct FtCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_curve_sample(const struct FtCurve *curve, size_t index, struct FtSample *out);

/**
 * Curve CSV text; release with `ft_string_free`.
 *
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_curve_to_csv(const struct FtCurve *curve, bool with_frames, char **out);

/**
 * # Safety
 * `curve` must come from this library and not have been freed.
 */
void ft_curve_free(struct FtCurve *curve);

/**
 * Builds levels 0..=depth from a copy of `curve`; stops early (without
 * error) at an unavailable level.
 *
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_tower_build(const struct FtCurve *curve,
                             int32_t depth,
                             struct FtTolerances tols,
                             struct FtTower **out);

/**
 * Number of built levels (depth + 1), 0 for NULL.
 *
 * # Safety
 * `tower` must be NULL or a live handle.
 */
size_t ft_tower_levels(const struct FtTower *tower);

/**
 * Copy of level `k`'s curve.
 *
 * # Safety
 * `tower` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_tower_level_curve(const struct FtTower *tower, size_t k, struct FtCurve **out);

/**
 * # Safety
 * `tower` must come from this library and not have been freed.
 */
void ft_tower_free(struct FtTower *tower);

/**
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_classify_basic(const struct FtCurve *curve,
                                struct FtTolerances tols,
                                struct FtReport **out);

/**
 * Tower to `depth`, then N_k-slant and constant precession detection, as
 * the `classify` command does.
 *
 * # Safety
 * `curve` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_classify(const struct FtCurve *curve,
                          int32_t depth,
                          struct FtTolerances tols,
                          struct FtReport **out);

/**
 * # Safety
 * `tower` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_detect_nk_slant(const struct FtTower *tower,
                                 struct FtTolerances tols,
                                 struct FtReport **out);

/**
 * # Safety
 * `tower` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_detect_nk_constant_precession(const struct FtTower *tower,
                                               struct FtTolerances tols,
                                               struct FtReport **out);

/**
 * Detected level, or -1 when the report has none.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
int32_t ft_report_nk_level(const struct FtReport *report);

/**
 * Writes θ and the unit axis; `OutOfRange` when the report has no axis.
 *
 * # Safety
 * `report` must be a live handle; the out pointers must be writable.
 */
enum FtStatus ft_report_axis(const struct FtReport *report,
                             double *out_theta,
                             struct FtVec3 *out_axis);

/**
 * Writes ω and μ; `OutOfRange` when the report carries no precession data.
 *
 * # Safety
 * `report` must be a live handle; the out pointers must be writable.
 */
enum FtStatus ft_report_precession(const struct FtReport *report,
                                   double *out_omega,
                                   double *out_mu);

/**
 * Report as JSON; release with `ft_string_free`.
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum FtStatus ft_report_to_json(const struct FtReport *report, char **out);

/**
 * # Safety
 * `report` must come from this library and not have been freed.
 */
void ft_report_free(struct FtReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRENET_TOWER_H */
