#ifndef PMC_H
#define PMC_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>

/**
 * Status codes. The first four match the `pmc` exit codes.
 */
typedef enum PmcStatus {
  PMC_STATUS_OK = 0,
  PMC_STATUS_USAGE = 1,
  PMC_STATUS_PRECONDITION = 2,
  PMC_STATUS_NUMERICAL = 3,
  PMC_STATUS_NULL_POINTER = 4,
  PMC_STATUS_INVALID_UTF8 = 5,
  PMC_STATUS_OUT_OF_RANGE = 6,
  PMC_STATUS_PANIC = 7,
} PmcStatus;

typedef struct PmcPrescription PmcPrescription;

typedef struct PmcProfile PmcProfile;

typedef struct PmcRadialGraph PmcRadialGraph;

typedef struct PmcClassReport {
  bool in_c1k;
  bool in_c1k_even;
  bool even;
  double margin;
  double margin_even;
} PmcClassReport;

typedef struct PmcProfileSample {
  double s;
  double x;
  double z;
  double sigma;
  double nu;
} PmcProfileSample;

typedef struct PmcRadialSample {
  double r;
  double u;
  double phi;
  double nu;
} PmcRadialSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or an empty string. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *pmc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pmc_version(void);

/**
 * Parses a JSON prescription descriptor.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum PmcStatus pmc_prescription_parse(const char *json, struct PmcPrescription **out);

/**
 * # Safety
 * `h` must come from [`pmc_prescription_parse`] and not be used afterwards.
 */
void pmc_prescription_free(struct PmcPrescription *h);

/**
 * # Safety
 * `h` and `out` must be valid pointers.
 */
enum PmcStatus pmc_prescription_eval(const struct PmcPrescription *h, double y, double *out);

/**
 * # Safety
 * `h` and `out` must be valid pointers.
 */
enum PmcStatus pmc_validate_class(const struct PmcPrescription *h,
                                  int kappa_value,
                                  struct PmcClassReport *out);

/**
 * # Safety
 * `h` and `out` must be valid pointers.
 */
enum PmcStatus pmc_cylinder_radius(const struct PmcPrescription *h, int kappa_value, double *out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum PmcStatus pmc_sphere_diameter(double h0, int kappa_value, double *out);

/**
 * Builds the rotational sphere of `h` by shooting from the pole.
 *
 * # Safety
 * `h` and `out` must be valid pointers.
 */
enum PmcStatus pmc_sphere_build(const struct PmcPrescription *h,
                                int kappa_value,
                                double step,
                                struct PmcProfile **out);

/**
 * # Safety
 * `p` must come from [`pmc_sphere_build`] and not be used afterwards.
 */
void pmc_profile_free(struct PmcProfile *p);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a valid handle.
 */
size_t pmc_profile_len(const struct PmcProfile *p);

/**
 * # Safety
 * `p` and `out` must be valid pointers.
 */
enum PmcStatus pmc_profile_sample(const struct PmcProfile *p,
                                  size_t index,
                                  struct PmcProfileSample *out);

/**
 * Equator radius and total height of a profile.
 *
 * # Safety
 * All pointers must be valid.
 */
enum PmcStatus pmc_profile_summary(const struct PmcProfile *p, double *equator, double *height);

/**
 * The part of a sphere profile below its equator, as a radial graph.
 *
 * # Safety
 * `p` and `out` must be valid pointers.
 */
enum PmcStatus pmc_profile_lower_cap(const struct PmcProfile *p, struct PmcRadialGraph **out);

/**
 * Radial Dirichlet problem with zero boundary value on the disk of radius `radius`.
 *
 * # Safety
 * `h` and `out` must be valid pointers.
 */
enum PmcStatus pmc_solve_radial(const struct PmcPrescription *h,
                                int kappa_value,
                                double radius,
                                double step,
                                struct PmcRadialGraph **out);

/**
 * # Safety
 * `g` must come from a `pmc_*` constructor and not be used afterwards.
 */
void pmc_radial_free(struct PmcRadialGraph *g);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a valid handle.
 */
size_t pmc_radial_len(const struct PmcRadialGraph *g);

/**
 * # Safety
 * `g` and `out` must be valid pointers.
 */
enum PmcStatus pmc_radial_sample(const struct PmcRadialGraph *g,
                                 size_t index,
                                 struct PmcRadialSample *out);

/**
 * Max-norm residual of the graph equation for prescription `h`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum PmcStatus pmc_radial_residual(const struct PmcRadialGraph *g,
                                   const struct PmcPrescription *h,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PMC_H */
