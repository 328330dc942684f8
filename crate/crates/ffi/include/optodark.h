#ifndef OPTODARK_H
#define OPTODARK_H

#include <stdbool.h>
#include <stddef.h>

typedef enum {
  OD_STATUS_OK = 0,
  OD_STATUS_NULL_POINTER = 1,
  OD_STATUS_INVALID_ARGUMENT = 2,
  OD_STATUS_ASSUMPTION = 3,
  OD_STATUS_NUMERICAL = 4,
  OD_STATUS_SIZE_LIMIT = 5,
  OD_STATUS_BUFFER_TOO_SMALL = 6,
  OD_STATUS_PANIC = 7,
} OdStatus;

typedef enum {
  OD_ATOM_KIND_OSCILLATOR = 0,
  OD_ATOM_KIND_TWO_LEVEL = 1,
} OdAtomKind;

typedef enum {
  OD_CLASS_DARK = 0,
  OD_CLASS_QUASI_DARK = 1,
  OD_CLASS_BRIGHT = 2,
  OD_CLASS_DEGENERATE = 3,
} OdClass;

/**
 * Opaque model handle.
 */
typedef struct OdModel OdModel;

typedef struct {
  double re;
  double im;
} OdComplex;

typedef struct {
  double omega_a;
  double omega_b;
  double omega_c;
  OdComplex lambda;
  OdComplex xi;
  OdComplex kappa;
} OdParams;

/**
 * Standing assumptions 1 to 4; `margins[i] > 0` exactly when `holds[i]`.
 */
typedef struct {
  bool holds[4];
  double margins[4];
} OdAssumptions;

typedef struct {
  double eps[2];
  double m[2];
  OdComplex gamma[2];
} OdTwoMode;

typedef struct {
  double energies[3];
  double norms[3];
  bool interlaced;
} OdThreeMode;

/**
 * One-excitation eigenstate, amplitudes ordered (atom, photon, phonon).
 */
typedef struct {
  double energy;
  OdComplex amplitudes[3];
  OdClass class_;
  double photon_amp;
  double phonon_amp;
} OdEigenstate;

typedef struct {
  double energies[3];
  double b_occ[3];
  double c_occ_swapped[3];
  double max_mismatch;
  bool passed;
} OdDuality;

typedef struct {
  size_t checks;
  size_t failed;
  bool passed;
} OdVerify;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a model. Frequencies must be finite and positive, couplings finite.
 *
 * # Safety
 * `params` must point to a valid `OdParams`; `out_model` must be writable.
 */
OdStatus od_model_new(const OdParams *params, OdAtomKind kind, OdModel **out_model);

/**
 * Releases a model. Null is accepted and ignored.
 *
 * # Safety
 * `model` must come from [`od_model_new`] and not have been freed.
 */
void od_model_free(OdModel *model);

/**
 * Copies the model parameters.
 *
 * # Safety
 * `model` must be a live handle; `out_params` must be writable.
 */
OdStatus od_model_params(const OdModel *model, OdParams *out_params);

/**
 * Evaluates the four standing assumptions.
 *
 * # Safety
 * `model` must be a live handle; `out_report` must be writable.
 */
OdStatus od_validate(const OdModel *model, OdAssumptions *out_report);

/**
 * Photon/phonon normal modes and their couplings to the atom.
 *
 * # Safety
 * `model` must be a live handle; `out_spectrum` must be writable.
 */
OdStatus od_two_mode_spectrum(const OdModel *model, OdTwoMode *out_spectrum);

/**
 * Dressed one-excitation energies `E_1 < E_2 < E_3`.
 *
 * # Safety
 * `model` must be a live handle; `out_spectrum` must be writable.
 */
OdStatus od_three_mode_spectrum(const OdModel *model, OdThreeMode *out_spectrum);

/**
 * The three one-excitation eigenstates, ascending, classified with `tol`.
 *
 * # Safety
 * `model` must be a live handle; `out_states` must point to 3 writable entries.
 */
OdStatus od_one_excitation_eigenstates(const OdModel *model, double tol, OdEigenstate *out_states);

/**
 * Compares `<b'b>` at `(lambda, xi)` with `<c'c>` at `(xi, lambda)`.
 * Requires `omega_b = omega_c`, real couplings and `kappa > 0`.
 *
 * # Safety
 * `model` must be a live handle; `out_report` must be writable.
 */
OdStatus od_duality_report(const OdModel *model, double tol, OdDuality *out_report);

/**
 * Number of basis states with `ell` total excitations.
 */
size_t od_sector_dimension(OdAtomKind kind, size_t ell);

/**
 * Ascending eigenvalues of the `ell`-excitation sector.
 *
 * `out_len` always receives the sector dimension. When `capacity` is smaller
 * nothing is written to `out_values` and `BufferTooSmall` is returned.
 *
 * # Safety
 * `model` must be a live handle; `out_values` must have `capacity` writable
 * entries; `out_len` must be writable.
 */
OdStatus od_sector_eigenvalues(const OdModel *model,
                               size_t ell,
                               double *out_values,
                               size_t capacity,
                               size_t *out_len);

/**
 * Runs every closed-form versus brute-force cross-check.
 *
 * # Safety
 * `model` must be a live handle; `out_result` must be writable.
 */
OdStatus od_verify(const OdModel *model, OdVerify *out_result);

/**
 * Message from the last failing call on this thread; empty if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *od_last_error(void);

/**
 * Library version, static storage.
 */
const char *od_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPTODARK_H */
