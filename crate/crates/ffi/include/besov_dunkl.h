#ifndef BESOV_DUNKL_H
#define BESOV_DUNKL_H

#include <stddef.h>
#include <stdint.h>

typedef enum BdStatus {
  BD_STATUS_OK = 0,
  BD_STATUS_NULL_POINTER = 1,
  BD_STATUS_DOMAIN = 2,
  BD_STATUS_RANGE = 3,
  BD_STATUS_GRID_MISMATCH = 4,
  BD_STATUS_PARSE = 5,
  BD_STATUS_USAGE = 6,
  BD_STATUS_IO = 7,
  BD_STATUS_BUFFER_TOO_SMALL = 8,
  BD_STATUS_INVALID_UTF8 = 9,
  BD_STATUS_PANIC = 10,
} BdStatus;

/**
 * Sampled function handle.
 */
typedef struct BdFunction BdFunction;

/**
 * Quadrature grid handle.
 */
typedef struct BdGrid BdGrid;

/**
 * Dunkl transform handle.
 */
typedef struct BdSpectrum BdSpectrum;

typedef struct BdSeminorms {
  double bd;
  double kd;
  double ed;
  double lp_norm;
  /**
   * Nonzero when the input is constant.
   */
  int32_t degenerate;
} BdSeminorms;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t bd_last_error(char *buf, size_t len);

/**
 * `E_alpha(-i x y)`.
 *
 * # Safety
 * `re` and `im` must be valid for writes.
 */
enum BdStatus bd_dunkl_kernel(double alpha, double x, double y, double *re, double *im);

/**
 * Composite Gauss-Legendre grid on `[-radius, radius]` with `n` nodes.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BdStatus bd_grid_new(double alpha, double radius, size_t n, struct BdGrid **out);

/**
 * # Safety
 * `grid` must be null or a handle from [`bd_grid_new`] not yet freed.
 */
void bd_grid_free(struct BdGrid *grid);

/**
 * Number of nodes, or 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
size_t bd_grid_len(const struct BdGrid *grid);

/**
 * # Safety
 * `grid` must be a live handle and `nodes` valid for `len` writes.
 */
enum BdStatus bd_grid_nodes(const struct BdGrid *grid, double *nodes, size_t len);

/**
 * Real samples at the grid nodes; parity is detected from the values.
 *
 * # Safety
 * `grid` must be a live handle, `values` valid for `len` reads and `out`
 * valid for writes.
 */
enum BdStatus bd_function_from_values(const struct BdGrid *grid,
                                      const double *values,
                                      size_t len,
                                      struct BdFunction **out);

/**
 * Catalog function by name, sampled on `grid`.
 *
 * # Safety
 * `grid` must be a live handle, `name` a NUL-terminated string and `out`
 * valid for writes.
 */
enum BdStatus bd_function_from_catalog(const struct BdGrid *grid,
                                       const char *name,
                                       struct BdFunction **out);

/**
 * # Safety
 * `f` must be null or a live function handle.
 */
void bd_function_free(struct BdFunction *f);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
size_t bd_function_len(const struct BdFunction *f);

/**
 * Copies the samples; `im` may be null.
 *
 * # Safety
 * `f` must be a live handle; `re` (and `im` when non-null) valid for `len` writes.
 */
enum BdStatus bd_function_values(const struct BdFunction *f, double *re, double *im, size_t len);

/**
 * `||f||_{p,alpha}`.
 *
 * # Safety
 * `f` must be a live handle and `out` valid for writes.
 */
enum BdStatus bd_lp_norm(const struct BdFunction *f, double p, double *out);

/**
 * Dunkl transform on the frequency grid `freq` (the space grid when null).
 *
 * # Safety
 * `f` must be a live handle, `freq` null or live, `out` valid for writes.
 */
enum BdStatus bd_transform(const struct BdFunction *f,
                           const struct BdGrid *freq,
                           struct BdSpectrum **out);

/**
 * Inverse transform sampled on `space`.
 *
 * # Safety
 * `s` and `space` must be live handles and `out` valid for writes.
 */
enum BdStatus bd_inverse_transform(const struct BdSpectrum *s,
                                   const struct BdGrid *space,
                                   struct BdFunction **out);

/**
 * # Safety
 * `s` must be null or a live spectrum handle.
 */
void bd_spectrum_free(struct BdSpectrum *s);

/**
 * Copies the spectrum values; `im` may be null.
 *
 * # Safety
 * `s` must be a live handle; `re` (and `im` when non-null) valid for `len` writes.
 */
enum BdStatus bd_spectrum_values(const struct BdSpectrum *s, double *re, double *im, size_t len);

/**
 * `tau_x f` by the angular formula with `theta_nodes` nodes.
 *
 * # Safety
 * `f` must be a live handle and `out` valid for writes.
 */
enum BdStatus bd_translate(const struct BdFunction *f,
                           double x,
                           size_t theta_nodes,
                           struct BdFunction **out);

/**
 * `f *_alpha g`.
 *
 * # Safety
 * `f`, `g` must be live handles on the same grid and `out` valid for writes.
 */
enum BdStatus bd_convolve(const struct BdFunction *f,
                          const struct BdFunction *g,
                          size_t theta_nodes,
                          struct BdFunction **out);

/**
 * The three Besov-Dunkl seminorms on the default lattices; `q` may be
 * `INFINITY`.
 *
 * # Safety
 * `f` must be a live handle and `out` valid for writes.
 */
enum BdStatus bd_seminorms(const struct BdFunction *f,
                           double p,
                           double q,
                           double beta,
                           struct BdSeminorms *out);

/**
 * Parity of a function: 0 even, 1 odd, 2 neither.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
int32_t bd_function_parity(const struct BdFunction *f);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BESOV_DUNKL_H */
