#ifndef GAMMACD_H
#define GAMMACD_H

#include <stdbool.h>
#include <stddef.h>

typedef enum GcdStatus {
  GCD_STATUS_OK = 0,
  GCD_STATUS_NULL_POINTER = 1,
  GCD_STATUS_INVALID_ARGUMENT = 2,
  GCD_STATUS_INVALID_GRAPH = 3,
  GCD_STATUS_NUMERICAL = 4,
  GCD_STATUS_PANIC = 5,
} GcdStatus;

/**
 * Measure selection. For `gcd_graph_load`, `GCD_MODE_CUSTOM` keeps the
 * measure stored in a JSON file.
 */
typedef enum GcdMode {
  GCD_MODE_NORMALIZED = 0,
  GCD_MODE_PHYSICAL = 1,
  GCD_MODE_CUSTOM = 2,
} GcdMode;

/**
 * Opaque weighted graph.
 */
typedef struct GcdGraph GcdGraph;

/**
 * Opaque heat semigroup of a graph.
 */
typedef struct GcdHeat GcdHeat;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a
 * successful one. Valid until the next call on the same thread.
 */
const char *gcd_last_error(void);

/**
 * Builds a graph from a generator spec such as `"torus:2:16"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GcdStatus gcd_graph_generate(const char *spec, enum GcdMode mode, struct GcdGraph **out);

/**
 * Loads a JSON or TSV graph file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GcdStatus gcd_graph_load(const char *path, enum GcdMode mode, struct GcdGraph **out);

/**
 * # Safety
 * `graph` must be NULL or a handle not yet freed.
 */
void gcd_graph_free(struct GcdGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum GcdStatus gcd_graph_num_vertices(const struct GcdGraph *graph, size_t *out);

/**
 * `Deg(x) = (1/m(x)) Σ μ_xy`.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum GcdStatus gcd_graph_weighted_degree(const struct GcdGraph *graph, size_t x, double *out);

/**
 * `out = Δf`.
 *
 * # Safety
 * `f` and `out` must point to `len` doubles.
 */
enum GcdStatus gcd_laplacian(const struct GcdGraph *graph,
                             const double *f,
                             size_t len,
                             double *out);

/**
 * `out = Γ(f, h)`.
 *
 * # Safety
 * `f`, `h` and `out` must point to `len` doubles.
 */
enum GcdStatus gcd_gamma(const struct GcdGraph *graph,
                         const double *f,
                         const double *h,
                         size_t len,
                         double *out);

/**
 * `out = Γ₂(f)`.
 *
 * # Safety
 * `f` and `out` must point to `len` doubles.
 */
enum GcdStatus gcd_gamma2(const struct GcdGraph *graph, const double *f, size_t len, double *out);

/**
 * Maximal `K` with `CD(K, n)` at `x`. `witness` may be NULL; otherwise it
 * receives `witness_len` (= vertex count) values of a minimizer.
 *
 * # Safety
 * `graph` must be a live handle, `k_max` valid, `witness` NULL or
 * pointing to `witness_len` doubles.
 */
enum GcdStatus gcd_curvature_at(const struct GcdGraph *graph,
                                size_t x,
                                double n,
                                double *k_max,
                                double *witness,
                                size_t witness_len);

/**
 * Checks `CD(K, n)` at `x` with eigenvalue tolerance `tol`.
 *
 * # Safety
 * `graph` must be a live handle, `holds` and `min_eig` valid pointers.
 */
enum GcdStatus gcd_cd_check(const struct GcdGraph *graph,
                            size_t x,
                            double k,
                            double n,
                            double tol,
                            bool *holds,
                            double *min_eig);

/**
 * Diagonalizes the heat semigroup of `graph`. The result does not borrow
 * the graph.
 *
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum GcdStatus gcd_heat_new(const struct GcdGraph *graph, struct GcdHeat **out);

/**
 * `out = P_t f`.
 *
 * # Safety
 * `heat` must be a live handle; `f` and `out` must point to `len` doubles.
 */
enum GcdStatus gcd_heat_apply(const struct GcdHeat *heat,
                              double t,
                              const double *f,
                              size_t len,
                              double *out);

/**
 * # Safety
 * `heat` must be NULL or a handle not yet freed.
 */
void gcd_heat_free(struct GcdHeat *heat);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAMMACD_H */
