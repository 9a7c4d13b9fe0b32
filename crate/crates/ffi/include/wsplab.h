#ifndef WSPLAB_H
#define WSPLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every call.
 */
typedef enum WsplabStatus {
  WSPLAB_STATUS_OK = 0,
  WSPLAB_STATUS_NULL_POINTER = 1,
  WSPLAB_STATUS_INVALID_ARGUMENT = 2,
  WSPLAB_STATUS_UTF8 = 3,
  WSPLAB_STATUS_IO = 4,
  WSPLAB_STATUS_NUMERICAL = 5,
  WSPLAB_STATUS_BUFFER_TOO_SMALL = 6,
  WSPLAB_STATUS_PANIC = 7,
} WsplabStatus;

/*
 How edges are drawn when sampling.
 */
typedef enum WsplabSampleMode {
  WSPLAB_SAMPLE_MODE_TEMPLATE = 0,
  WSPLAB_SAMPLE_MODE_WEIGHTED = 1,
  WSPLAB_SAMPLE_MODE_STOCHASTIC = 2,
} WsplabSampleMode;

/*
 Opaque graph handle.
 */
typedef struct WsplabGraph WsplabGraph;

/*
 Opaque graphon handle.
 */
typedef struct WsplabGraphon WsplabGraphon;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL after a
 successful call. The pointer stays valid until the next call on the same
 thread.
 */
const char *wsplab_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *wsplab_version(void);

/*
 Looks up a builtin graphon such as `"sbm2"` or `"constant:0.4"`.

 # Safety
 `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum WsplabStatus wsplab_graphon_builtin(const char *name, struct WsplabGraphon **out);

/*
 Parses a graphon from its JSON description.

 # Safety
 `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum WsplabStatus wsplab_graphon_from_json(const char *json, struct WsplabGraphon **out);

/*
 Releases a graphon. NULL is ignored.

 # Safety
 `w` must come from this library and not have been freed.
 */
void wsplab_graphon_free(struct WsplabGraphon *w);

/*
 Samples an `n`-node graph. The same `(seed, trial)` always gives the same
 graph.

 # Safety
 `w` must be a live graphon handle and `out` a writable pointer.
 */
enum WsplabStatus wsplab_graph_sample(const struct WsplabGraphon *w,
                                      size_t n,
                                      enum WsplabSampleMode mode,
                                      uint64_t seed,
                                      uint64_t trial,
                                      bool self_loops,
                                      struct WsplabGraph **out);

/*
 Reads an edge-list CSV, with labels from the sibling `.labels.txt` file
 when present.

 # Safety
 `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum WsplabStatus wsplab_graph_load_csv(const char *path, struct WsplabGraph **out);

/*
 Writes the graph as an edge-list CSV plus a `.labels.txt` file.

 # Safety
 `g` must be a live graph handle and `path` a NUL-terminated string.
 */
enum WsplabStatus wsplab_graph_save_csv(const struct WsplabGraph *g, const char *path);

/*
 Releases a graph. NULL is ignored.

 # Safety
 `g` must come from this library and not have been freed.
 */
void wsplab_graph_free(struct WsplabGraph *g);

/*
 Number of nodes.

 # Safety
 `g` must be a live graph handle and `out` a writable pointer.
 */
enum WsplabStatus wsplab_graph_size(const struct WsplabGraph *g, size_t *out);

/*
 Copies the `n * n` shift operator into `out` in row-major order.

 # Safety
 `g` must be a live graph handle and `out` must hold `len` doubles.
 */
enum WsplabStatus wsplab_graph_matrix(const struct WsplabGraph *g, double *out, size_t len);

/*
 Eigenvalues of `S` (or `S/n` when `normalized`), nonzero ones first by
 decreasing magnitude. `out` must hold at least `n` doubles.

 # Safety
 `g` must be a live graph handle and `out` must hold `len` doubles.
 */
enum WsplabStatus wsplab_graph_spectrum(const struct WsplabGraph *g,
                                        bool normalized,
                                        double *out,
                                        size_t len);

/*
 Applies `y = sum_k taps[k] S^k x` (with `S/n` when `normalized`). `x` and
 `y` hold `n` doubles each and may not overlap.

 # Safety
 `g` must be a live graph handle, `taps` must hold `ntaps` doubles, and `x`
 and `y` must hold `n` doubles.
 */
enum WsplabStatus wsplab_filter_apply(const struct WsplabGraph *g,
                                      const double *taps,
                                      size_t ntaps,
                                      bool normalized,
                                      const double *x,
                                      double *y,
                                      size_t n);

/*
 Homomorphism density of a named motif (`node`, `edge`, `path2`,
 `triangle`) in the graph.

 # Safety
 `g` must be a live graph handle, `motif` a NUL-terminated string and `out`
 a writable pointer.
 */
enum WsplabStatus wsplab_hom_density(const struct WsplabGraph *g, const char *motif, double *out);

/*
 Evaluates a transferability bound. `kind` is a bound name such as
 `"prop1"` or `"thm2"`; `ingredients` is the JSON object accepted by the
 `bounds` command. `confidence` may be NULL.

 # Safety
 `kind` and `ingredients` must be NUL-terminated strings and `value` a
 writable pointer.
 */
enum WsplabStatus wsplab_bound_evaluate(const char *kind,
                                        const char *ingredients,
                                        double *value,
                                        double *confidence);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WSPLAB_H */
