#ifndef PANELNET_H
#define PANELNET_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum PnStatus {
  PN_STATUS_OK = 0,
  PN_STATUS_NULL_POINTER = 1,
  PN_STATUS_INVALID_ARGUMENT = 2,
  PN_STATUS_VALIDATION = 3,
  PN_STATUS_PARSE = 4,
  PN_STATUS_DIRECTED_UNSUPPORTED = 5,
  PN_STATUS_UNDEFINED = 6,
  PN_STATUS_NO_CONVERGENCE = 7,
  PN_STATUS_IO = 8,
  PN_STATUS_BUFFER_SIZE = 9,
  PN_STATUS_PANIC = 10,
} PnStatus;

// Opaque undirected weighted graph.
typedef struct PnGraph PnGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len - 1` bytes) and returns the full message length.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t pn_last_error_message(char *buf, size_t len);

struct PnGraph *pn_graph_new(void);

// # Safety
// `g` must be null or a handle not yet freed.
void pn_graph_free(struct PnGraph *g);

// Adds a node; its index is written to `out_index` when non-null.
//
// # Safety
// `g` must be a live handle; `id` and `label` NUL-terminated strings
// (`label` may be null).
enum PnStatus pn_graph_add_node(struct PnGraph *g,
                                const char *id,
                                const char *label,
                                bool is_panelist,
                                size_t *out_index);

// Adds `weight` to the edge between two existing nodes.
//
// # Safety
// `g` must be a live handle; `u` and `v` NUL-terminated strings.
enum PnStatus pn_graph_add_edge(struct PnGraph *g, const char *u, const char *v, double weight);

// Number of nodes, 0 for a null handle.
//
// # Safety
// `g` must be null or a live handle.
size_t pn_graph_node_count(const struct PnGraph *g);

// Number of edges, 0 for a null handle.
//
// # Safety
// `g` must be null or a live handle.
size_t pn_graph_edge_count(const struct PnGraph *g);

// Reads a Pajek `.net` file. Two-mode files are flattened, left vertices
// first.
//
// # Safety
// `path` must be a NUL-terminated string and `out` valid for one write.
enum PnStatus pn_graph_read_net(const char *path, struct PnGraph **out);

// # Safety
// `g` must be a live handle and `path` a NUL-terminated string.
enum PnStatus pn_graph_write_net(const struct PnGraph *g, const char *path);

// Component id (`1..=k`) per node into `out`, `k` into `out_count`.
//
// # Safety
// `g` must be a live handle, `out` valid for `len` values and `out_count`
// for one.
enum PnStatus pn_components(const struct PnGraph *g, uint32_t *out, size_t len, size_t *out_count);

// Betweenness centrality per node. With `weighted`, edge weights are path
// lengths; otherwise paths count hops.
//
// # Safety
// `g` must be a live handle and `out` valid for `len` values.
enum PnStatus pn_betweenness(const struct PnGraph *g,
                             bool normalized,
                             bool weighted,
                             double *out,
                             size_t len);

// Eigenvector centrality per node (unit norm) and the eigenvalue.
//
// # Safety
// `g` must be a live handle, `out` valid for `len` values and
// `out_eigenvalue` null or valid for one.
enum PnStatus pn_eigenvector(const struct PnGraph *g,
                             double *out,
                             size_t len,
                             double *out_eigenvalue);

// Line islands with sizes in `[min_size, max_size]`: island id per node
// (0 off-island) and the island count.
//
// # Safety
// `g` must be a live handle, `out` valid for `len` values and `out_count`
// for one.
enum PnStatus pn_line_islands(const struct PnGraph *g,
                              size_t min_size,
                              size_t max_size,
                              uint32_t *out,
                              size_t len,
                              size_t *out_count);

// Density, `2m/n²` or with `simple` `2m/(n(n−1))`.
//
// # Safety
// `g` must be a live handle and `out` valid for one value.
enum PnStatus pn_density(const struct PnGraph *g, bool simple, double *out);

// # Safety
// `g` must be a live handle and `out` valid for one value.
enum PnStatus pn_average_degree(const struct PnGraph *g, double *out);

// Two-sample Kolmogorov-Smirnov test with asymptotic p-value (Stephens'
// correction when `stephens`).
//
// # Safety
// `a` and `b` must be valid for `na` and `nb` values; `out_d` and `out_p`
// for one value each.
enum PnStatus pn_ks_two_sample(const double *a,
                               size_t na,
                               const double *b,
                               size_t nb,
                               bool stephens,
                               double *out_d,
                               double *out_p);

// Holm step-down adjustment of `n` p-values into `out`.
//
// # Safety
// `p` and `out` must be valid for `n` values.
enum PnStatus pn_holm_adjust(const double *p, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PANELNET_H */
