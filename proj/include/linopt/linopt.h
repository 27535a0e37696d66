/* C interface to the linopt circuit toolkit.
 *
 * Every function returns a linopt_status. On failure the message is
 * available from linopt_last_error() until the next call on the same
 * thread. Handles are opaque and owned by the caller, who releases them
 * with the matching *_free function. Mode numbers are 1-based.
 */
#ifndef LINOPT_LINOPT_H
#define LINOPT_LINOPT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(LINOPT_BUILDING_LIBRARY)
#define LINOPT_API __attribute__((visibility("default")))
#else
#define LINOPT_API
#endif

typedef enum linopt_status {
  LINOPT_OK = 0,
  LINOPT_ERR_INVALID_ARGUMENT = 1,
  LINOPT_ERR_CONFIG = 2,  /* bad experiment config; matches CLI exit code 2 */
  LINOPT_ERR_NUMERIC = 3, /* numerical failure; matches CLI exit code 3 */
  LINOPT_ERR_IO = 4,
  LINOPT_ERR_INTERNAL = 5,
  LINOPT_ERR_NOT_REACHED = 6 /* a horizon such as t_max was exhausted */
} linopt_status;

typedef enum linopt_route {
  LINOPT_ROUTE_EIG = 0,
  LINOPT_ROUTE_COV = 1,
  LINOPT_ROUTE_SERIES = 2
} linopt_route;

typedef struct linopt_matrix linopt_matrix;
typedef struct linopt_geometry linopt_geometry;
typedef struct linopt_compression linopt_compression;

LINOPT_API const char* linopt_last_error(void);
LINOPT_API const char* linopt_build_id(void);

/* geometry */
LINOPT_API linopt_status linopt_geometry_brickwall(size_t n, linopt_geometry** out);
/* order lists 0-based layer slots (2j = L on axis j+1, 2j+1 = R); NULL for the default. */
LINOPT_API linopt_status linopt_geometry_brickwork(size_t m, size_t dim, const size_t* order,
                                                   size_t order_len, linopt_geometry** out);
LINOPT_API linopt_status linopt_geometry_octahedral(linopt_geometry** out);
/* {"n": 4, "layers": [[[1,2],[3,4]], [[1],[2,3],[4]]]} */
LINOPT_API linopt_status linopt_geometry_from_json(const char* json, linopt_geometry** out);
LINOPT_API size_t linopt_geometry_modes(const linopt_geometry* g);
LINOPT_API size_t linopt_geometry_layers(const linopt_geometry* g);
LINOPT_API void linopt_geometry_free(linopt_geometry* g);

/* matrices; entries are interleaved (re, im) doubles in row-major order */
LINOPT_API linopt_status linopt_matrix_create(size_t rows, size_t cols, const double* entries,
                                              linopt_matrix** out);
LINOPT_API size_t linopt_matrix_rows(const linopt_matrix* m);
LINOPT_API size_t linopt_matrix_cols(const linopt_matrix* m);
LINOPT_API linopt_status linopt_matrix_entries(const linopt_matrix* m, double* out, size_t len);
LINOPT_API linopt_status linopt_matrix_defect(const linopt_matrix* m, double* out);
LINOPT_API linopt_status linopt_matrix_write_json(const linopt_matrix* m, const char* path);
LINOPT_API linopt_status linopt_matrix_read_json(const char* path, linopt_matrix** out);
LINOPT_API linopt_status linopt_matrix_write_binary(const linopt_matrix* m, const char* path);
LINOPT_API linopt_status linopt_matrix_read_binary(const char* path, linopt_matrix** out);
LINOPT_API void linopt_matrix_free(linopt_matrix* m);

/* sampling */
LINOPT_API linopt_status linopt_sample_circuit(const linopt_geometry* g, size_t depth,
                                               uint64_t seed, uint64_t stream,
                                               linopt_matrix** out);
LINOPT_API linopt_status linopt_haar_unitary(size_t n, uint64_t seed, linopt_matrix** out);

/* Renyi-2 entropy of the subsystem gamma (k 1-based modes). series_terms is
 * used by LINOPT_ROUTE_SERIES only. */
LINOPT_API linopt_status linopt_renyi2(const linopt_matrix* u, const size_t* gamma, size_t k,
                                       double s, linopt_route route, size_t series_terms,
                                       double* value);

/* walks; LINOPT_ERR_NOT_REACHED when the horizon is too short */
LINOPT_API linopt_status linopt_mixing_time(const linopt_geometry* g, double epsilon,
                                            size_t t_max, size_t* t);
LINOPT_API linopt_status linopt_meeting_layers(const linopt_geometry* g, double epsilon,
                                               size_t max_layers, size_t* layers);

/* compression */
LINOPT_API linopt_status linopt_effective_bandwidth(size_t depth, double kappa, double c_band,
                                                    size_t n, size_t* w);
LINOPT_API linopt_status linopt_banded_compress(const linopt_matrix* u, size_t w,
                                                linopt_compression** out);
LINOPT_API linopt_status linopt_reck_decompose(const linopt_matrix* u, linopt_compression** out);
LINOPT_API size_t linopt_compression_gate_count(const linopt_compression* c);
LINOPT_API size_t linopt_compression_band(const linopt_compression* c);
LINOPT_API double linopt_compression_hs_error(const linopt_compression* c);
LINOPT_API int linopt_compression_close_diag_ok(const linopt_compression* c);
/* Copies the gate-list JSON into buf (NUL-terminated). *needed receives the
 * required size including the terminator; a short buffer fails with
 * LINOPT_ERR_INVALID_ARGUMENT. */
LINOPT_API linopt_status linopt_compression_gates_json(const linopt_compression* c, char* buf,
                                                       size_t len, size_t* needed);
LINOPT_API linopt_status linopt_compression_reconstruct(const linopt_compression* c,
                                                        linopt_matrix** out);
LINOPT_API void linopt_compression_free(linopt_compression* c);

/* experiments */
typedef struct linopt_run_options {
  const char* out_dir; /* NULL means "runs" */
  unsigned threads;    /* 0: LINOPT_THREADS, then hardware concurrency */
  int has_seed;
  uint64_t seed;
  int has_trials;
  uint64_t trials;
  int full; /* entropy-sweep: 5000 trials unless has_trials */
} linopt_run_options;

/* Runs the experiment described by config_json and writes its outputs.
 * The manifest path is copied into manifest_path (may be NULL). */
LINOPT_API linopt_status linopt_run_experiment(const char* config_json,
                                               const linopt_run_options* options,
                                               char* manifest_path, size_t len);

#ifdef __cplusplus
}
#endif

#endif /* LINOPT_LINOPT_H */
