/* C interface to the mfatopo library. Handles are opaque; every function
 * returns an mfat_status and writes results through out-parameters. On failure
 * mfat_last_error() holds a message for the calling thread. */
#ifndef MFATOPO_H
#define MFATOPO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MFAT_BUILDING)
#    define MFAT_API __declspec(dllexport)
#  else
#    define MFAT_API __declspec(dllimport)
#  endif
#else
#  define MFAT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mfat_status {
    MFAT_OK = 0,
    MFAT_E_USAGE = 1,      /* bad argument or option value */
    MFAT_E_IO = 2,         /* file cannot be opened or written */
    MFAT_E_PARSE = 3,      /* malformed file */
    MFAT_E_VALIDATION = 4, /* well-formed input violating an invariant */
    MFAT_E_DOMAIN = 5,     /* point outside the model domain */
    MFAT_E_ORDER = 6,      /* derivative order beyond the model degree */
    MFAT_E_FIT = 7,        /* least-squares system singular or underdetermined */
    MFAT_E_DEGENERATE = 8, /* derived field vanishes identically */
    MFAT_E_INTERNAL = 9
} mfat_status;

typedef struct mfat_grid mfat_grid;
typedef struct mfat_model mfat_model;
typedef struct mfat_graph mfat_graph;

typedef enum mfat_task { MFAT_CONTOUR = 0, MFAT_JACOBI = 1, MFAT_RIDGE_VALLEY = 2 } mfat_task;

typedef enum mfat_vertex_kind {
    MFAT_REGULAR = 0,
    MFAT_MINIMUM = 1,
    MFAT_MAXIMUM = 2,
    MFAT_SADDLE = 3,
    MFAT_DEGENERATE = 4
} mfat_vertex_kind;

typedef enum mfat_arc_class {
    MFAT_RIDGE = 0,
    MFAT_VALLEY = 1,
    MFAT_PSEUDO_RIDGE = 2,
    MFAT_PSEUDO_VALLEY = 3,
    MFAT_UNCLASSIFIED = 4
} mfat_arc_class;

typedef struct mfat_options {
    double step_divisor;  /* s = l / step_divisor */
    double epsilon;
    double gamma_factor;  /* gamma = gamma_factor * s */
    int seeds_per_dim;    /* 0: task default */
    int threads;          /* <= 0: all hardware threads */
    double class_tolerance;
} mfat_options;

typedef struct mfat_metrics {
    double e_max;
    double e_avg;
    int64_t n_loop;
    int64_t n_cc;
    int64_t n_vertices;
    int64_t n_edges;
    double wall_time; /* seconds, extraction only */
} mfat_metrics;

typedef struct mfat_fit_report {
    double rms_residual;
    double max_residual;
    double condition_estimate;
    int regularized;
} mfat_fit_report;

MFAT_API const char* mfat_version(void);
MFAT_API const char* mfat_status_string(mfat_status s);
/* Message of the last failure on this thread; empty after a success. */
MFAT_API const char* mfat_last_error(void);
/* 0 success, 2 usage, 3 I/O, 4 numeric or degeneracy. */
MFAT_API int mfat_exit_code(mfat_status s);
MFAT_API int mfat_hardware_threads(void);

MFAT_API void mfat_options_default(mfat_options* opt);

/* Grids: CSV with header "nx,ny[,x1min,x1max,x2min,x2max]". */
MFAT_API mfat_status mfat_grid_load(const char* path, mfat_grid** out);
MFAT_API mfat_status mfat_grid_save(const mfat_grid* grid, const char* path);
/* name: schwefel, sinc, gaussian_pair_f, gaussian_pair_g, gaussian_mixture */
MFAT_API mfat_status mfat_grid_synthetic(const char* name, int nx, int ny, mfat_grid** out);
MFAT_API mfat_status mfat_grid_dims(const mfat_grid* grid, int* nx, int* ny);
MFAT_API void mfat_grid_free(mfat_grid* grid);

MFAT_API mfat_status mfat_model_fit(const mfat_grid* grid, int degree, int n1, int n2, mfat_model** out,
                                    mfat_fit_report* report);
/* Reference model of a synthetic field: samples_per_span lattice samples per
 * span per dimension, fitted with the standard span counts. */
MFAT_API mfat_status mfat_model_fit_synthetic(const char* name, int degree, int samples_per_span, mfat_model** out,
                                              mfat_fit_report* report);
MFAT_API mfat_status mfat_model_load(const char* path, mfat_model** out);
MFAT_API mfat_status mfat_model_save(const mfat_model* model, const char* path);
MFAT_API void mfat_model_free(mfat_model* model);
/* degree, span counts and domain [x1min, x1max, x2min, x2max]; any pointer may be NULL */
MFAT_API mfat_status mfat_model_info(const mfat_model* model, int* degree, int* spans_u, int* spans_v,
                                     double domain[4]);
MFAT_API mfat_status mfat_model_evaluate(const mfat_model* model, double x1, double x2, int d1, int d2,
                                         double* out);
MFAT_API mfat_status mfat_synthetic_spans(const char* name, int* spans_u, int* spans_v);

/* Extraction on the continuous model. g is unused for contours. */
MFAT_API mfat_status mfat_extract_contour(const mfat_model* f, double a, const mfat_options* opt, mfat_graph** out);
MFAT_API mfat_status mfat_extract_jacobi(const mfat_model* f, const mfat_model* g, const mfat_options* opt,
                                         mfat_graph** out);
MFAT_API mfat_status mfat_extract_ridge_valley(const mfat_model* f, const mfat_options* opt, mfat_graph** out);

/* Marching-squares baseline on (spans * ratio + 1)^2 samples. */
MFAT_API mfat_status mfat_baseline(mfat_task task, const mfat_model* f, const mfat_model* g, double a, int ratio,
                                   int threads, mfat_graph** out);

MFAT_API mfat_status mfat_graph_load(const char* path, mfat_graph** out);
/* JSON document with nodes, edges and arc label counts. */
MFAT_API mfat_status mfat_graph_save(const mfat_graph* graph, const char* path);
/* One line per edge: x1a,x2a,x1b,x2b,label */
MFAT_API mfat_status mfat_graph_save_segments(const mfat_graph* graph, const char* path);
/* Inserted critical points as x1,x2,value,kind. */
MFAT_API mfat_status mfat_graph_save_criticals(const mfat_graph* graph, const char* path);
MFAT_API void mfat_graph_free(mfat_graph* graph);

/* Metrics recorded at extraction, or from stored vertex values for a loaded graph. */
MFAT_API mfat_status mfat_graph_metrics(const mfat_graph* graph, mfat_metrics* out);
/* Residuals re-measured on the field named by the graph's task (g for jacobi). */
MFAT_API mfat_status mfat_graph_measure(const mfat_graph* graph, const mfat_model* f, const mfat_model* g,
                                        mfat_metrics* out);
MFAT_API mfat_status mfat_graph_task(const mfat_graph* graph, mfat_task* task, double* isovalue);
MFAT_API mfat_status mfat_graph_size(const mfat_graph* graph, size_t* n_vertices, size_t* n_edges);
MFAT_API mfat_status mfat_graph_vertex(const mfat_graph* graph, size_t index, double* x1, double* x2, double* value,
                                       mfat_vertex_kind* kind, mfat_arc_class* label);
MFAT_API mfat_status mfat_graph_edge(const mfat_graph* graph, size_t index, int* a, int* b);
/* Ridge-valley arcs of the given class (0 for other tasks). */
MFAT_API mfat_status mfat_graph_arc_count(const mfat_graph* graph, mfat_arc_class label, size_t* count);
MFAT_API size_t mfat_graph_warning_count(const mfat_graph* graph);
/* NULL when index is out of range. The string lives as long as the graph. */
MFAT_API const char* mfat_graph_warning(const mfat_graph* graph, size_t index);

MFAT_API const char* mfat_task_string(mfat_task task);
MFAT_API mfat_status mfat_task_from_string(const char* name, mfat_task* out);
MFAT_API const char* mfat_arc_class_string(mfat_arc_class label);

#ifdef __cplusplus
}
#endif

#endif
