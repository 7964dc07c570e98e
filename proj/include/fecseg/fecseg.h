/*
 * C interface to the fecseg point-cloud segmentation library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_destroy function. Every fallible call returns a fecseg_status;
 * on failure fecseg_last_error() describes the problem for the calling
 * thread. Output handles are only written on success.
 */
#ifndef FECSEG_FECSEG_H
#define FECSEG_FECSEG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FECSEG_BUILDING)
#    define FECSEG_API __declspec(dllexport)
#  else
#    define FECSEG_API __declspec(dllimport)
#  endif
#else
#  define FECSEG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fecseg_status {
  FECSEG_OK = 0,
  FECSEG_ERR_INVALID_ARGUMENT = 1, /* null handle/pointer, unknown enum */
  FECSEG_ERR_PARAMETER = 2,        /* out-of-range algorithm parameter */
  FECSEG_ERR_NON_FINITE = 3,       /* NaN or infinite coordinate */
  FECSEG_ERR_FORMAT = 4,           /* malformed file content */
  FECSEG_ERR_IO = 5,               /* file could not be opened/written */
  FECSEG_ERR_LENGTH_MISMATCH = 6,  /* label map and cloud sizes differ */
  FECSEG_ERR_CONFIG = 7,           /* invalid synthetic config */
  FECSEG_ERR_BUFFER_TOO_SMALL = 8,
  FECSEG_ERR_INTERNAL = 9
} fecseg_status;

typedef enum fecseg_format {
  FECSEG_FORMAT_AUTO = 0, /* from the file extension */
  FECSEG_FORMAT_KITTI_BIN = 1,
  FECSEG_FORMAT_PLY_ASCII = 2,
  FECSEG_FORMAT_CSV_XYZ = 3
} fecseg_format;

typedef enum fecseg_traversal {
  FECSEG_TRAVERSAL_EVERY_POINT = 0,
  FECSEG_TRAVERSAL_SKIP_LABELED = 1
} fecseg_traversal;

typedef enum fecseg_merge {
  FECSEG_MERGE_INDEXED = 0,
  FECSEG_MERGE_SWEEP = 1
} fecseg_merge;

typedef enum fecseg_overlap_mode {
  FECSEG_OVERLAP_IOU = 0,
  FECSEG_OVERLAP_PRECISION = 1
} fecseg_overlap_mode;

typedef struct fecseg_cloud fecseg_cloud;
typedef struct fecseg_labels fecseg_labels;
typedef struct fecseg_kdtree fecseg_kdtree;

/* UINT64_MAX in a size field means "unbounded". */
#define FECSEG_UNBOUNDED UINT64_MAX

typedef struct fecseg_cluster_params {
  double d_th;               /* neighbor radius, meters, > 0 */
  uint64_t max_nn;           /* cap on neighbors per radius query, >= 1 */
  uint64_t min_cluster_size;
  uint64_t max_cluster_size;
} fecseg_cluster_params;

typedef struct fecseg_fec_options {
  fecseg_traversal traversal;
  fecseg_merge merge;
  uint64_t leaf_size;
} fecseg_fec_options;

typedef struct fecseg_rg_params {
  uint64_t k_normals;
  double angle_th;      /* radians */
  double curvature_th;
  double d_th;          /* meters */
  uint64_t max_nn;
  uint64_t min_cluster_size;
  uint64_t max_cluster_size;
} fecseg_rg_params;

typedef struct fecseg_run_stats {
  uint64_t neighbor_queries;
  uint64_t merge_relabels;
  uint64_t peak_label;
  uint64_t cluster_count;
  double wall_time_seconds;
} fecseg_run_stats;

typedef struct fecseg_ground_params {
  double inlier_threshold; /* meters */
  uint32_t max_iterations;
  double max_tilt;         /* radians from +z */
  uint64_t rng_seed;
} fecseg_ground_params;

typedef struct fecseg_ground_model {
  double normal[3];
  double offset;
  double inlier_threshold;
  uint64_t inlier_count;
  int found;
} fecseg_ground_model;

typedef struct fecseg_synth_config {
  uint64_t n_clusters;
  uint64_t density;
  double voxel_edge;
  double shift_sigma;
  uint64_t sub_clusters;
  uint64_t rng_seed;
} fecseg_synth_config;

typedef struct fecseg_match_report {
  uint64_t tp;
  uint64_t fp;
  uint64_t matched_pairs;
  double ap;
} fecseg_match_report;

FECSEG_API const char* fecseg_version(void);
FECSEG_API const char* fecseg_status_string(fecseg_status status);
FECSEG_API const char* fecseg_last_error(void);

/* Defaults: d_th 0 (must be set), unbounded caps and size filters. */
FECSEG_API void fecseg_cluster_params_init(fecseg_cluster_params* params);
FECSEG_API void fecseg_fec_options_init(fecseg_fec_options* options);
/* Defaults: k 30, 3 degrees, curvature 1.0, d_th 0 (must be set). */
FECSEG_API void fecseg_rg_params_init(fecseg_rg_params* params);
/* Defaults: 0.2 m, 100 iterations, 30 degrees, seed 0. */
FECSEG_API void fecseg_ground_params_init(fecseg_ground_params* params);
FECSEG_API void fecseg_synth_config_init(fecseg_synth_config* config);

/* ---- clouds ---- */

/* xyz holds 3*count doubles; intensity is optional (NULL) or count floats. */
FECSEG_API fecseg_status fecseg_cloud_create(const double* xyz,
                                             const float* intensity,
                                             size_t count, fecseg_cloud** out);
FECSEG_API void fecseg_cloud_destroy(fecseg_cloud* cloud);
FECSEG_API size_t fecseg_cloud_size(const fecseg_cloud* cloud);
/* Copies 3*size doubles; capacity counts doubles. */
FECSEG_API fecseg_status fecseg_cloud_copy_xyz(const fecseg_cloud* cloud,
                                               double* xyz, size_t capacity);
FECSEG_API fecseg_status fecseg_cloud_read(const char* path,
                                           fecseg_format format,
                                           fecseg_cloud** out);
FECSEG_API fecseg_status fecseg_cloud_write(const fecseg_cloud* cloud,
                                            const char* path,
                                            fecseg_format format);
/* Accepts kitti_bin, ply_ascii, csv_xyz (and short forms) or "auto". */
FECSEG_API fecseg_status fecseg_format_from_name(const char* name,
                                                 fecseg_format* out);

/* ---- label maps ---- */

FECSEG_API fecseg_status fecseg_labels_create(const uint32_t* values,
                                              size_t count,
                                              fecseg_labels** out);
FECSEG_API void fecseg_labels_destroy(fecseg_labels* labels);
FECSEG_API size_t fecseg_labels_size(const fecseg_labels* labels);
/* Valid until the handle is destroyed; NULL for an empty map. */
FECSEG_API const uint32_t* fecseg_labels_data(const fecseg_labels* labels);
FECSEG_API size_t fecseg_labels_cluster_count(const fecseg_labels* labels);
FECSEG_API fecseg_status fecseg_labels_compact(const fecseg_labels* labels,
                                               fecseg_labels** out);
/* "index,label" CSV. */
FECSEG_API fecseg_status fecseg_labels_read(const char* path,
                                            fecseg_labels** out);
FECSEG_API fecseg_status fecseg_labels_write(const fecseg_labels* labels,
                                             const char* path);
FECSEG_API fecseg_status fecseg_write_colored_ply(const fecseg_cloud* cloud,
                                                  const fecseg_labels* labels,
                                                  const char* path);

/* ---- spatial index ---- */

/* The tree keeps the cloud alive; the cloud handle may be destroyed first. */
FECSEG_API fecseg_status fecseg_kdtree_build(const fecseg_cloud* cloud,
                                             uint64_t leaf_size,
                                             fecseg_kdtree** out);
FECSEG_API void fecseg_kdtree_destroy(fecseg_kdtree* tree);
/* Sorted by distance, ties by index. *count receives the hit count even when
 * it exceeds capacity (then FECSEG_ERR_BUFFER_TOO_SMALL is returned and
 * nothing is written). distances may be NULL. */
FECSEG_API fecseg_status fecseg_kdtree_radius_query(
    const fecseg_kdtree* tree, const double query[3], double radius,
    uint64_t cap, uint32_t* indices, double* distances, size_t capacity,
    size_t* count);

/* ---- clustering ---- */

/* options and stats may be NULL. */
FECSEG_API fecseg_status fecseg_fec_cluster(const fecseg_cloud* cloud,
                                            const fecseg_cluster_params* params,
                                            const fecseg_fec_options* options,
                                            fecseg_labels** labels,
                                            fecseg_run_stats* stats);
FECSEG_API fecseg_status fecseg_ec_cluster(const fecseg_cloud* cloud,
                                           const fecseg_cluster_params* params,
                                           fecseg_labels** labels,
                                           fecseg_run_stats* stats);
FECSEG_API fecseg_status fecseg_rg_cluster(const fecseg_cloud* cloud,
                                           const fecseg_rg_params* params,
                                           fecseg_labels** labels,
                                           fecseg_run_stats* stats);
/* O(N^2) brute-force connectivity partition. */
FECSEG_API fecseg_status fecseg_oracle_cluster(const fecseg_cloud* cloud,
                                               double d_th,
                                               fecseg_labels** labels);

/* ---- preprocessing ---- */

/* inlier_mask (optional) receives 1 for removed ground points, else 0. */
FECSEG_API fecseg_status fecseg_remove_ground(const fecseg_cloud* cloud,
                                              const fecseg_ground_params* params,
                                              fecseg_cloud** survivors,
                                              fecseg_ground_model* model,
                                              fecseg_labels** inlier_mask);

/* ---- synthetic data ---- */

/* recommended_d_th may be NULL. */
FECSEG_API fecseg_status fecseg_synth_generate(const fecseg_synth_config* config,
                                               fecseg_cloud** cloud,
                                               fecseg_labels** gt,
                                               double* recommended_d_th);

/* ---- metrics ---- */

FECSEG_API fecseg_status fecseg_average_precision(const fecseg_labels* pred,
                                                  const fecseg_labels* gt,
                                                  double threshold,
                                                  fecseg_overlap_mode mode,
                                                  fecseg_match_report* report);
FECSEG_API fecseg_status fecseg_rand_index(const fecseg_labels* a,
                                           const fecseg_labels* b,
                                           double* out);

#ifdef __cplusplus
}
#endif

#endif /* FECSEG_FECSEG_H */
