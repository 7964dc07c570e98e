#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "fecseg/baselines.hpp"
#include "fecseg/error.hpp"
#include "fecseg/fec.hpp"
#include "fecseg/fecseg.h"
#include "fecseg/io.hpp"
#include "fecseg/kdtree.hpp"
#include "fecseg/metrics.hpp"
#include "fecseg/preprocess.hpp"
#include "fecseg/synthgen.hpp"

struct fecseg_cloud {
  std::shared_ptr<const fecseg::PointCloud> cloud;
};

struct fecseg_labels {
  fecseg::LabelMap values;
};

struct fecseg_kdtree {
  std::shared_ptr<const fecseg::PointCloud> cloud;
  fecseg::KdTree3 tree;
};

namespace {

thread_local std::string last_error;

fecseg_status fail(fecseg_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

fecseg_status status_of(fecseg::ErrorCode code) {
  using fecseg::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidParameter: return FECSEG_ERR_PARAMETER;
    case ErrorCode::kNonFinite: return FECSEG_ERR_NON_FINITE;
    case ErrorCode::kFormat: return FECSEG_ERR_FORMAT;
    case ErrorCode::kIo: return FECSEG_ERR_IO;
    case ErrorCode::kLengthMismatch: return FECSEG_ERR_LENGTH_MISMATCH;
    case ErrorCode::kConfig: return FECSEG_ERR_CONFIG;
  }
  return FECSEG_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
fecseg_status guarded(Body&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const fecseg::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FECSEG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FECSEG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FECSEG_ERR_INTERNAL, "unknown error");
  }
}

fecseg_status null_argument(const char* name) {
  return fail(FECSEG_ERR_INVALID_ARGUMENT,
              std::string("null argument: ") + name);
}

std::size_t to_size(std::uint64_t v) {
  return v == FECSEG_UNBOUNDED ? fecseg::kUnbounded : static_cast<std::size_t>(v);
}

std::optional<fecseg::CloudFormat> to_format(fecseg_format f) {
  switch (f) {
    case FECSEG_FORMAT_KITTI_BIN: return fecseg::CloudFormat::kKittiBin;
    case FECSEG_FORMAT_PLY_ASCII: return fecseg::CloudFormat::kPlyAscii;
    case FECSEG_FORMAT_CSV_XYZ: return fecseg::CloudFormat::kCsvXyz;
    default: return std::nullopt;
  }
}

bool valid_format(fecseg_format f) {
  return f == FECSEG_FORMAT_AUTO || to_format(f).has_value();
}

fecseg::ClusterParams to_params(const fecseg_cluster_params& p) {
  fecseg::ClusterParams out;
  out.d_th = p.d_th;
  out.th_max = to_size(p.max_nn);
  out.min_cluster_size = to_size(p.min_cluster_size);
  out.max_cluster_size = to_size(p.max_cluster_size);
  return out;
}

void export_stats(const fecseg::RunStats& s, fecseg_run_stats* out) {
  if (out == nullptr) return;
  out->neighbor_queries = s.neighbor_queries;
  out->merge_relabels = s.merge_relabels;
  out->peak_label = s.peak_label;
  out->cluster_count = s.cluster_count;
  out->wall_time_seconds = s.wall_time_seconds;
}

fecseg_labels* new_labels(fecseg::LabelMap values) {
  return new fecseg_labels{std::move(values)};
}

fecseg_cloud* new_cloud(fecseg::PointCloud cloud) {
  return new fecseg_cloud{
      std::make_shared<const fecseg::PointCloud>(std::move(cloud))};
}

}  // namespace

extern "C" {

const char* fecseg_version(void) { return "1.0.0"; }

const char* fecseg_status_string(fecseg_status status) {
  switch (status) {
    case FECSEG_OK: return "ok";
    case FECSEG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FECSEG_ERR_PARAMETER: return "invalid parameter";
    case FECSEG_ERR_NON_FINITE: return "non-finite coordinate";
    case FECSEG_ERR_FORMAT: return "format error";
    case FECSEG_ERR_IO: return "i/o error";
    case FECSEG_ERR_LENGTH_MISMATCH: return "length mismatch";
    case FECSEG_ERR_CONFIG: return "invalid config";
    case FECSEG_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case FECSEG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* fecseg_last_error(void) { return last_error.c_str(); }

void fecseg_cluster_params_init(fecseg_cluster_params* params) {
  if (params == nullptr) return;
  params->d_th = 0.0;
  params->max_nn = FECSEG_UNBOUNDED;
  params->min_cluster_size = 0;
  params->max_cluster_size = FECSEG_UNBOUNDED;
}

void fecseg_fec_options_init(fecseg_fec_options* options) {
  if (options == nullptr) return;
  options->traversal = FECSEG_TRAVERSAL_EVERY_POINT;
  options->merge = FECSEG_MERGE_INDEXED;
  options->leaf_size = fecseg::KdTree3::kDefaultLeafSize;
}

void fecseg_rg_params_init(fecseg_rg_params* params) {
  if (params == nullptr) return;
  const fecseg::RgParams d;
  params->k_normals = d.k_normals;
  params->angle_th = d.angle_th;
  params->curvature_th = d.curvature_th;
  params->d_th = 0.0;
  params->max_nn = FECSEG_UNBOUNDED;
  params->min_cluster_size = 0;
  params->max_cluster_size = FECSEG_UNBOUNDED;
}

void fecseg_ground_params_init(fecseg_ground_params* params) {
  if (params == nullptr) return;
  const fecseg::GroundParams d;
  params->inlier_threshold = d.inlier_threshold;
  params->max_iterations = d.max_iterations;
  params->max_tilt = d.max_tilt;
  params->rng_seed = d.rng_seed;
}

void fecseg_synth_config_init(fecseg_synth_config* config) {
  if (config == nullptr) return;
  const fecseg::SynthConfig d;
  config->n_clusters = d.n_clusters;
  config->density = d.density;
  config->voxel_edge = d.voxel_edge;
  config->shift_sigma = d.shift_sigma;
  config->sub_clusters = d.sub_clusters;
  config->rng_seed = d.rng_seed;
}

// ---- clouds ----

fecseg_status fecseg_cloud_create(const double* xyz, const float* intensity,
                                  size_t count, fecseg_cloud** out) {
  if (out == nullptr) return null_argument("out");
  if (xyz == nullptr && count > 0) return null_argument("xyz");
  return guarded([&] {
    std::vector<fecseg::Point3> pts(count);
    for (std::size_t i = 0; i < count; ++i) {
      pts[i] = {xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2], std::nullopt};
      if (intensity != nullptr) pts[i].intensity = intensity[i];
    }
    *out = new_cloud(fecseg::PointCloud(std::move(pts)));
    return FECSEG_OK;
  });
}

void fecseg_cloud_destroy(fecseg_cloud* cloud) { delete cloud; }

size_t fecseg_cloud_size(const fecseg_cloud* cloud) {
  return cloud == nullptr ? 0 : cloud->cloud->size();
}

fecseg_status fecseg_cloud_copy_xyz(const fecseg_cloud* cloud, double* xyz,
                                    size_t capacity) {
  if (cloud == nullptr) return null_argument("cloud");
  const auto& c = *cloud->cloud;
  if (capacity < 3 * c.size()) {
    return fail(FECSEG_ERR_BUFFER_TOO_SMALL, "xyz buffer holds fewer than 3*N doubles");
  }
  if (xyz == nullptr && !c.empty()) return null_argument("xyz");
  for (std::size_t i = 0; i < c.size(); ++i) {
    xyz[3 * i] = c[i].x;
    xyz[3 * i + 1] = c[i].y;
    xyz[3 * i + 2] = c[i].z;
  }
  return FECSEG_OK;
}

fecseg_status fecseg_cloud_read(const char* path, fecseg_format format,
                                fecseg_cloud** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  if (!valid_format(format)) return fail(FECSEG_ERR_INVALID_ARGUMENT, "unknown format");
  return guarded([&] {
    *out = new_cloud(fecseg::read_cloud(path, to_format(format)));
    return FECSEG_OK;
  });
}

fecseg_status fecseg_cloud_write(const fecseg_cloud* cloud, const char* path,
                                 fecseg_format format) {
  if (cloud == nullptr) return null_argument("cloud");
  if (path == nullptr) return null_argument("path");
  if (!valid_format(format)) return fail(FECSEG_ERR_INVALID_ARGUMENT, "unknown format");
  return guarded([&] {
    fecseg::write_cloud(*cloud->cloud, path, to_format(format));
    return FECSEG_OK;
  });
}

fecseg_status fecseg_format_from_name(const char* name, fecseg_format* out) {
  if (name == nullptr) return null_argument("name");
  if (out == nullptr) return null_argument("out");
  if (std::strcmp(name, "auto") == 0) {
    *out = FECSEG_FORMAT_AUTO;
    return FECSEG_OK;
  }
  const auto f = fecseg::parse_format_name(name);
  if (!f) {
    return fail(FECSEG_ERR_INVALID_ARGUMENT,
                std::string("unknown format name '") + name + "'");
  }
  switch (*f) {
    case fecseg::CloudFormat::kKittiBin: *out = FECSEG_FORMAT_KITTI_BIN; break;
    case fecseg::CloudFormat::kPlyAscii: *out = FECSEG_FORMAT_PLY_ASCII; break;
    case fecseg::CloudFormat::kCsvXyz: *out = FECSEG_FORMAT_CSV_XYZ; break;
  }
  return FECSEG_OK;
}

// ---- label maps ----

fecseg_status fecseg_labels_create(const uint32_t* values, size_t count,
                                   fecseg_labels** out) {
  if (out == nullptr) return null_argument("out");
  if (values == nullptr && count > 0) return null_argument("values");
  return guarded([&] {
    *out = new_labels(fecseg::LabelMap(values, values + count));
    return FECSEG_OK;
  });
}

void fecseg_labels_destroy(fecseg_labels* labels) { delete labels; }

size_t fecseg_labels_size(const fecseg_labels* labels) {
  return labels == nullptr ? 0 : labels->values.size();
}

const uint32_t* fecseg_labels_data(const fecseg_labels* labels) {
  if (labels == nullptr || labels->values.empty()) return nullptr;
  return labels->values.data();
}

size_t fecseg_labels_cluster_count(const fecseg_labels* labels) {
  return labels == nullptr ? 0 : fecseg::count_clusters(labels->values);
}

fecseg_status fecseg_labels_compact(const fecseg_labels* labels,
                                    fecseg_labels** out) {
  if (labels == nullptr) return null_argument("labels");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new_labels(fecseg::compact_labels(labels->values));
    return FECSEG_OK;
  });
}

fecseg_status fecseg_labels_read(const char* path, fecseg_labels** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new_labels(fecseg::read_labels(path));
    return FECSEG_OK;
  });
}

fecseg_status fecseg_labels_write(const fecseg_labels* labels, const char* path) {
  if (labels == nullptr) return null_argument("labels");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    fecseg::write_labels(labels->values, path);
    return FECSEG_OK;
  });
}

fecseg_status fecseg_write_colored_ply(const fecseg_cloud* cloud,
                                       const fecseg_labels* labels,
                                       const char* path) {
  if (cloud == nullptr) return null_argument("cloud");
  if (labels == nullptr) return null_argument("labels");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    fecseg::write_colored_ply(*cloud->cloud, labels->values, path);
    return FECSEG_OK;
  });
}

// ---- spatial index ----

fecseg_status fecseg_kdtree_build(const fecseg_cloud* cloud, uint64_t leaf_size,
                                  fecseg_kdtree** out) {
  if (cloud == nullptr) return null_argument("cloud");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new fecseg_kdtree{cloud->cloud,
                             fecseg::KdTree3(*cloud->cloud, to_size(leaf_size))};
    return FECSEG_OK;
  });
}

void fecseg_kdtree_destroy(fecseg_kdtree* tree) { delete tree; }

fecseg_status fecseg_kdtree_radius_query(const fecseg_kdtree* tree,
                                         const double query[3], double radius,
                                         uint64_t cap, uint32_t* indices,
                                         double* distances, size_t capacity,
                                         size_t* count) {
  if (tree == nullptr) return null_argument("tree");
  if (query == nullptr) return null_argument("query");
  if (count == nullptr) return null_argument("count");
  if (!(radius > 0.0)) return fail(FECSEG_ERR_PARAMETER, "radius must be positive");
  if (cap < 1) return fail(FECSEG_ERR_PARAMETER, "cap must be >= 1");
  return guarded([&] {
    const auto hits = tree->tree.radius_query({query[0], query[1], query[2], {}},
                                              radius, to_size(cap));
    *count = hits.size();
    if (hits.size() > capacity) {
      return fail(FECSEG_ERR_BUFFER_TOO_SMALL, "result exceeds capacity");
    }
    if (indices == nullptr && !hits.empty()) return null_argument("indices");
    std::copy(hits.indices.begin(), hits.indices.end(), indices);
    if (distances != nullptr) {
      std::copy(hits.distances.begin(), hits.distances.end(), distances);
    }
    return FECSEG_OK;
  });
}

// ---- clustering ----

fecseg_status fecseg_fec_cluster(const fecseg_cloud* cloud,
                                 const fecseg_cluster_params* params,
                                 const fecseg_fec_options* options,
                                 fecseg_labels** labels,
                                 fecseg_run_stats* stats) {
  if (cloud == nullptr) return null_argument("cloud");
  if (params == nullptr) return null_argument("params");
  if (labels == nullptr) return null_argument("labels");
  fecseg::FecOptions opts;
  if (options != nullptr) {
    switch (options->traversal) {
      case FECSEG_TRAVERSAL_EVERY_POINT:
        opts.traversal = fecseg::FecTraversal::kEveryPoint;
        break;
      case FECSEG_TRAVERSAL_SKIP_LABELED:
        opts.traversal = fecseg::FecTraversal::kSkipLabeled;
        break;
      default: return fail(FECSEG_ERR_INVALID_ARGUMENT, "unknown traversal");
    }
    switch (options->merge) {
      case FECSEG_MERGE_INDEXED: opts.merge = fecseg::FecMerge::kIndexed; break;
      case FECSEG_MERGE_SWEEP: opts.merge = fecseg::FecMerge::kSweep; break;
      default: return fail(FECSEG_ERR_INVALID_ARGUMENT, "unknown merge strategy");
    }
    opts.leaf_size = to_size(options->leaf_size);
  }
  return guarded([&] {
    auto result = fecseg::fec_cluster(*cloud->cloud, to_params(*params), opts);
    export_stats(result.stats, stats);
    *labels = new_labels(std::move(result.labels));
    return FECSEG_OK;
  });
}

fecseg_status fecseg_ec_cluster(const fecseg_cloud* cloud,
                                const fecseg_cluster_params* params,
                                fecseg_labels** labels, fecseg_run_stats* stats) {
  if (cloud == nullptr) return null_argument("cloud");
  if (params == nullptr) return null_argument("params");
  if (labels == nullptr) return null_argument("labels");
  return guarded([&] {
    auto result = fecseg::ec_cluster(*cloud->cloud, to_params(*params));
    export_stats(result.stats, stats);
    *labels = new_labels(std::move(result.labels));
    return FECSEG_OK;
  });
}

fecseg_status fecseg_rg_cluster(const fecseg_cloud* cloud,
                                const fecseg_rg_params* params,
                                fecseg_labels** labels, fecseg_run_stats* stats) {
  if (cloud == nullptr) return null_argument("cloud");
  if (params == nullptr) return null_argument("params");
  if (labels == nullptr) return null_argument("labels");
  return guarded([&] {
    fecseg::RgParams p;
    p.k_normals = to_size(params->k_normals);
    p.angle_th = params->angle_th;
    p.curvature_th = params->curvature_th;
    p.d_th = params->d_th;
    p.th_max = to_size(params->max_nn);
    p.min_cluster_size = to_size(params->min_cluster_size);
    p.max_cluster_size = to_size(params->max_cluster_size);
    auto result = fecseg::rg_cluster(*cloud->cloud, p);
    export_stats(result.stats, stats);
    *labels = new_labels(std::move(result.labels));
    return FECSEG_OK;
  });
}

fecseg_status fecseg_oracle_cluster(const fecseg_cloud* cloud, double d_th,
                                    fecseg_labels** labels) {
  if (cloud == nullptr) return null_argument("cloud");
  if (labels == nullptr) return null_argument("labels");
  return guarded([&] {
    *labels = new_labels(fecseg::oracle_cluster(*cloud->cloud, d_th));
    return FECSEG_OK;
  });
}

// ---- preprocessing ----

fecseg_status fecseg_remove_ground(const fecseg_cloud* cloud,
                                   const fecseg_ground_params* params,
                                   fecseg_cloud** survivors,
                                   fecseg_ground_model* model,
                                   fecseg_labels** inlier_mask) {
  if (cloud == nullptr) return null_argument("cloud");
  if (params == nullptr) return null_argument("params");
  if (survivors == nullptr) return null_argument("survivors");
  return guarded([&] {
    fecseg::GroundParams p;
    p.inlier_threshold = params->inlier_threshold;
    p.max_iterations = params->max_iterations;
    p.max_tilt = params->max_tilt;
    p.rng_seed = params->rng_seed;
    auto result = fecseg::remove_ground(*cloud->cloud, p);
    if (model != nullptr) {
      std::copy(result.model.normal.begin(), result.model.normal.end(), model->normal);
      model->offset = result.model.offset;
      model->inlier_threshold = result.model.inlier_threshold;
      model->inlier_count = result.model.inlier_indices.size();
      model->found = result.model.found() ? 1 : 0;
    }
    if (inlier_mask != nullptr) {
      fecseg::LabelMap mask(cloud->cloud->size(), 0);
      for (const auto i : result.model.inlier_indices) mask[i] = 1;
      *inlier_mask = new_labels(std::move(mask));
    }
    *survivors = new_cloud(std::move(result.survivors));
    return FECSEG_OK;
  });
}

// ---- synthetic data ----

fecseg_status fecseg_synth_generate(const fecseg_synth_config* config,
                                    fecseg_cloud** cloud, fecseg_labels** gt,
                                    double* recommended_d_th) {
  if (config == nullptr) return null_argument("config");
  if (cloud == nullptr) return null_argument("cloud");
  if (gt == nullptr) return null_argument("gt");
  return guarded([&] {
    fecseg::SynthConfig c;
    c.n_clusters = static_cast<std::size_t>(config->n_clusters);
    c.density = static_cast<std::size_t>(config->density);
    c.voxel_edge = config->voxel_edge;
    c.shift_sigma = config->shift_sigma;
    c.sub_clusters = static_cast<std::size_t>(config->sub_clusters);
    c.rng_seed = config->rng_seed;
    auto generated = fecseg::generate(c);
    if (recommended_d_th != nullptr) *recommended_d_th = generated.recommended_d_th;
    auto* labels = new_labels(std::move(generated.gt));
    *cloud = new_cloud(std::move(generated.cloud));
    *gt = labels;
    return FECSEG_OK;
  });
}

// ---- metrics ----

fecseg_status fecseg_average_precision(const fecseg_labels* pred,
                                       const fecseg_labels* gt,
                                       double threshold,
                                       fecseg_overlap_mode mode,
                                       fecseg_match_report* report) {
  if (pred == nullptr) return null_argument("pred");
  if (gt == nullptr) return null_argument("gt");
  if (report == nullptr) return null_argument("report");
  fecseg::OverlapMode m;
  switch (mode) {
    case FECSEG_OVERLAP_IOU: m = fecseg::OverlapMode::kIoU; break;
    case FECSEG_OVERLAP_PRECISION: m = fecseg::OverlapMode::kPrecision; break;
    default: return fail(FECSEG_ERR_INVALID_ARGUMENT, "unknown overlap mode");
  }
  return guarded([&] {
    const auto r = fecseg::average_precision(pred->values, gt->values, threshold, m);
    report->tp = r.tp;
    report->fp = r.fp;
    report->matched_pairs = r.matched_pairs.size();
    report->ap = r.ap;
    return FECSEG_OK;
  });
}

fecseg_status fecseg_rand_index(const fecseg_labels* a, const fecseg_labels* b,
                                double* out) {
  if (a == nullptr || b == nullptr) return null_argument("labels");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = fecseg::rand_index(a->values, b->values);
    return FECSEG_OK;
  });
}

}  // extern "C"
