#include "bench.hpp"

#include <cstdio>
#include <ostream>

#include "capi.hpp"

namespace fecseg_cli {

namespace {

struct Run {
  Labels labels;
  fecseg_run_stats stats{};
};

Run cluster(const std::string& algorithm, const fecseg_cloud* cloud, double d_th,
            const BenchSpec& spec) {
  Run run;
  fecseg_labels* raw = nullptr;
  if (algorithm == "fec" || algorithm == "ec") {
    fecseg_cluster_params p;
    fecseg_cluster_params_init(&p);
    p.d_th = d_th;
    p.max_nn = spec.max_nn;
    if (algorithm == "fec") {
      check(fecseg_fec_cluster(cloud, &p, &spec.fec, &raw, &run.stats));
    } else {
      check(fecseg_ec_cluster(cloud, &p, &raw, &run.stats));
    }
  } else if (algorithm == "rg") {
    auto p = spec.rg;
    p.d_th = d_th;
    p.max_nn = spec.max_nn;
    check(fecseg_rg_cluster(cloud, &p, &raw, &run.stats));
  } else {
    throw ApiError(FECSEG_ERR_INVALID_ARGUMENT, "unknown algorithm '" + algorithm + "'");
  }
  run.labels.reset(raw);
  return run;
}

}  // namespace

void write_bench_row(std::ostream& out, const BenchRow& row) {
  char time_buf[32];
  char ap_buf[32];
  std::snprintf(time_buf, sizeof time_buf, "%.9g", row.wall_time_seconds);
  std::snprintf(ap_buf, sizeof ap_buf, "%.6f", row.ap_vs_gt);
  out << row.algorithm << ',' << row.n_clusters << ',' << row.density << ','
      << row.sub_clusters << ',' << row.point_count << ',' << time_buf << ','
      << row.neighbor_queries << ',' << row.merge_relabels << ',' << ap_buf
      << ',' << row.rng_seed << '\n';
}

BenchOutcome run_bench(const BenchSpec& spec, std::ostream& log) {
  BenchOutcome outcome;
  for (const auto n : spec.n_clusters) {
    for (const auto m : spec.densities) {
      for (const auto s : spec.sub_clusters) {
        fecseg_synth_config cfg;
        fecseg_synth_config_init(&cfg);
        cfg.n_clusters = n;
        cfg.density = m;
        cfg.sub_clusters = s;
        cfg.voxel_edge = spec.voxel_edge;
        cfg.shift_sigma = spec.shift_sigma;
        cfg.rng_seed = spec.seed;

        fecseg_cloud* raw_cloud = nullptr;
        fecseg_labels* raw_gt = nullptr;
        double recommended = 0.0;
        const auto status = fecseg_synth_generate(&cfg, &raw_cloud, &raw_gt, &recommended);
        if (status != FECSEG_OK) {
          log << "skipping config n=" << n << " m=" << m << " sub_clusters=" << s
              << ": " << fecseg_last_error() << '\n';
          ++outcome.configs_failed;
          continue;
        }
        const Cloud cloud(raw_cloud);
        const Labels gt(raw_gt);
        const double d_th = spec.d_th.value_or(recommended);

        bool failed = false;
        for (const auto& algorithm : spec.algorithms) {
          for (unsigned rep = 0; rep < spec.repetitions; ++rep) {
            Run run;
            try {
              run = cluster(algorithm, cloud.get(), d_th, spec);
            } catch (const ApiError& e) {
              if (e.status() == FECSEG_ERR_INVALID_ARGUMENT) throw;
              log << "skipping " << algorithm << " on config n=" << n << " m=" << m
                  << ": " << e.what() << '\n';
              failed = true;
              break;
            }
            fecseg_match_report report{};
            check(fecseg_average_precision(run.labels.get(), gt.get(),
                                           spec.ap_threshold, FECSEG_OVERLAP_IOU,
                                           &report));
            BenchRow row;
            row.algorithm = algorithm;
            row.n_clusters = n;
            row.density = m;
            row.sub_clusters = s;
            row.point_count = fecseg_cloud_size(cloud.get());
            row.wall_time_seconds = run.stats.wall_time_seconds;
            row.neighbor_queries = run.stats.neighbor_queries;
            row.merge_relabels = run.stats.merge_relabels;
            row.ap_vs_gt = report.ap;
            row.rng_seed = spec.seed;
            outcome.rows.push_back(std::move(row));
          }
        }
        if (failed) {
          ++outcome.configs_failed;
        } else {
          ++outcome.configs_ok;
        }
      }
    }
  }
  return outcome;
}

}  // namespace fecseg_cli
