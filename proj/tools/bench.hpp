#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fecseg/fecseg.h"

namespace fecseg_cli {

struct BenchSpec {
  std::vector<std::uint64_t> n_clusters{100};
  std::vector<std::uint64_t> densities{200};
  std::vector<std::uint64_t> sub_clusters{1};
  std::vector<std::string> algorithms{"fec", "ec", "rg"};
  unsigned repetitions = 3;
  std::uint64_t seed = 0;
  double voxel_edge = 1.0;
  double shift_sigma = 0.0;
  std::optional<double> d_th;  ///< default: each config's recommended radius
  std::uint64_t max_nn = FECSEG_UNBOUNDED;
  double ap_threshold = 0.75;
  fecseg_fec_options fec{};
  fecseg_rg_params rg{};  ///< d_th is overwritten per config
};

/// One measured (algorithm, config, repetition) run. Column order of the
/// CSV follows the field order here.
struct BenchRow {
  std::string algorithm;
  std::uint64_t n_clusters = 0;
  std::uint64_t density = 0;
  std::uint64_t sub_clusters = 0;
  std::uint64_t point_count = 0;
  double wall_time_seconds = 0.0;
  std::uint64_t neighbor_queries = 0;
  std::uint64_t merge_relabels = 0;
  double ap_vs_gt = 0.0;
  std::uint64_t rng_seed = 0;
};

inline constexpr const char* kBenchHeader =
    "algorithm,n_clusters,density,sub_clusters,point_count,wall_time_seconds,"
    "neighbor_queries,merge_relabels,ap_vs_gt,rng_seed";

void write_bench_row(std::ostream& out, const BenchRow& row);

struct BenchOutcome {
  std::vector<BenchRow> rows;
  std::size_t configs_ok = 0;
  std::size_t configs_failed = 0;
};

/// Runs the Cartesian sweep serially. Invalid configs are reported on `log`
/// and skipped.
BenchOutcome run_bench(const BenchSpec& spec, std::ostream& log);

}  // namespace fecseg_cli
