// fecseg command-line tool: clustering runs, synthetic sweeps, evaluation,
// ground removal and synthetic data export. Uses only the C interface.

#include <sys/resource.h>

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "bench.hpp"
#include "capi.hpp"

namespace fecseg_cli {

namespace {

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Best-effort peak resident set size; empty when unavailable.
std::string peak_rss_mb() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", static_cast<double>(usage.ru_maxrss) / 1024.0);
  return buf;
}

std::string fmt_double(double v, const char* spec = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct ClusterOptions {
  std::string input;
  std::string format = "auto";
  std::string algorithm = "fec";
  double d_th = 0.0;
  std::uint64_t max_nn = 50;
  std::uint64_t min_cluster_size = 0;
  std::uint64_t max_cluster_size = FECSEG_UNBOUNDED;
  std::string traversal = "every-point";
  std::string merge = "indexed";
  std::uint64_t k_normals = 30;
  double angle_th_deg = 3.0;
  double curvature_th = 1.0;
  std::string output;
  std::string colored_ply;
  bool remove_ground = false;
  double ground_threshold = 0.2;
  double max_tilt_deg = 30.0;
  std::uint32_t ground_iterations = 100;
  std::uint64_t seed = 0;
};

fecseg_fec_options fec_options(const std::string& traversal,
                               const std::string& merge) {
  fecseg_fec_options o;
  fecseg_fec_options_init(&o);
  o.traversal = traversal == "skip-labeled" ? FECSEG_TRAVERSAL_SKIP_LABELED
                                            : FECSEG_TRAVERSAL_EVERY_POINT;
  o.merge = merge == "sweep" ? FECSEG_MERGE_SWEEP : FECSEG_MERGE_INDEXED;
  return o;
}

int cmd_cluster(const ClusterOptions& o) {
  const auto input = read_cloud(o.input, parse_format(o.format));
  const auto n = fecseg_cloud_size(input.get());

  // Optional ground removal; labels are reported against the input cloud
  // with removed ground points at 0.
  Cloud survivors;
  Labels ground_mask;
  fecseg_ground_model model{};
  double ground_seconds = 0.0;
  const fecseg_cloud* work = input.get();
  if (o.remove_ground) {
    fecseg_ground_params gp;
    fecseg_ground_params_init(&gp);
    gp.inlier_threshold = o.ground_threshold;
    gp.max_tilt = deg_to_rad(o.max_tilt_deg);
    gp.max_iterations = o.ground_iterations;
    gp.rng_seed = o.seed;
    fecseg_cloud* raw = nullptr;
    fecseg_labels* mask = nullptr;
    const auto start = std::chrono::steady_clock::now();
    check(fecseg_remove_ground(input.get(), &gp, &raw, &model, &mask));
    ground_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    survivors.reset(raw);
    ground_mask.reset(mask);
    work = survivors.get();
  }

  fecseg_run_stats stats{};
  fecseg_labels* raw_labels = nullptr;
  if (o.algorithm == "fec" || o.algorithm == "ec") {
    fecseg_cluster_params p;
    fecseg_cluster_params_init(&p);
    p.d_th = o.d_th;
    p.max_nn = o.max_nn;
    p.min_cluster_size = o.min_cluster_size;
    p.max_cluster_size = o.max_cluster_size;
    if (o.algorithm == "fec") {
      const auto opts = fec_options(o.traversal, o.merge);
      check(fecseg_fec_cluster(work, &p, &opts, &raw_labels, &stats));
    } else {
      check(fecseg_ec_cluster(work, &p, &raw_labels, &stats));
    }
  } else {
    fecseg_rg_params p;
    fecseg_rg_params_init(&p);
    p.d_th = o.d_th;
    p.max_nn = o.max_nn;
    p.k_normals = o.k_normals;
    p.angle_th = deg_to_rad(o.angle_th_deg);
    p.curvature_th = o.curvature_th;
    p.min_cluster_size = o.min_cluster_size;
    p.max_cluster_size = o.max_cluster_size;
    check(fecseg_rg_cluster(work, &p, &raw_labels, &stats));
  }
  Labels labels(raw_labels);

  if (o.remove_ground) {
    const auto mask = view(ground_mask);
    const auto inner = view(labels);
    std::vector<uint32_t> full(n, 0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] == 0) full[i] = inner[next++];
    }
    fecseg_labels* raw = nullptr;
    check(fecseg_labels_create(full.data(), full.size(), &raw));
    labels.reset(raw);
  }

  check(fecseg_labels_write(labels.get(), o.output.c_str()));
  if (!o.colored_ply.empty()) {
    check(fecseg_write_colored_ply(input.get(), labels.get(), o.colored_ply.c_str()));
  }

  std::cout << "algorithm=" << o.algorithm << " points=" << n
            << " clustered_points=" << fecseg_cloud_size(work)
            << " clusters=" << stats.cluster_count
            << " wall_time_seconds=" << fmt_double(stats.wall_time_seconds)
            << " neighbor_queries=" << stats.neighbor_queries
            << " merge_relabels=" << stats.merge_relabels
            << " peak_label=" << stats.peak_label;
  if (o.remove_ground) {
    std::cout << " ground_points=" << model.inlier_count
              << " ground_time_seconds=" << fmt_double(ground_seconds);
  }
  std::cout << " peak_rss_mb=" << peak_rss_mb() << '\n';
  return 0;
}

struct BenchOptions {
  BenchSpec spec;
  std::string output;
  std::string traversal = "every-point";
  std::string merge = "indexed";
  double angle_th_deg = 3.0;
  std::uint64_t k_normals = 30;
  double curvature_th = 1.0;
};

int cmd_bench(BenchOptions o) {
  o.spec.fec = fec_options(o.traversal, o.merge);
  fecseg_rg_params_init(&o.spec.rg);
  o.spec.rg.k_normals = o.k_normals;
  o.spec.rg.angle_th = deg_to_rad(o.angle_th_deg);
  o.spec.rg.curvature_th = o.curvature_th;

  const auto outcome = run_bench(o.spec, std::cerr);
  std::ofstream csv(o.output, std::ios::trunc);
  if (!csv) {
    std::cerr << "error: cannot open '" << o.output << "' for writing\n";
    return 1;
  }
  csv << kBenchHeader << '\n';
  for (const auto& row : outcome.rows) write_bench_row(csv, row);
  csv.flush();
  if (!csv) {
    std::cerr << "error: write failed for '" << o.output << "'\n";
    return 1;
  }

  // Median wall time per (algorithm, config) for a quick look.
  std::map<std::tuple<std::string, std::uint64_t, std::uint64_t, std::uint64_t>,
           std::vector<const BenchRow*>>
      groups;
  for (const auto& row : outcome.rows) {
    groups[{row.algorithm, row.n_clusters, row.density, row.sub_clusters}].push_back(&row);
  }
  for (auto& [key, rows] : groups) {
    std::vector<double> times;
    for (const auto* r : rows) times.push_back(r->wall_time_seconds);
    std::sort(times.begin(), times.end());
    std::cout << "algorithm=" << std::get<0>(key) << " n_clusters=" << std::get<1>(key)
              << " density=" << std::get<2>(key) << " sub_clusters=" << std::get<3>(key)
              << " points=" << rows.front()->point_count
              << " median_wall_time_seconds=" << fmt_double(times[times.size() / 2])
              << " ap_vs_gt=" << fmt_double(rows.front()->ap_vs_gt, "%.6f") << '\n';
  }
  if (outcome.configs_ok == 0) {
    std::cerr << "error: no benchmark configuration succeeded\n";
    return 1;
  }
  return 0;
}

struct EvalOptions {
  std::string pred;
  std::string gt;
  double threshold = 0.75;
  std::string overlap = "iou";
  bool json = false;
};

int cmd_eval(const EvalOptions& o) {
  const auto pred = read_labels(o.pred);
  const auto gt = read_labels(o.gt);
  fecseg_match_report report{};
  check(fecseg_average_precision(
      pred.get(), gt.get(), o.threshold,
      o.overlap == "precision" ? FECSEG_OVERLAP_PRECISION : FECSEG_OVERLAP_IOU,
      &report));
  if (o.json) {
    nlohmann::json j;
    j["tp"] = report.tp;
    j["fp"] = report.fp;
    j["ap"] = report.ap;
    j["threshold"] = o.threshold;
    j["overlap"] = o.overlap;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << "tp,fp,ap\n"
              << report.tp << ',' << report.fp << ',' << fmt_double(report.ap, "%.6f")
              << '\n';
  }
  return 0;
}

struct GroundOptions {
  std::string input;
  std::string format = "auto";
  std::string output;
  std::string output_format = "auto";
  double threshold = 0.2;
  double max_tilt_deg = 30.0;
  std::uint32_t iterations = 100;
  std::uint64_t seed = 0;
};

int cmd_ground_remove(const GroundOptions& o) {
  const auto input = read_cloud(o.input, parse_format(o.format));
  fecseg_ground_params gp;
  fecseg_ground_params_init(&gp);
  gp.inlier_threshold = o.threshold;
  gp.max_tilt = deg_to_rad(o.max_tilt_deg);
  gp.max_iterations = o.iterations;
  gp.rng_seed = o.seed;

  fecseg_cloud* raw = nullptr;
  fecseg_ground_model model{};
  check(fecseg_remove_ground(input.get(), &gp, &raw, &model, nullptr));
  const Cloud survivors(raw);
  check(fecseg_cloud_write(survivors.get(), o.output.c_str(),
                           parse_format(o.output_format)));

  if (model.found) {
    std::cout << "ground found: normal=(" << fmt_double(model.normal[0]) << ','
              << fmt_double(model.normal[1]) << ',' << fmt_double(model.normal[2])
              << ") offset=" << fmt_double(model.offset)
              << " inliers=" << model.inlier_count;
  } else {
    std::cout << "no ground found: inliers=0";
  }
  std::cout << " survivors=" << fecseg_cloud_size(survivors.get()) << '\n';
  return 0;
}

struct GenOptions {
  fecseg_synth_config config{};
  std::string output;
  std::string gt;
  std::string format = "auto";
};

int cmd_gen(const GenOptions& o) {
  fecseg_cloud* raw_cloud = nullptr;
  fecseg_labels* raw_gt = nullptr;
  double recommended = 0.0;
  check(fecseg_synth_generate(&o.config, &raw_cloud, &raw_gt, &recommended));
  const Cloud cloud(raw_cloud);
  const Labels gt(raw_gt);
  check(fecseg_cloud_write(cloud.get(), o.output.c_str(), parse_format(o.format)));
  if (!o.gt.empty()) check(fecseg_labels_write(gt.get(), o.gt.c_str()));
  std::cout << "points=" << fecseg_cloud_size(cloud.get())
            << " clusters=" << o.config.n_clusters
            << " recommended_d_th=" << fmt_double(recommended) << '\n';
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Euclidean point-cloud instance segmentation (fec, ec, rg)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fecseg_version());

  const std::vector<std::string> formats{"auto", "kitti_bin", "ply_ascii", "csv_xyz",
                                         "kitti", "bin", "ply", "csv"};
  const std::vector<std::string> traversals{"every-point", "skip-labeled"};
  const std::vector<std::string> merges{"indexed", "sweep"};

  ClusterOptions co;
  auto* cluster = app.add_subcommand("cluster", "Cluster a point cloud file");
  cluster->add_option("input", co.input, "Input point cloud")->required();
  cluster->add_option("--format", co.format, "Input format")
      ->check(CLI::IsMember(formats))->capture_default_str();
  cluster->add_option("--algorithm", co.algorithm, "fec, ec or rg")
      ->check(CLI::IsMember({"fec", "ec", "rg"}))->capture_default_str();
  cluster->add_option("--d-th", co.d_th, "Neighbor radius (m)")->required()
      ->check(CLI::PositiveNumber);
  cluster->add_option("--max-nn", co.max_nn, "Max neighbors per radius query")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cluster->add_option("--min-cluster-size", co.min_cluster_size)->capture_default_str();
  cluster->add_option("--max-cluster-size", co.max_cluster_size);
  cluster->add_option("--fec-traversal", co.traversal)
      ->check(CLI::IsMember(traversals))->capture_default_str();
  cluster->add_option("--fec-merge", co.merge)
      ->check(CLI::IsMember(merges))->capture_default_str();
  cluster->add_option("--k-normals", co.k_normals, "RG normal neighborhood")
      ->capture_default_str();
  cluster->add_option("--angle-th-deg", co.angle_th_deg, "RG smoothness angle")
      ->capture_default_str();
  cluster->add_option("--curvature-th", co.curvature_th, "RG seed curvature")
      ->capture_default_str();
  cluster->add_option("--output", co.output, "Labels CSV (index,label)")->required();
  cluster->add_option("--colored-ply", co.colored_ply, "Colored PLY export");
  cluster->add_flag("--remove-ground", co.remove_ground, "RANSAC ground removal first");
  cluster->add_option("--ground-threshold", co.ground_threshold)->capture_default_str();
  cluster->add_option("--max-tilt-deg", co.max_tilt_deg)->capture_default_str();
  cluster->add_option("--ground-iterations", co.ground_iterations)->capture_default_str();
  cluster->add_option("--seed", co.seed, "Ground-removal RNG seed")->capture_default_str();

  BenchOptions bo;
  auto* bench = app.add_subcommand("bench", "Synthetic benchmark sweep");
  bench->add_option("--n-clusters", bo.spec.n_clusters)->delimiter(',')->capture_default_str();
  bench->add_option("--density", bo.spec.densities)->delimiter(',')->capture_default_str();
  bench->add_option("--sub-clusters", bo.spec.sub_clusters)->delimiter(',')->capture_default_str();
  bench->add_option("--algorithms", bo.spec.algorithms)->delimiter(',')
      ->check(CLI::IsMember({"fec", "ec", "rg"}))->capture_default_str();
  bench->add_option("--repetitions", bo.spec.repetitions)->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--seed", bo.spec.seed)->capture_default_str();
  bench->add_option("--voxel-edge", bo.spec.voxel_edge)->capture_default_str();
  bench->add_option("--shift-sigma", bo.spec.shift_sigma)->capture_default_str();
  bench->add_option("--d-th", bo.spec.d_th, "Fixed radius (default: per config)");
  bench->add_option("--max-nn", bo.spec.max_nn)->check(CLI::PositiveNumber);
  bench->add_option("--threshold", bo.spec.ap_threshold, "AP overlap threshold")
      ->capture_default_str();
  bench->add_option("--fec-traversal", bo.traversal)
      ->check(CLI::IsMember(traversals))->capture_default_str();
  bench->add_option("--fec-merge", bo.merge)->check(CLI::IsMember(merges))
      ->capture_default_str();
  bench->add_option("--k-normals", bo.k_normals)->capture_default_str();
  bench->add_option("--angle-th-deg", bo.angle_th_deg)->capture_default_str();
  bench->add_option("--curvature-th", bo.curvature_th)->capture_default_str();
  bench->add_option("--output", bo.output, "Bench CSV")->required();

  EvalOptions eo;
  auto* eval = app.add_subcommand("eval", "Score predicted labels against ground truth");
  eval->add_option("pred", eo.pred, "Predicted labels CSV")->required();
  eval->add_option("gt", eo.gt, "Ground-truth labels CSV")->required();
  eval->add_option("--threshold", eo.threshold)->capture_default_str();
  eval->add_option("--overlap", eo.overlap)
      ->check(CLI::IsMember({"iou", "precision"}))->capture_default_str();
  eval->add_flag("--json", eo.json, "Print the report as JSON");

  GroundOptions go;
  auto* ground = app.add_subcommand("ground-remove", "Remove the ground plane");
  ground->add_option("input", go.input)->required();
  ground->add_option("--format", go.format)->check(CLI::IsMember(formats))
      ->capture_default_str();
  ground->add_option("--output", go.output, "Survivor cloud")->required();
  ground->add_option("--output-format", go.output_format)->check(CLI::IsMember(formats))
      ->capture_default_str();
  ground->add_option("--threshold", go.threshold, "Inlier distance (m)")
      ->capture_default_str();
  ground->add_option("--max-tilt-deg", go.max_tilt_deg)->capture_default_str();
  ground->add_option("--iterations", go.iterations)->capture_default_str();
  ground->add_option("--seed", go.seed)->capture_default_str();

  GenOptions ge;
  fecseg_synth_config_init(&ge.config);
  auto* gen = app.add_subcommand("gen", "Write a synthetic labeled cloud");
  gen->add_option("--n-clusters", ge.config.n_clusters)->capture_default_str();
  gen->add_option("--density", ge.config.density)->capture_default_str();
  gen->add_option("--voxel-edge", ge.config.voxel_edge)->capture_default_str();
  gen->add_option("--shift-sigma", ge.config.shift_sigma)->capture_default_str();
  gen->add_option("--sub-clusters", ge.config.sub_clusters)->capture_default_str();
  gen->add_option("--seed", ge.config.rng_seed)->capture_default_str();
  gen->add_option("--output", ge.output, "Cloud file")->required();
  gen->add_option("--gt", ge.gt, "Ground-truth labels CSV");
  gen->add_option("--format", ge.format)->check(CLI::IsMember(formats))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cluster->parsed()) return cmd_cluster(co);
    if (bench->parsed()) return cmd_bench(bo);
    if (eval->parsed()) return cmd_eval(eo);
    if (ground->parsed()) return cmd_ground_remove(go);
    if (gen->parsed()) return cmd_gen(ge);
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace fecseg_cli

int main(int argc, char** argv) { return fecseg_cli::run(argc, argv); }
