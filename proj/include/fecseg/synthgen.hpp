#pragma once

#include <cstddef>
#include <cstdint>

#include "fecseg/core.hpp"

namespace fecseg {

/// Benchmark cloud made of `n_clusters` voxels, each filled with `density`
/// points. Voxels sit on a lattice of stride 2 * voxel_edge, so any two of
/// them are at least one voxel edge apart.
struct SynthConfig {
  std::size_t n_clusters = 1;
  std::size_t density = 1;
  double voxel_edge = 1.0;
  /// Std dev of the per-point displacement (meters). 0 = even grid.
  double shift_sigma = 0.0;
  /// 1 = even grid fill. > 1 = points drawn around that many Gaussian
  /// centers inside the voxel with std dev shift_sigma (non-uniformity proxy).
  std::size_t sub_clusters = 1;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError.
  void validate() const;
};

struct LabeledCloud {
  PointCloud cloud;
  LabelMap gt;  ///< exactly {1..n_clusters}
  double recommended_d_th = 0.0;
};

/// Side g of the smallest g^3 grid that holds `density` sites.
[[nodiscard]] std::size_t grid_side(std::size_t density);

/// 1.1 x grid pitch; half a voxel edge when a voxel holds a single site.
[[nodiscard]] double recommended_d_th(const SynthConfig& cfg);

/// Deterministic in the config. Throws ConfigError when the recommended
/// radius would not keep neighboring voxels apart.
[[nodiscard]] LabeledCloud generate(const SynthConfig& cfg);

}  // namespace fecseg
