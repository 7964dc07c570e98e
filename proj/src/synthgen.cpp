#include "fecseg/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "fecseg/error.hpp"

namespace fecseg {

std::size_t grid_side(std::size_t density) {
  std::size_t g = 1;
  while (g * g * g < density) ++g;
  return g;
}

double recommended_d_th(const SynthConfig& cfg) {
  const auto g = grid_side(cfg.density);
  if (g == 1) return 0.5 * cfg.voxel_edge;
  return 1.1 * cfg.voxel_edge / static_cast<double>(g - 1);
}

void SynthConfig::validate() const {
  if (n_clusters < 1) throw ConfigError("n_clusters must be >= 1");
  if (density < 1) throw ConfigError("density must be >= 1");
  if (!(voxel_edge > 0.0) || !std::isfinite(voxel_edge)) {
    throw ConfigError("voxel_edge must be positive");
  }
  if (!(shift_sigma >= 0.0) || !std::isfinite(shift_sigma)) {
    throw ConfigError("shift_sigma must be >= 0");
  }
  if (sub_clusters < 1) throw ConfigError("sub_clusters must be >= 1");
  if (recommended_d_th(*this) >= voxel_edge) {
    throw ConfigError(
        "density " + std::to_string(density) +
        " gives a recommended d_th >= voxel_edge, so neighboring voxels would "
        "connect; raise the density or choose d_th manually");
  }
}

LabeledCloud generate(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.rng_seed);
  const double edge = cfg.voxel_edge;
  const double stride = 2.0 * edge;

  // Smallest lattice cube with one spare layer, so selection stays random
  // even when n is a perfect cube.
  std::size_t side = 1;
  while (side * side * side < cfg.n_clusters) ++side;
  ++side;
  const std::size_t cells = side * side * side;
  std::vector<std::size_t> cell_ids(cells);
  std::iota(cell_ids.begin(), cell_ids.end(), std::size_t{0});
  for (std::size_t i = 0; i < cfg.n_clusters; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, cells - 1);
    std::swap(cell_ids[i], cell_ids[pick(rng)]);
  }

  const auto g = grid_side(cfg.density);
  const double pitch = g > 1 ? edge / static_cast<double>(g - 1) : 0.0;
  std::normal_distribution<double> gauss(0.0, cfg.shift_sigma);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Point3> points;
  LabelMap gt;
  points.reserve(cfg.n_clusters * cfg.density);
  gt.reserve(points.capacity());

  for (std::size_t c = 0; c < cfg.n_clusters; ++c) {
    const auto id = cell_ids[c];
    const std::array<double, 3> origin{
        static_cast<double>(id / (side * side)) * stride,
        static_cast<double>((id / side) % side) * stride,
        static_cast<double>(id % side) * stride};
    auto clamp = [&](double v, unsigned axis) {
      return std::clamp(v, origin[axis], origin[axis] + edge);
    };

    std::vector<std::array<double, 3>> centers;
    if (cfg.sub_clusters > 1) {
      for (std::size_t s = 0; s < cfg.sub_clusters; ++s) {
        centers.push_back({origin[0] + unit(rng) * edge,
                           origin[1] + unit(rng) * edge,
                           origin[2] + unit(rng) * edge});
      }
    }

    for (std::size_t k = 0; k < cfg.density; ++k) {
      std::array<double, 3> p{};
      if (!centers.empty()) {
        p = centers[k % centers.size()];
      } else if (g == 1) {
        p = {origin[0] + 0.5 * edge, origin[1] + 0.5 * edge,
             origin[2] + 0.5 * edge};
      } else {
        // Lexicographic site order, z fastest.
        const std::array<std::size_t, 3> site{k / (g * g), (k / g) % g, k % g};
        for (unsigned a = 0; a < 3; ++a) {
          p[a] = origin[a] + static_cast<double>(site[a]) * pitch;
        }
      }
      if (cfg.shift_sigma > 0.0) {
        for (unsigned a = 0; a < 3; ++a) p[a] = clamp(p[a] + gauss(rng), a);
      }
      points.push_back({p[0], p[1], p[2], std::nullopt});
      gt.push_back(static_cast<Label>(c + 1));
    }
  }

  std::vector<std::size_t> perm(points.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);

  LabeledCloud out;
  out.cloud.reserve(points.size());
  out.gt.reserve(points.size());
  for (const auto i : perm) {
    out.cloud.push_back(points[i]);
    out.gt.push_back(gt[i]);
  }
  out.recommended_d_th = recommended_d_th(cfg);
  return out;
}

}  // namespace fecseg
