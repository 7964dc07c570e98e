#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "fecseg/error.hpp"
#include "fecseg/fec.hpp"
#include "fecseg/kdtree.hpp"
#include "fecseg/synthgen.hpp"
#include "support/oracles.hpp"

namespace fecseg {
namespace {

SynthConfig config(std::size_t n, std::size_t m, std::uint64_t seed = 1) {
  SynthConfig c;
  c.n_clusters = n;
  c.density = m;
  c.rng_seed = seed;
  return c;
}

bool bit_identical(const LabeledCloud& a, const LabeledCloud& b) {
  if (a.gt != b.gt || a.cloud.size() != b.cloud.size()) return false;
  for (std::size_t i = 0; i < a.cloud.size(); ++i) {
    if (a.cloud[i].x != b.cloud[i].x || a.cloud[i].y != b.cloud[i].y ||
        a.cloud[i].z != b.cloud[i].z) {
      return false;
    }
  }
  return a.recommended_d_th == b.recommended_d_th;
}

TEST(Synthgen, GridSide) {
  EXPECT_EQ(grid_side(1), 1u);
  EXPECT_EQ(grid_side(8), 2u);
  EXPECT_EQ(grid_side(9), 3u);
  EXPECT_EQ(grid_side(27), 3u);
  EXPECT_EQ(grid_side(200), 6u);
  EXPECT_EQ(grid_side(1000), 10u);
  EXPECT_EQ(grid_side(1001), 11u);
}

TEST(Synthgen, SinglePointAtVoxelCenter) {
  const auto lc = generate(config(1, 1));
  ASSERT_EQ(lc.cloud.size(), 1u);
  EXPECT_EQ(lc.gt, (LabelMap{1}));
  const double cx = lc.cloud[0].x - std::floor(lc.cloud[0].x / 2.0) * 2.0;
  EXPECT_DOUBLE_EQ(cx, 0.5);
}

// Two sites per axis put the pitch at a full voxel edge, so the 1.1 x pitch
// radius would reach the neighboring voxel: rejected as a config error.
TEST(Synthgen, TwoByTwoByTwoGridIsRejected) {
  EXPECT_THROW((void)generate(config(2, 8)), ConfigError);
  for (std::size_t m = 2; m <= 8; ++m) {
    EXPECT_THROW((void)generate(config(3, m)), ConfigError) << m;
  }
}

TEST(Synthgen, SmallestSeparableGridMatchesOracle) {
  const auto lc = generate(config(2, 27));
  EXPECT_EQ(lc.cloud.size(), 54u);
  EXPECT_DOUBLE_EQ(lc.recommended_d_th, 0.55);
  EXPECT_EQ(oracle_cluster(lc.cloud, lc.recommended_d_th), compact_labels(lc.gt));
}

TEST(Synthgen, HundredByTwoHundredMatchesOracle) {
  const auto lc = generate(config(100, 200));
  EXPECT_EQ(lc.cloud.size(), 20000u);
  EXPECT_DOUBLE_EQ(lc.recommended_d_th, 1.1 * 0.2);
  EXPECT_TRUE(testing::same_partition(oracle_cluster(lc.cloud, lc.recommended_d_th), lc.gt));
}

TEST(Synthgen, GtLabelsAndClusterSizes) {
  const auto lc = generate(config(37, 64, 5));
  std::map<Label, std::size_t> size;
  for (auto l : lc.gt) ++size[l];
  ASSERT_EQ(size.size(), 37u);
  EXPECT_EQ(size.begin()->first, 1u);
  EXPECT_EQ(size.rbegin()->first, 37u);
  for (const auto& [l, c] : size) EXPECT_EQ(c, 64u);
}

TEST(Synthgen, IndexOrderIsShuffled) {
  const auto lc = generate(config(10, 100, 3));
  EXPECT_FALSE(std::is_sorted(lc.gt.begin(), lc.gt.end()));
}

TEST(Synthgen, DeterministicInSeed) {
  auto c = config(20, 50, 99);
  c.shift_sigma = 0.05;
  EXPECT_TRUE(bit_identical(generate(c), generate(c)));
  auto d = c;
  d.rng_seed = 100;
  EXPECT_FALSE(bit_identical(generate(c), generate(d)));
}

TEST(Synthgen, RandomConfigsSeparationAndConnectivity) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> n(1, 30);
  std::uniform_int_distribution<std::size_t> m(9, 150);
  std::uniform_real_distribution<double> edge(0.3, 3.0);
  for (int t = 0; t < 40; ++t) {
    auto c = config(n(rng), m(rng), rng());
    c.voxel_edge = edge(rng);
    const auto lc = generate(c);
    ASSERT_EQ(lc.cloud.size(), c.n_clusters * c.density);
    const double d = lc.recommended_d_th;
    ASSERT_TRUE(testing::same_partition(oracle_cluster(lc.cloud, d), lc.gt));

    const KdTree3 tree(lc.cloud);
    for (std::uint32_t i = 0; i < lc.cloud.size(); ++i) {
      const auto nn = tree.knn_query(lc.cloud[i], 2);
      const auto other = nn.indices[0] == i ? nn.indices[1] : nn.indices[0];
      ASSERT_EQ(lc.gt[other], lc.gt[i]);
      ASSERT_LE(std::sqrt(squared_distance(lc.cloud[i], lc.cloud[other])), d);
      for (auto j : tree.radius_query(lc.cloud[i], c.voxel_edge * 0.999).indices) {
        ASSERT_EQ(lc.gt[j], lc.gt[i]) << "voxels closer than one edge";
      }
    }
  }
}

TEST(Synthgen, ShiftedPointsStayInsideTheirVoxel) {
  for (std::size_t sub : {std::size_t{1}, std::size_t{4}}) {
    auto c = config(30, 100, 8);
    c.shift_sigma = 0.4;
    c.sub_clusters = sub;
    const auto lc = generate(c);
    std::map<Label, std::array<double, 6>> box;
    for (std::size_t i = 0; i < lc.cloud.size(); ++i) {
      const auto& p = lc.cloud[i];
      auto [it, fresh] = box.emplace(lc.gt[i], std::array<double, 6>{p.x, p.y, p.z, p.x, p.y, p.z});
      auto& b = it->second;
      b[0] = std::min(b[0], p.x);
      b[1] = std::min(b[1], p.y);
      b[2] = std::min(b[2], p.z);
      b[3] = std::max(b[3], p.x);
      b[4] = std::max(b[4], p.y);
      b[5] = std::max(b[5], p.z);
    }
    for (const auto& [l, b] : box) {
      for (int a = 0; a < 3; ++a) {
        EXPECT_LE(b[a + 3] - b[a], c.voxel_edge);
        EXPECT_DOUBLE_EQ(std::floor(b[a] / 2.0), std::floor(b[a + 3] / 2.0));
      }
    }
  }
}

TEST(Synthgen, InvalidConfigs) {
  EXPECT_THROW((void)generate(config(0, 10)), ConfigError);
  EXPECT_THROW((void)generate(config(1, 0)), ConfigError);
  auto c = config(1, 27);
  c.voxel_edge = 0.0;
  EXPECT_THROW((void)generate(c), ConfigError);
  c = config(1, 27);
  c.shift_sigma = -1;
  EXPECT_THROW((void)generate(c), ConfigError);
  c = config(1, 27);
  c.sub_clusters = 0;
  EXPECT_THROW((void)generate(c), ConfigError);
}

TEST(Synthgen, SingleSiteVoxelsUseHalfEdgeRadius) {
  auto c = config(50, 1);
  c.voxel_edge = 2.0;
  const auto lc = generate(c);
  EXPECT_DOUBLE_EQ(lc.recommended_d_th, 1.0);
  EXPECT_TRUE(testing::same_partition(oracle_cluster(lc.cloud, lc.recommended_d_th), lc.gt));
}

}  // namespace
}  // namespace fecseg
