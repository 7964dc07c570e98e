#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fecseg/kdtree.hpp"
#include "support/oracles.hpp"

namespace fecseg {
namespace {

std::vector<std::uint32_t> sorted(std::vector<std::uint32_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

TEST(KdTree, EmptyCloud) {
  const PointCloud cloud;
  const KdTree3 tree(cloud);
  EXPECT_EQ(tree.size(), 0u);
  EXPECT_TRUE(tree.radius_query({0, 0, 0}, 1.0).empty());
  EXPECT_TRUE(tree.knn_query({0, 0, 0}, 3).empty());
}

TEST(KdTree, SinglePointIsOneLeaf) {
  const PointCloud cloud({{1, 2, 3}});
  const KdTree3 tree(cloud);
  EXPECT_EQ(tree.node_count(), 1u);
  const auto hits = tree.radius_query({1, 2, 3}, 0.5);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits.indices[0], 0u);
  EXPECT_EQ(hits.distances[0], 0.0);
}

TEST(KdTree, IndexesEveryPointOnce) {
  std::mt19937_64 rng(3);
  const auto cloud = testing::random_cloud(rng, 1000, testing::Geometry::kMixed);
  for (std::size_t leaf : {1u, 2u, 16u, 64u}) {
    const KdTree3 tree(cloud, leaf);
    auto order = tree.leaf_order();
    std::sort(order.begin(), order.end());
    for (std::uint32_t i = 0; i < order.size(); ++i) ASSERT_EQ(order[i], i);
  }
}

TEST(KdTree, RadiusQueryLineFixture) {
  const PointCloud cloud({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}});
  const KdTree3 tree(cloud);
  const auto hits = tree.radius_query({0.5, 0, 0}, 1.0, 10);
  EXPECT_EQ(hits.indices, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(hits.distances, (std::vector<double>{0.5, 0.5}));
}

TEST(KdTree, TinyRadiusFindsOnlySelf) {
  std::mt19937_64 rng(8);
  const auto cloud = testing::random_cloud(rng, 300, testing::Geometry::kUniform);
  double gap = 1e9;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = i + 1; j < cloud.size(); ++j) {
      gap = std::min(gap, std::sqrt(squared_distance(cloud[i], cloud[j])));
    }
  }
  const KdTree3 tree(cloud);
  for (std::uint32_t i = 0; i < cloud.size(); ++i) {
    const auto hits = tree.radius_query(cloud[i], gap * 0.5);
    ASSERT_EQ(hits.indices, (std::vector<std::uint32_t>{i}));
  }
}

TEST(KdTree, DuplicateCapKeepsLowestIndices) {
  std::vector<Point3> pts(100, Point3{1, 1, 1});
  const PointCloud cloud(pts);
  const KdTree3 tree(cloud);
  const auto hits = tree.radius_query({1, 1, 1}, 0.1, 5);
  EXPECT_EQ(hits.indices, (std::vector<std::uint32_t>{0, 1, 2, 3, 4}));
  for (double d : hits.distances) EXPECT_EQ(d, 0.0);
}

TEST(KdTree, UniformTenThousandMatchesBruteForce) {
  std::mt19937_64 rng(21);
  const auto cloud = testing::random_cloud(rng, 10000, testing::Geometry::kUniform);
  const KdTree3 tree(cloud);
  std::uniform_real_distribution<double> u(-1, 11);
  std::uniform_real_distribution<double> r(0.05, 2.0);
  for (int t = 0; t < 200; ++t) {
    const Point3 q{u(rng), u(rng), u(rng)};
    const double radius = r(rng);
    ASSERT_EQ(tree.radius_query(q, radius).indices,
              testing::brute_radius(cloud, q, radius));
  }
}

TEST(KdTree, RandomCloudsMatchBruteForceWithCaps) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> size(0, 2000);
  std::uniform_int_distribution<int> geo(0, 3);
  std::uniform_int_distribution<std::size_t> leaf(1, 32);
  for (int c = 0; c < 500; ++c) {
    const auto cloud = testing::random_cloud(rng, size(rng), testing::Geometry(geo(rng)));
    const KdTree3 tree(cloud, leaf(rng));
    std::uniform_real_distribution<double> u(-1, 11);
    std::uniform_real_distribution<double> r(0.01, 3.0);
    const Point3 q = (!cloud.empty() && c % 2 == 0)
                         ? cloud[std::uniform_int_distribution<std::size_t>(0, cloud.size() - 1)(rng)]
                         : Point3{u(rng), u(rng), u(rng)};
    const double radius = r(rng);
    const auto full = tree.radius_query(q, radius, cloud.size() + 1);
    const auto expect = testing::brute_radius(cloud, q, radius);
    ASSERT_EQ(sorted(full.indices), sorted(expect));
    ASSERT_EQ(full.indices, expect) << "ordering by (distance, index)";
    for (std::size_t i = 0; i < full.size(); ++i) {
      ASSERT_DOUBLE_EQ(full.distances[i], std::sqrt(squared_distance(cloud[full.indices[i]], q)));
    }
    const std::size_t cap = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
    ASSERT_EQ(tree.radius_query(q, radius, cap).indices,
              testing::brute_radius(cloud, q, radius, cap));
  }
}

TEST(KdTree, CapMonotonicity) {
  std::mt19937_64 rng(4);
  const auto cloud = testing::random_cloud(rng, 1500, testing::Geometry::kMixed);
  const KdTree3 tree(cloud);
  for (int t = 0; t < 50; ++t) {
    const auto& q = cloud[static_cast<std::size_t>(t) * 29 % cloud.size()];
    auto prev = tree.radius_query(q, 1.5, 1).indices;
    for (std::size_t k = 2; k < 60; ++k) {
      const auto next = tree.radius_query(q, 1.5, k).indices;
      ASSERT_GE(next.size(), prev.size());
      ASSERT_TRUE(std::equal(prev.begin(), prev.end(), next.begin()));
      prev = next;
    }
  }
}

TEST(KdTree, RadiusSearchMatchesRadiusQuerySet) {
  std::mt19937_64 rng(6);
  const auto cloud = testing::random_cloud(rng, 2000, testing::Geometry::kBlobs);
  const KdTree3 tree(cloud);
  std::vector<Neighbor> hits;
  for (int t = 0; t < 100; ++t) {
    const auto& q = cloud[static_cast<std::size_t>(t) * 17];
    for (std::size_t cap : {std::size_t{3}, std::size_t{50}, kUnbounded}) {
      tree.radius_search(q, 0.7, cap, hits);
      std::vector<std::uint32_t> got;
      for (const auto& h : hits) got.push_back(h.index);
      ASSERT_EQ(sorted(got), sorted(testing::brute_radius(cloud, q, 0.7, cap)));
    }
  }
}

TEST(KdTree, KnnMatchesBruteForce) {
  std::mt19937_64 rng(12);
  const auto cloud = testing::random_cloud(rng, 1200, testing::Geometry::kMixed);
  const KdTree3 tree(cloud);
  std::uniform_real_distribution<double> u(0, 10);
  for (int t = 0; t < 200; ++t) {
    const Point3 q{u(rng), u(rng), u(rng)};
    const std::size_t k = 1 + static_cast<std::size_t>(t) % 40;
    ASSERT_EQ(tree.knn_query(q, k).indices, testing::brute_knn(cloud, q, k));
  }
  EXPECT_EQ(tree.knn_query({0, 0, 0}, 5000).size(), cloud.size());
}

TEST(KdTree, DeterministicAcrossBuilds) {
  std::mt19937_64 rng(13);
  const auto cloud = testing::random_cloud(rng, 3000, testing::Geometry::kMixed);
  const KdTree3 a(cloud);
  const KdTree3 b(cloud);
  EXPECT_EQ(a.leaf_order(), b.leaf_order());
  for (int t = 0; t < 20; ++t) {
    const auto& q = cloud[static_cast<std::size_t>(t) * 101];
    EXPECT_EQ(a.radius_query(q, 1.0, 20).indices, b.radius_query(q, 1.0, 20).indices);
  }
}

}  // namespace
}  // namespace fecseg
