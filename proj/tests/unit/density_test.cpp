// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/density.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zp3/error.hpp"
#include "test_support.hpp"

namespace {

using zp3::Vec3;
using zp3::Vec4;

zp3::GaussianCloud three_gaussians() {
  zp3::GaussianCloud cloud;
  // Extent of these positions is 1, so percent_dense 0.01 puts the
  // clone/split boundary at scale 0.01.
  cloud.gaussians.push_back(zp3::make_gaussian(Vec3(-1, 0, 0), Vec3::Constant(0.005),
                                               Vec4(1, 0, 0, 0), 0.5, Vec3(1, 0, 0)));
  cloud.gaussians.push_back(zp3::make_gaussian(Vec3(0, 0, 0), Vec3(0.2, 0.1, 0.05),
                                               Vec4(1, 0, 0, 0), 0.5, Vec3(0, 1, 0)));
  cloud.gaussians.push_back(zp3::make_gaussian(Vec3(1, 0, 0), Vec3::Constant(0.1),
                                               Vec4(1, 0, 0, 0), 0.5, Vec3(0, 0, 1)));
  return cloud;
}

TEST(Densify, BelowThresholdIsIdentity) {
  const auto cloud = three_gaussians();
  const auto out = zp3::densify(cloud, {0.0, 1e-4, 2e-4});
  ASSERT_EQ(out.cloud.size(), 3u);
  EXPECT_EQ(out.origin, (std::vector<int>{0, 1, 2}));
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(out.cloud.gaussians[i].params(), cloud.gaussians[i].params());
  }
}

TEST(Densify, ClonesSmallAndSplitsLarge) {
  const auto cloud = three_gaussians();
  zp3::DensifyOptions opts;
  opts.seed = 5;
  const auto out = zp3::densify(cloud, {1.0, 1.0, 0.0}, opts);
  ASSERT_EQ(out.cloud.size(), 5u);
  EXPECT_EQ(out.origin, (std::vector<int>{0, 0, 1, 1, 2}));
  // Clone: two exact copies.
  EXPECT_EQ(out.cloud.gaussians[0].params(), cloud.gaussians[0].params());
  EXPECT_EQ(out.cloud.gaussians[1].params(), cloud.gaussians[0].params());
  // Split: scales shrink by the split factor, appearance is inherited.
  for (int c : {2, 3}) {
    const auto& g = out.cloud.gaussians[c];
    EXPECT_LT((g.scale() - cloud.gaussians[1].scale() / 1.6).norm(), 1e-12);
    EXPECT_EQ(g.opacity_logit, cloud.gaussians[1].opacity_logit);
    EXPECT_EQ(g.sh[0], cloud.gaussians[1].sh[0]);
    EXPECT_NE(g.position, cloud.gaussians[1].position);
  }
  EXPECT_EQ(out.cloud.gaussians[4].params(), cloud.gaussians[2].params());
  zp3::validate(out.cloud);
}

TEST(Densify, SplitSamplesFollowTheParentDistribution) {
  zp3::GaussianCloud parent;
  const double h = std::sqrt(0.5);
  parent.gaussians.push_back(zp3::make_gaussian(Vec3(0.3, -0.2, 0.1), Vec3(0.4, 0.1, 0.2),
                                                Vec4(h, 0, 0, h), 0.5, Vec3(0.5, 0.5, 0.5)));
  parent.gaussians.push_back(zp3::make_gaussian(Vec3(10, 0, 0), Vec3::Constant(0.4),
                                                Vec4(1, 0, 0, 0), 0.5, Vec3(0.5, 0.5, 0.5)));
  const zp3::Mat3 sigma = zp3::covariance(parent.gaussians[0]);
  zp3::Mat3 acc = zp3::Mat3::Zero();
  Vec3 mean = Vec3::Zero();
  const int trials = 4000;
  for (int s = 0; s < trials; ++s) {
    zp3::DensifyOptions opts;
    opts.seed = static_cast<std::uint64_t>(s);
    const auto out = zp3::densify(parent, {1.0, 0.0}, opts);
    for (int c = 0; c < 2; ++c) {
      const Vec3 d = out.cloud.gaussians[c].position - parent.gaussians[0].position;
      mean += d;
      acc += d * d.transpose();
    }
  }
  mean /= 2.0 * trials;
  acc /= 2.0 * trials;
  EXPECT_LT(mean.norm(), 0.02);
  EXPECT_LT((acc - sigma).norm() / sigma.norm(), 0.05);
}

TEST(Densify, DeterministicPerSeedAndRejectsMisalignedStats) {
  std::mt19937_64 rng(51);
  const auto cloud = zp3test::random_cloud(rng, {.count = 30});
  std::vector<double> stats(30, 1.0);
  zp3::DensifyOptions opts;
  opts.seed = 9;
  const auto a = zp3::densify(cloud, stats, opts);
  const auto b = zp3::densify(cloud, stats, opts);
  ASSERT_EQ(a.cloud.size(), b.cloud.size());
  for (std::size_t i = 0; i < a.cloud.size(); ++i) {
    EXPECT_EQ(a.cloud.gaussians[i].params(), b.cloud.gaussians[i].params());
  }
  EXPECT_THROW(zp3::densify(cloud, std::vector<double>(29, 1.0)), zp3::InvalidArgument);
}

TEST(Prune, DropsLowOpacityAndKeepsOrder) {
  auto cloud = three_gaussians();
  cloud.gaussians[1].opacity_logit = zp3::logit(0.001);
  const auto out = zp3::prune(cloud);
  ASSERT_EQ(out.cloud.size(), 2u);
  EXPECT_EQ(out.origin, (std::vector<int>{0, 2}));
  EXPECT_EQ(zp3::prune(cloud, 0.0).cloud.size(), 3u);
  EXPECT_THROW(zp3::prune(cloud, 1.0), zp3::InvalidArgument);
}

}  // namespace
