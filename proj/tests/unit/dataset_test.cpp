// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3app/dataset.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "zp3/error.hpp"
#include "zp3app/png_io.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;

zp3::Image quantized(std::mt19937_64& rng, int w, int h, int c) {
  std::uniform_int_distribution<int> level(0, 255);
  zp3::Image im(w, h, c);
  for (double& v : im.values()) v = level(rng) / 255.0;
  return im;
}

std::vector<zp3::Observation> sample_views(int n) {
  std::mt19937_64 rng(121);
  std::vector<zp3::Observation> views;
  for (int i = 0; i < n; ++i) {
    zp3::Observation o;
    o.id = "view_" + std::to_string(i);
    o.image = quantized(rng, 9, 7, 3);
    o.mask = zp3::Image(9, 7, 1);
    for (double& v : o.mask.values()) v = std::bernoulli_distribution(0.6)(rng) ? 1.0 : 0.0;
    o.mask[0] = 1.0;
    o.camera = zp3test::test_camera(9, 7, 12.0, 2.5, 30.0 * i, 10.0);
    views.push_back(o);
  }
  return views;
}

TEST(Png, RoundTripAndDeterministicBytes) {
  const std::string dir = zp3test::scratch_dir("png");
  std::mt19937_64 rng(122);
  for (int c : {1, 3}) {
    const zp3::Image im = quantized(rng, 13, 5, c);
    zp3app::write_png(dir + "/a.png", im);
    zp3app::write_png(dir + "/b.png", im);
    const zp3::Image back = zp3app::read_png(dir + "/a.png");
    ASSERT_TRUE(back.same_shape(im));
    EXPECT_EQ(zp3test::max_abs_diff(back, im), 0.0);
    std::ifstream a(dir + "/a.png", std::ios::binary), b(dir + "/b.png", std::ios::binary);
    EXPECT_TRUE(std::equal(std::istreambuf_iterator<char>(a), {},
                           std::istreambuf_iterator<char>(b)));
  }
  EXPECT_THROW(zp3app::read_png(dir + "/missing.png"), zp3::IoError);
  std::ofstream(dir + "/junk.png") << "not a png";
  EXPECT_THROW(zp3app::read_png(dir + "/junk.png"), zp3::IoError);
  EXPECT_THROW(zp3app::write_png(dir + "/x.png", zp3::Image(2, 2, 2)), zp3::InvalidArgument);
}

TEST(Dataset, WriteLoadRoundTrip) {
  const std::string dir = zp3test::scratch_dir("dataset_rt");
  const auto views = sample_views(4);
  zp3app::DatasetMeta meta;
  meta.observed_start = -20.0;
  meta.observed_end = 70.0;
  meta.scene_scale = 1.5;
  zp3app::write_dataset(dir, views, meta);
  const auto ds = zp3app::load_dataset(dir);
  EXPECT_EQ(ds.meta.observed_start, -20.0);
  EXPECT_EQ(ds.meta.observed_end, 70.0);
  EXPECT_EQ(ds.meta.scene_scale, 1.5);
  ASSERT_EQ(ds.views.size(), 4u);
  for (std::size_t i = 0; i < views.size(); ++i) {
    const auto& got = ds.views[i];
    EXPECT_EQ(got.id, views[i].id);
    EXPECT_EQ(zp3test::max_abs_diff(got.image, views[i].image), 0.0);
    EXPECT_EQ(zp3test::max_abs_diff(got.mask, views[i].mask), 0.0);
    EXPECT_NEAR((got.camera.center() - views[i].camera.center()).norm(), 0.0, 1e-12);
    EXPECT_NEAR(zp3::angular_distance(got.view_spec.azimuth, 30.0 * i), 0.0, 1e-9);
    EXPECT_NEAR(got.view_spec.elevation, 10.0, 1e-9);
    EXPECT_NEAR(got.view_spec.radius, 2.5, 1e-9);
  }
}

TEST(Dataset, ErrorsNameTheProblem) {
  const std::string dir = zp3test::scratch_dir("dataset_bad");
  zp3app::write_dataset(dir, sample_views(2), {});
  fs::remove(fs::path(dir) / "masks" / "view_1.png");
  try {
    zp3app::load_dataset(dir);
    FAIL() << "expected InvalidArgument";
  } catch (const zp3::InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("view_1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(zp3app::load_dataset(dir + "/nope"), zp3::InvalidArgument);
  const std::string dir2 = zp3test::scratch_dir("dataset_nometa");
  zp3app::write_dataset(dir2, sample_views(1), {});
  fs::remove(fs::path(dir2) / "meta.json");
  EXPECT_THROW(zp3app::load_dataset(dir2), zp3::InvalidArgument);
}

}  // namespace
