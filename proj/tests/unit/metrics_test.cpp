// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "zp3/error.hpp"
#include "zp3app/toy.hpp"
#include "test_support.hpp"

namespace {

using zp3::Image;

TEST(Psnr, Probes) {
  const Image a(8, 8, 3, zp3::Domain::kPixel, 0.5);
  const Image b(8, 8, 3, zp3::Domain::kPixel, 0.6);
  EXPECT_NEAR(zp3::psnr(a, b), 20.0, 1e-9);
  EXPECT_EQ(zp3::psnr(a, a), 99.0);
  EXPECT_NEAR(zp3::psnr(Image(4, 4, 3), Image(4, 4, 3, zp3::Domain::kPixel, 1.0)), 0.0, 1e-12);
}

TEST(Psnr, MaskSelectsPixels) {
  Image a(4, 4, 3, zp3::Domain::kPixel, 0.5), b = a;
  b.at(0, 0, 0) = 1.0;  // error outside the mask
  Image mask(4, 4, 1, zp3::Domain::kPixel, 1.0);
  mask.at(0, 0, 0) = 0.0;
  EXPECT_EQ(zp3::psnr(a, b, &mask), 99.0);
  EXPECT_LT(zp3::psnr(a, b), 99.0);
  EXPECT_THROW(zp3::psnr(a, b, &(mask = Image(4, 4, 1))), zp3::InvalidArgument);
  EXPECT_THROW(zp3::psnr(a, Image(4, 3, 3)), zp3::InvalidArgument);
}

// Direct per-window evaluation with a 2D Gaussian window.
double reference_ssim(const Image& a, const Image& b, int window = 11, double sigma = 1.5) {
  const int r = window / 2;
  std::vector<double> w(window * window);
  double total_w = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const double v = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
      w[(dy + r) * window + dx + r] = v;
      total_w += v;
    }
  }
  for (double& v : w) v /= total_w;
  const double c1 = 1e-4, c2 = 9e-4;
  double sum = 0.0;
  int count = 0;
  for (int c = 0; c < a.channels(); ++c) {
    for (int y = r; y < a.height() - r; ++y) {
      for (int x = r; x < a.width() - r; ++x) {
        double ma = 0, mb = 0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const double k = w[(dy + r) * window + dx + r];
            ma += k * a.at(x + dx, y + dy, c);
            mb += k * b.at(x + dx, y + dy, c);
          }
        }
        double va = 0, vb = 0, cov = 0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const double k = w[(dy + r) * window + dx + r];
            const double da = a.at(x + dx, y + dy, c) - ma;
            const double db = b.at(x + dx, y + dy, c) - mb;
            va += k * da * da;
            vb += k * db * db;
            cov += k * da * db;
          }
        }
        sum += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    }
  }
  return sum / count;
}

TEST(Ssim, MatchesDirectWindowEvaluation) {
  std::mt19937_64 rng(111);
  for (int trial = 0; trial < 5; ++trial) {
    const Image a = zp3test::random_image(rng, 18, 15, 3, 0, 1);
    Image b = a;
    std::normal_distribution<double> n(0.0, 0.1 * (trial + 1));
    for (double& v : b.values()) v = std::clamp(v + n(rng), 0.0, 1.0);
    EXPECT_NEAR(zp3::ssim(a, b), reference_ssim(a, b), 1e-10);
  }
}

TEST(Ssim, KnownValues) {
  std::mt19937_64 rng(112);
  const Image a = zp3test::random_image(rng, 16, 16, 3, 0, 1);
  EXPECT_NEAR(zp3::ssim(a, a), 1.0, 1e-12);
  // Two flat images: only the luminance term remains.
  const Image p(16, 16, 1, zp3::Domain::kPixel, 0.2), q(16, 16, 1, zp3::Domain::kPixel, 0.6);
  EXPECT_NEAR(zp3::ssim(p, q), (2 * 0.2 * 0.6 + 1e-4) / (0.04 + 0.36 + 1e-4), 1e-12);
  // Inverted contrast gives negative structure correlation.
  Image inv = a;
  for (double& v : inv.values()) v = 1.0 - v;
  EXPECT_LT(zp3::ssim(a, inv), 0.0);
  const Image b = zp3test::random_image(rng, 16, 16, 3, 0, 1);
  EXPECT_NEAR(zp3::ssim(a, b), zp3::ssim(b, a), 1e-12);
  EXPECT_THROW(zp3::ssim(Image(8, 8, 3), Image(8, 8, 3)), zp3::InvalidArgument);
}

TEST(Ssim, MaskRestrictsWindowCenters) {
  std::mt19937_64 rng(113);
  const Image a = zp3test::random_image(rng, 24, 24, 1, 0, 1);
  Image b = a;
  for (int y = 0; y < 24; ++y) {
    for (int x = 12; x < 24; ++x) b.at(x, y, 0) = 0.5;
  }
  Image left(24, 24, 1);
  for (int y = 0; y < 24; ++y) {
    for (int x = 0; x < 6; ++x) left.at(x, y, 0) = 1.0;
  }
  // Centers at x <= 5 only see columns up to 10: untouched.
  EXPECT_NEAR(zp3::ssim(a, b, &left), 1.0, 1e-12);
  EXPECT_LT(zp3::ssim(a, b), 1.0);
  // An empty mask falls back to every center.
  const Image none(24, 24, 1);
  EXPECT_DOUBLE_EQ(zp3::ssim(a, b, &none), zp3::ssim(a, b));
}

TEST(ObservedRange, Wraparound) {
  EXPECT_TRUE(zp3::in_observed_range(45, 0, 90));
  EXPECT_TRUE(zp3::in_observed_range(90, 0, 90));
  EXPECT_FALSE(zp3::in_observed_range(91, 0, 90));
  EXPECT_TRUE(zp3::in_observed_range(10, 330, 390));
  EXPECT_TRUE(zp3::in_observed_range(-20, 330, 390));
  EXPECT_FALSE(zp3::in_observed_range(40, 330, 390));
  EXPECT_TRUE(zp3::in_observed_range(200, 0, 360));
}

TEST(Aggregate, MeansPerRegion) {
  zp3::MetricReport r;
  r.rows = {{"a", 0, zp3::Region::kVisible, 30, 0.9, 0.1},
            {"b", 10, zp3::Region::kVisible, 20, 0.7, 0.3},
            {"c", 180, zp3::Region::kInvisible, 10, 0.5, 0.5}};
  zp3::aggregate(r);
  EXPECT_EQ(r.visible.count, 2);
  EXPECT_DOUBLE_EQ(r.visible.psnr, 25.0);
  EXPECT_DOUBLE_EQ(r.visible.ssim, 0.8);
  EXPECT_DOUBLE_EQ(r.invisible.psnr, 10.0);
  EXPECT_DOUBLE_EQ(r.total.psnr, 20.0);
  EXPECT_NEAR(r.total.perceptual, 0.3, 1e-15);
  r.rows.pop_back();
  zp3::aggregate(r);
  EXPECT_EQ(r.invisible.count, 0);
  EXPECT_TRUE(std::isnan(r.invisible.psnr));
}

TEST(Evaluate, GroundTruthScoresPerfectlyAndSplitsRegions) {
  zp3app::ToyOptions opts;
  opts.width = opts.height = 24;
  opts.gaussians = 150;
  const auto ds = zp3app::make_toy_dataset(opts);
  const auto report = zp3::evaluate(ds.ground_truth, ds.test, 0.0, 90.0);
  ASSERT_EQ(report.rows.size(), ds.test.size());
  for (const auto& row : report.rows) {
    EXPECT_EQ(row.psnr, 99.0) << row.view_id;
    EXPECT_NEAR(row.ssim, 1.0, 1e-12);
    EXPECT_EQ(row.perceptual, 0.0);
    EXPECT_EQ(row.region == zp3::Region::kVisible,
              zp3::in_observed_range(row.azimuth, 0.0, 90.0));
  }
  EXPECT_GT(report.visible.count, 0);
  EXPECT_GT(report.invisible.count, 0);
  EXPECT_EQ(report.visible.count + report.invisible.count, report.total.count);

  const auto empty = zp3::evaluate({}, ds.test, 0.0, 90.0);
  EXPECT_LT(empty.total.psnr, 20.0);
  EXPECT_THROW(zp3::evaluate(ds.ground_truth, {}, 0, 90), zp3::InvalidArgument);
}

TEST(Report, CsvAndTable) {
  zp3::MetricReport r;
  r.rows = {{"front", 0, zp3::Region::kVisible, 30, 0.9, 0.1},
            {"back", 180, zp3::Region::kInvisible, 10, 0.5, 0.5}};
  zp3::aggregate(r);
  const std::string csv = zp3::report_csv(r);
  std::istringstream in(csv);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 1 + 2 + 3);
  EXPECT_NE(csv.find("front"), std::string::npos);
  EXPECT_NE(csv.find("invisible"), std::string::npos);
  const std::string table = zp3::report_table(r);
  EXPECT_NE(table.find("back"), std::string::npos);
  EXPECT_NE(table.find("multiscale-l1"), std::string::npos);
}

}  // namespace
