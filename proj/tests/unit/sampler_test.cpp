// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/sampler.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zp3/error.hpp"
#include "zp3/oracle.hpp"
#include "test_support.hpp"

namespace {

using zp3::Image;

std::shared_ptr<const zp3::NoisePredictor> constant_oracle(int w, int h, double mu, double s,
                                                           const zp3::NoiseSchedule& sched) {
  zp3::GaussianMixtureOracle o;
  o.schedule = sched;
  o.components.push_back({Image(w, h, 3, zp3::Domain::kSampling, mu), s, 1.0});
  return std::make_shared<zp3::OraclePredictor>(o);
}

zp3::PriorBundle bundle(std::shared_ptr<const zp3::NoisePredictor> p) {
  zp3::PriorBundle b;
  b.mvd.push_back({std::move(p), {}, 1.0, "v0"});
  return b;
}

zp3::SampleOptions tiny(int w = 1, int h = 1) {
  zp3::SampleOptions o;
  o.width = w;
  o.height = h;
  return o;
}

const zp3::Camera& any_camera() {
  static const zp3::Camera cam = zp3test::test_camera(4, 4);
  return cam;
}

TEST(Sample, DeterministicPerSeed) {
  const auto sched = zp3::make_schedule(50, zp3::ScheduleKind::kLinearBeta);
  const auto b = bundle(constant_oracle(4, 4, 0.2, 0.3, sched));
  const auto a1 = zp3::sample(any_camera(), b, sched, {}, 7, tiny(4, 4));
  const auto a2 = zp3::sample(any_camera(), b, sched, {}, 7, tiny(4, 4));
  const auto c = zp3::sample(any_camera(), b, sched, {}, 8, tiny(4, 4));
  EXPECT_EQ(zp3test::max_abs_diff(a1.latent, a2.latent), 0.0);
  EXPECT_GT(zp3test::max_abs_diff(a1.latent, c.latent), 0.0);
  EXPECT_EQ(a1.image.domain(), zp3::Domain::kPixel);
  for (double v : a1.image.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Sample, RecordsEveryStepFromNoisiestDown) {
  const auto sched = zp3::make_schedule(50, zp3::ScheduleKind::kLinearBeta);
  auto b = bundle(constant_oracle(1, 1, 0.0, 0.5, sched));
  b.lf_image = Image(1, 1, 3, zp3::Domain::kSampling, 0.1);
  const auto r = zp3::sample(any_camera(), b, sched, {}, 1, tiny());
  ASSERT_EQ(r.steps.size(), 49u);
  EXPECT_EQ(r.steps.front().t, 49);
  EXPECT_EQ(r.steps.back().t, 1);
  for (const auto& s : r.steps) {
    const auto w = zp3::schedule_weights(s.t, {});
    EXPECT_DOUBLE_EQ(s.w_lf, w.lf);
    EXPECT_EQ(s.w_hf, 0.0);  // no HF predictor
  }
}

TEST(Sample, WeightSwitches) {
  const auto sched = zp3::make_schedule(50, zp3::ScheduleKind::kLinearBeta);
  zp3::SampleOptions o = tiny();
  EXPECT_DOUBLE_EQ(zp3::step_weights(22, sched, {}, o).lf, 0.5);
  EXPECT_DOUBLE_EQ(zp3::step_weights(22, sched, {}, o).hf, 0.125);
  o.invert_t = true;
  EXPECT_DOUBLE_EQ(zp3::step_weights(49, sched, {}, o).lf, zp3::schedule_weights(0, {}).lf);
  o.lf_enabled = false;
  EXPECT_EQ(zp3::step_weights(49, sched, {}, o).lf, 0.0);
  o.hf_enabled = false;
  EXPECT_EQ(zp3::step_weights(10, sched, {}, o).hf, 0.0);
}

// The deterministic sampler with the exact oracle of N(mu, s^2) follows the
// probability-flow ODE of that distribution.
TEST(Sample, FollowsTheProbabilityFlowOde) {
  for (auto kind : {zp3::ScheduleKind::kLinearBeta, zp3::ScheduleKind::kCosine}) {
    const auto sched = zp3::make_schedule(50, kind);
    const double mu = 0.3, s = 0.25;
    zp3::GaussianMixtureOracle o;
    o.schedule = sched;
    o.components.push_back({Image(1, 1, 1, zp3::Domain::kSampling, mu), s, 1.0});
    for (double x_start : {-2.0, -0.5, 0.0, 1.0, 2.0}) {
      Image x(1, 1, 1, zp3::Domain::kSampling, x_start);
      std::vector<double> ddim = {x_start};
      for (int t = 49; t >= 1; --t) {
        x = zp3::ddim_step_canonical(x, zp3::oracle_predict(x, t, o), t, sched);
        ddim.push_back(x[0]);
      }
      const auto ref = zp3test::probability_flow_reference(x_start, sched.alpha_bar, mu, s);
      ASSERT_EQ(ref.size(), ddim.size());
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < ref.size(); ++i) {
        num += (ddim[i] - ref[i]) * (ddim[i] - ref[i]);
        den += ref[i] * ref[i];
      }
      EXPECT_LT(std::sqrt(num / den), 1e-2) << zp3::to_string(kind) << " " << x_start;
    }
  }
}

TEST(Sample, EndToEndMatchesTheManualLoop) {
  const auto sched = zp3::make_schedule(50, zp3::ScheduleKind::kLinearBeta);
  const auto pred = constant_oracle(1, 1, 0.3, 0.25, sched);
  const auto b = bundle(pred);
  const std::uint64_t seed = 99;
  const auto r = zp3::sample(any_camera(), b, sched, {}, seed, tiny());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Image x(1, 1, 3, zp3::Domain::kSampling);
  for (double& v : x.values()) v = normal(rng);
  for (int t = 49; t >= 1; --t) {
    x = zp3::ddim_step_canonical(x, pred->predict(x, t, {}), t, sched);
  }
  EXPECT_LT(zp3test::max_abs_diff(r.latent, x), 1e-12);
}

TEST(Sample, NarrowDataConvergesToItsMean) {
  const auto sched = zp3::make_schedule(50, zp3::ScheduleKind::kLinearBeta);
  const auto b = bundle(constant_oracle(6, 6, -0.4, 0.01, sched));
  const auto r = zp3::sample(any_camera(), b, sched, {}, 3, tiny(6, 6));
  for (double v : r.latent.values()) EXPECT_NEAR(v, -0.4, 0.05);
}

TEST(Sample, DuplicateSourcesDoNotChangeANormalizedFusion) {
  const auto sched = zp3::make_schedule(20, zp3::ScheduleKind::kCosine);
  const auto pred = constant_oracle(3, 3, 0.1, 0.2, sched);
  auto one = bundle(pred);
  auto two = bundle(pred);
  two.mvd.push_back({pred, {}, 2.5, "v1"});
  const auto a = zp3::sample(any_camera(), one, sched, {}, 4, tiny(3, 3));
  const auto c = zp3::sample(any_camera(), two, sched, {}, 4, tiny(3, 3));
  EXPECT_LT(zp3test::max_abs_diff(a.latent, c.latent), 1e-12);
}

TEST(Sample, LfOnlyPullsTowardTheRender) {
  // With a null MVD prediction the LF term is the only signal and the
  // sampler lands on the render.
  const auto sched = zp3::make_schedule(50, zp3::ScheduleKind::kLinearBeta);
  auto b = bundle(std::make_shared<zp3::NullPredictor>());
  b.lf_image = Image(2, 2, 3, zp3::Domain::kSampling, 0.6);
  const auto with_lf = zp3::sample(any_camera(), b, sched, {}, 5, tiny(2, 2));
  auto opts = tiny(2, 2);
  opts.lf_enabled = false;
  const auto without = zp3::sample(any_camera(), b, sched, {}, 5, opts);
  double err_with = 0.0, err_without = 0.0;
  for (std::size_t i = 0; i < with_lf.latent.size(); ++i) {
    err_with += std::abs(with_lf.latent[i] - 0.6);
    err_without += std::abs(without.latent[i] - 0.6);
  }
  EXPECT_LT(err_with, err_without);
}

TEST(Sample, StochasticAndCompensatedPathsAreSeededAndFinite) {
  const auto sched = zp3::make_schedule(30, zp3::ScheduleKind::kLinearBeta);
  auto b = bundle(constant_oracle(4, 4, 0.0, 0.5, sched));
  b.mvd.push_back({constant_oracle(4, 4, 0.2, 0.5, sched), {}, 2.0, "v1"});
  auto opts = tiny(4, 4);
  opts.stochastic_eta = 1.0;
  const auto det = zp3::sample(any_camera(), b, sched, {}, 5, tiny(4, 4));
  const auto s1 = zp3::sample(any_camera(), b, sched, {}, 5, opts);
  const auto s2 = zp3::sample(any_camera(), b, sched, {}, 5, opts);
  EXPECT_EQ(zp3test::max_abs_diff(s1.latent, s2.latent), 0.0);
  EXPECT_GT(zp3test::max_abs_diff(s1.latent, det.latent), 0.0);
  opts.variance_compensation = true;
  const auto vc = zp3::sample(any_camera(), b, sched, {}, 5, opts);
  for (double v : vc.latent.values()) EXPECT_TRUE(std::isfinite(v));
  EXPECT_GT(zp3test::max_abs_diff(vc.latent, s1.latent), 0.0);
}

TEST(Sample, LiteralUpdateIsSelectable) {
  const auto sched = zp3::make_schedule(10, zp3::ScheduleKind::kLinearBeta);
  const auto b = bundle(std::make_shared<zp3::NullPredictor>());
  auto opts = tiny();
  opts.canonical_ddim = false;
  // Zero noise prediction: the additive update leaves x unchanged.
  const auto r = zp3::sample(any_camera(), b, sched, {}, 2, opts);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(r.latent[i], normal(rng));
}

TEST(Sample, RejectsBadInputs) {
  const auto sched = zp3::make_schedule(10, zp3::ScheduleKind::kLinearBeta);
  EXPECT_THROW(zp3::sample(any_camera(), {}, sched, {}, 0, tiny()), zp3::InvalidArgument);
  auto b = bundle(constant_oracle(2, 2, 0.0, 1.0, sched));
  EXPECT_THROW(zp3::sample(any_camera(), b, sched, {}, 0, tiny(3, 3)), zp3::InvalidArgument);
  b = bundle(constant_oracle(1, 1, 0.0, 1.0, sched));
  b.lf_image = Image(2, 2, 3, zp3::Domain::kSampling);
  EXPECT_THROW(zp3::sample(any_camera(), b, sched, {}, 0, tiny()), zp3::InvalidArgument);
  zp3::FusionWeights w;
  w.sigma = 0.0;
  EXPECT_THROW(zp3::sample(any_camera(), bundle(constant_oracle(1, 1, 0.0, 1.0, sched)), sched,
                           w, 0, tiny()),
               zp3::InvalidArgument);
  auto neg = tiny();
  neg.stochastic_eta = -1.0;
  EXPECT_THROW(zp3::sample(any_camera(), bundle(constant_oracle(1, 1, 0.0, 1.0, sched)), sched,
                           {}, 0, neg),
               zp3::InvalidArgument);
}

}  // namespace
