// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "zp3/oracle.hpp"
#include "zp3/render.hpp"
#include "zp3/sampler.hpp"
#include "zp3/views.hpp"

namespace {

zp3::GaussianCloud random_cloud(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-0.6, 0.6), ls(-3.0, -1.5), col(0.1, 0.9);
  zp3::GaussianCloud cloud;
  for (int i = 0; i < count; ++i) {
    zp3::Vec4 q(1.0, pos(rng), pos(rng), pos(rng));
    cloud.gaussians.push_back(zp3::make_gaussian(
        zp3::Vec3(pos(rng), pos(rng), pos(rng)),
        zp3::Vec3(std::exp(ls(rng)), std::exp(ls(rng)), std::exp(ls(rng))), q.normalized(),
        0.6, zp3::Vec3(col(rng), col(rng), col(rng))));
  }
  return cloud;
}

zp3::Camera camera(int size) {
  zp3::ViewSpec spec;
  spec.azimuth = 30.0;
  spec.elevation = 10.0;
  spec.radius = 2.5;
  return zp3::camera_from_spec(spec, {1.25 * size, 1.25 * size, 0.5 * size, 0.5 * size});
}

void BM_RenderForward(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const auto cloud = random_cloud(static_cast<int>(state.range(1)), 1);
  const auto cam = camera(size);
  for (auto _ : state) {
    benchmark::DoNotOptimize(zp3::render(cloud, cam, size, size));
  }
  state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_RenderForward)->Args({64, 1000})->Args({128, 4000})->Unit(benchmark::kMillisecond);

void BM_RenderBackward(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const auto cloud = random_cloud(static_cast<int>(state.range(1)), 2);
  const auto cam = camera(size);
  const zp3::Image grad(size, size, 3, zp3::Domain::kPixel, 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(zp3::render_backward(cloud, cam, size, size, grad));
  }
}
BENCHMARK(BM_RenderBackward)->Args({64, 1000})->Unit(benchmark::kMillisecond);

zp3::GaussianMixtureOracle mixture(int size, int components) {
  zp3::GaussianMixtureOracle o;
  o.schedule = zp3::make_schedule(50, zp3::ScheduleKind::kLinearBeta);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < components; ++k) {
    zp3::Image mean(size, size, 3, zp3::Domain::kSampling);
    for (double& v : mean.values()) v = u(rng);
    o.components.push_back({mean, 0.05, 1.0 / components});
  }
  return o;
}

void BM_OraclePredict(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const auto o = mixture(size, static_cast<int>(state.range(1)));
  const zp3::Image x(size, size, 3, zp3::Domain::kSampling, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(zp3::oracle_predict(x, 25, o));
}
BENCHMARK(BM_OraclePredict)->Args({64, 1})->Args({64, 5});

void BM_Sample(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const auto o = mixture(size, 5);
  const auto cloud = random_cloud(500, 4);
  zp3::PriorBundle b;
  b.mvd.push_back({std::make_shared<zp3::OraclePredictor>(o), {}, 1.0, "v0"});
  b.lf_cloud = &cloud;
  zp3::SampleOptions opts;
  opts.width = opts.height = size;
  const auto cam = camera(size);
  for (auto _ : state) {
    benchmark::DoNotOptimize(zp3::sample(cam, b, o.schedule, {}, 1, opts));
  }
}
BENCHMARK(BM_Sample)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
