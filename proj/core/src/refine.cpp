// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/refine.hpp"

#include "zp3/error.hpp"
#include "zp3/render_prior.hpp"

namespace zp3 {

void validate(const RefineConfig& cfg) {
  if (cfg.steps_per_iteration < 1) {
    throw InvalidArgument("steps_per_iteration must be >= 1");
  }
  if (cfg.train.densify_until > cfg.steps_per_iteration) {
    throw InvalidArgument("densify_until must not exceed steps_per_iteration");
  }
  if (!(cfg.lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (!(cfg.supervision_weight >= 0.0)) {
    throw InvalidArgument("supervision weight must be >= 0");
  }
  if (!(cfg.far_field_factor >= 1.0)) {
    throw InvalidArgument("far-field factor must be >= 1");
  }
  if (cfg.start_batch < 0) throw InvalidArgument("start_batch must be >= 0");
  validate(cfg.fusion);
  validate(cfg.train, cfg.steps_per_iteration);
}

Camera supervision_camera(const ViewSpec& spec, const RefineConfig& config) {
  Camera cam = camera_from_spec(spec, config.intrinsics);
  if (config.far_field_factor > 1.0) {
    cam = far_field_adapt(cam, config.far_field_factor);
  }
  return cam;
}

std::uint64_t batch_seed(std::uint64_t seed, int batch) {
  // splitmix64 finalizer over (seed, batch).
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(batch) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RefineResult refine(const GaussianCloud& cloud,
                    const std::vector<Observation>& observations,
                    const RefineConfig& config, const RefinePriors& priors,
                    std::uint64_t seed, const BatchCallback& on_batch) {
  validate(config);
  if (observations.empty()) throw InvalidArgument("refine needs observations");
  RefineResult result;
  result.cloud = cloud;
  const int n_batches = static_cast<int>(config.plan.batches.size());
  if (config.start_batch >= n_batches) return result;
  if (!priors.mvd) throw InvalidArgument("refine needs an MVD prior factory");

  const std::vector<TrainingView> originals =
      training_views(observations, config.train.background);
  std::vector<TrainingView> retained;

  LossSpec loss;
  loss.kind = PhotometricLoss::kComposite;
  loss.lambda = config.lambda;
  loss.perceptual = config.perceptual;
  loss.bridge = priors.perceptual_bridge;

  for (int b = config.start_batch; b < n_batches; ++b) {
    try {
      const std::uint64_t bseed = batch_seed(seed, b);
      BatchRecord record;
      record.batch = b;
      std::vector<TrainingView> views = originals;
      views.insert(views.end(), retained.begin(), retained.end());
      const auto& batch = config.plan.batches[b];
      for (std::size_t v = 0; v < batch.size(); ++v) {
        const ViewSpec& spec = batch[v];
        const Camera cam = supervision_camera(spec, config);
        PriorBundle bundle;
        bundle.mvd = priors.mvd(spec, cam);
        bundle.lf_cloud = &result.cloud;
        bundle.background = config.train.background;
        if (priors.hf) bundle.hf = priors.hf(spec, cam);
        const SampleResult s = sample(cam, bundle, config.schedule,
                                      config.fusion, bseed + v, config.sampler);
        TrainingView tv;
        tv.target = s.image;
        tv.mask = Image(s.image.width(), s.image.height(), 1, Domain::kPixel, 1.0);
        tv.camera = cam;
        tv.weight = config.supervision_weight;
        tv.alpha_supervision = false;
        views.push_back(tv);
        if (config.retain_supervision) retained.push_back(tv);
        record.views.push_back(spec);
        record.cameras.push_back(cam);
        record.supervision.push_back(s.image);
        record.weights.push_back(s.steps);
      }
      FitResult fit = optimize_views(result.cloud, views,
                                     config.steps_per_iteration, config.train,
                                     loss, bseed);
      result.cloud = std::move(fit.cloud);
      record.losses = std::move(fit.losses);
      if (on_batch) on_batch(record, result.cloud);
      result.batches.push_back(std::move(record));
    } catch (const Error& e) {
      rethrow_with_context(e, "batch " + std::to_string(b) + ": ");
    }
  }
  return result;
}

}  // namespace zp3
