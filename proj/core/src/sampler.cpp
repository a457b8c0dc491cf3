// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/sampler.hpp"

#include <random>

#include "zp3/error.hpp"
#include "zp3/render_prior.hpp"

namespace zp3 {

WeightPair step_weights(int t, const NoiseSchedule& sched,
                        const FusionWeights& w, const SampleOptions& options) {
  const int index = options.invert_t ? sched.steps - 1 - t : t;
  WeightPair pair = schedule_weights(index, w);
  if (!options.lf_enabled) pair.lf = 0.0;
  if (!options.hf_enabled) pair.hf = 0.0;
  return pair;
}

SampleResult sample(const Camera& target_view, const PriorBundle& providers,
                    const NoiseSchedule& sched, const FusionWeights& w,
                    std::uint64_t seed, const SampleOptions& options) {
  if (sched.steps < 2 ||
      sched.alpha_bar.size() != static_cast<std::size_t>(sched.steps)) {
    throw InvalidArgument("sample needs a schedule with at least 2 steps");
  }
  if (providers.mvd.empty()) {
    throw InvalidArgument("sample needs at least one conditioning view");
  }
  if (options.width < 1 || options.height < 1) {
    throw InvalidArgument("sample resolution must be positive");
  }
  if (options.stochastic_eta < 0.0) {
    throw InvalidArgument("stochastic eta must be >= 0");
  }
  validate(w);
  const int width = options.width, height = options.height;

  std::optional<Image> x_lf = providers.lf_image;
  if (!x_lf && providers.lf_cloud) {
    x_lf = render_prior_source(*providers.lf_cloud, target_view, width, height,
                               providers.background, options.render);
  }
  const bool use_lf = options.lf_enabled && x_lf.has_value();
  const bool use_hf = options.hf_enabled && providers.hf != nullptr;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Image x(width, height, 3, Domain::kSampling);
  for (double& v : x.values()) v = normal(rng);
  if (x_lf) require_same_shape(x, *x_lf, "sample: LF render");

  const Image zero(width, height, 3, Domain::kSampling);
  SampleResult result;
  std::vector<ViewPrediction> views(providers.mvd.size());
  for (int t = sched.steps - 1; t >= 1; --t) {
    for (std::size_t i = 0; i < providers.mvd.size(); ++i) {
      const MvdSource& src = providers.mvd[i];
      if (!src.predictor) throw InvalidArgument("null MVD predictor");
      views[i].noise = src.predictor->predict(x, t, src.condition);
      views[i].weight = src.weight;
      views[i].source_view_id = src.id;
      require_same_shape(x, views[i].noise, "sample: MVD prediction");
    }
    const Image eps_mvd = fuse_mvd(views, options.normalize_mvd);

    WeightPair weights = step_weights(t, sched, w, options);
    if (!use_lf) weights.lf = 0.0;
    if (!use_hf) weights.hf = 0.0;
    result.steps.push_back({t, weights.lf, weights.hf});

    const Image eps_lf =
        weights.lf != 0.0 ? lf_noise_from_render(x, *x_lf, t, sched) : zero;
    const Image eps_hf = weights.hf != 0.0
                             ? providers.hf->predict(x, t, providers.hf_condition)
                             : zero;
    const Image eps = fuse_noise(eps_mvd, eps_hf, eps_lf, weights);

    if (!options.canonical_ddim) {
      x = ddim_step(x, eps, t, sched);
      continue;
    }
    double sigma = 0.0;
    Image next = ddim_step_canonical(x, eps, t, sched, options.stochastic_eta,
                                     &sigma);
    if (sigma > 0.0) {
      Image noise(width, height, 3, Domain::kSampling);
      for (double& v : noise.values()) v = sigma * normal(rng);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] += noise[i];
      if (options.variance_compensation) {
        // Reference sample: the same step driven by the most trusted single
        // view alone.
        std::size_t best = 0;
        for (std::size_t i = 1; i < views.size(); ++i) {
          if (views[i].weight > views[best].weight) best = i;
        }
        Image orig = ddim_step_canonical(x, views[best].noise, t, sched,
                                         options.stochastic_eta);
        for (std::size_t i = 0; i < orig.size(); ++i) orig[i] += noise[i];
        next = variance_compensate(orig, next, noise,
                                   options.compensation_delta)
                   .adjusted;
      }
    }
    x = std::move(next);
  }
  result.latent = x;
  result.image = to_pixel(clamped(x, -1.0, 1.0));
  return result;
}

}  // namespace zp3
