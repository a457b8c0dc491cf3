// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3app/pipeline.hpp"

#include <limits>

#include "zp3/error.hpp"
#include "zp3/oracle.hpp"
#include "zp3/render_prior.hpp"

namespace zp3app {

SceneFrame scene_frame(const std::vector<zp3::Observation>& views,
                       const DatasetMeta& meta) {
  if (views.empty()) throw zp3::InvalidArgument("scene needs at least one view");
  SceneFrame f;
  f.intrinsics = views.front().camera.intrinsics;
  f.width = views.front().image.width();
  f.height = views.front().image.height();
  f.target = meta.target;
  f.observed_start = meta.observed_start;
  f.observed_end = meta.observed_end;
  double r = 0.0;
  for (const auto& v : views) r += (v.camera.center() - meta.target).norm();
  f.radius = r / static_cast<double>(views.size());
  return f;
}

zp3::RotationPlan make_plan(const RunConfig& cfg, const SceneFrame& frame) {
  if (cfg.plan.iterations == 0) {
    zp3::RotationPlan empty;
    empty.theta0 = cfg.plan.theta0;
    empty.delta_theta = cfg.plan.delta_theta;
    empty.delta_e = cfg.plan.delta_e;
    empty.batch_size = cfg.plan.batch_size;
    empty.elevations = cfg.plan.elevations;
    return empty;
  }
  return zp3::make_rotation_plan(cfg.plan.theta0, cfg.plan.delta_theta,
                                 cfg.plan.delta_e, cfg.plan.iterations,
                                 cfg.plan.batch_size, cfg.plan.elevations,
                                 frame.radius, frame.target, cfg.plan.strategy);
}

zp3::TrainOptions coarse_train_options(const RunConfig& cfg) {
  zp3::TrainOptions t = cfg.train;
  t.densify_until = std::min(t.densify_until, cfg.init_steps);
  return t;
}

zp3::RefineConfig make_refine_config(const RunConfig& cfg,
                                     const SceneFrame& frame) {
  zp3::RefineConfig rc;
  rc.steps_per_iteration = cfg.steps_per_iteration;
  rc.train = cfg.train;
  rc.lambda = cfg.lambda;
  rc.perceptual = cfg.perceptual;
  rc.fusion = cfg.fusion;
  rc.schedule = make_schedule(cfg);
  rc.sampler = cfg.sampler;
  rc.sampler.width = frame.width;
  rc.sampler.height = frame.height;
  rc.sampler.render = cfg.train.render;
  rc.plan = make_plan(cfg, frame);
  rc.intrinsics = frame.intrinsics;
  rc.far_field_factor = cfg.far_field_factor;
  rc.supervision_weight = cfg.supervision_weight;
  rc.retain_supervision = cfg.retain_supervision;
  return rc;
}

zp3::Camera target_camera(const RunConfig& cfg, const SceneFrame& frame,
                          double azimuth, double elevation) {
  zp3::ViewSpec spec;
  spec.azimuth = azimuth;
  spec.elevation = elevation;
  spec.radius = frame.radius;
  spec.target = frame.target;
  zp3::validate(spec);
  zp3::Camera cam = zp3::camera_from_spec(spec, frame.intrinsics);
  if (cfg.far_field_factor > 1.0) cam = zp3::far_field_adapt(cam, cfg.far_field_factor);
  return cam;
}

std::vector<Conditioning> conditioning_set(const RunConfig& cfg,
                                           const SceneFrame& frame,
                                           const std::vector<zp3::Observation>& obs) {
  const auto specs = zp3::make_input_set(frame.observed_start, frame.observed_end,
                                         cfg.priors.conditioning_views,
                                         frame.radius, frame.target);
  std::vector<Conditioning> out;
  for (const auto& spec : specs) {
    Conditioning c;
    c.spec = spec;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : obs) {
      const double d = zp3::angular_distance(o.view_spec.azimuth, spec.azimuth) +
                       std::abs(o.view_spec.elevation - spec.elevation);
      if (d < best) {
        best = d;
        c.image = zp3::to_sampling(o.image);
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

zp3::RefinePriors make_refine_priors(const RunConfig& cfg,
                                     const SceneFrame& frame,
                                     const PriorContext& ctx) {
  const zp3::NoiseSchedule schedule = make_schedule(cfg);
  const auto cond = std::make_shared<std::vector<Conditioning>>(
      conditioning_set(cfg, frame, ctx.observations));
  zp3::RefinePriors priors;

  if (cfg.priors.mvd == "oracle") {
    if (!ctx.oracle_cloud) {
      throw zp3::InvalidArgument("oracle MVD prior needs a ground-truth cloud");
    }
    const auto gt = ctx.oracle_cloud;
    priors.mvd = [cfg, frame, schedule, cond, gt](const zp3::ViewSpec& target,
                                                  const zp3::Camera&) {
      std::vector<zp3::MvdSource> sources;
      for (std::size_t i = 0; i < cond->size(); ++i) {
        const Conditioning& c = (*cond)[i];
        zp3::MvdSource src;
        src.predictor = std::make_shared<zp3::OraclePredictor>(
            zp3::make_pose_hypothesis_oracle(*gt, target, c.spec, frame.intrinsics,
                                             frame.width, frame.height, schedule,
                                             cfg.priors.pose, cfg.far_field_factor));
        src.condition = {c.image};
        src.weight = zp3::classify_view(c.spec, target.azimuth, cfg.view_classes);
        src.id = "cond" + std::to_string(i);
        sources.push_back(std::move(src));
      }
      return sources;
    };
  } else {
    if (!ctx.bridge) throw zp3::InvalidArgument("bridge MVD prior needs a bridge");
    auto predictor =
        std::make_shared<zp3::BridgePredictor>(ctx.bridge, zp3::RequestKind::kMvd);
    priors.mvd = [cfg, cond, predictor](const zp3::ViewSpec& target,
                                        const zp3::Camera&) {
      std::vector<zp3::MvdSource> sources;
      for (std::size_t i = 0; i < cond->size(); ++i) {
        const Conditioning& c = (*cond)[i];
        sources.push_back({predictor, {c.image},
                           zp3::classify_view(c.spec, target.azimuth, cfg.view_classes),
                           "cond" + std::to_string(i)});
      }
      return sources;
    };
  }

  if (cfg.priors.hf == "sharpen") {
    if (!ctx.oracle_cloud) {
      throw zp3::InvalidArgument("sharpen HF prior needs a ground-truth cloud");
    }
    const auto gt = ctx.oracle_cloud;
    priors.hf = [cfg, frame, schedule, gt](const zp3::ViewSpec&,
                                           const zp3::Camera& cam)
        -> std::shared_ptr<const zp3::NoisePredictor> {
      const zp3::Image target = zp3::render_prior_source(
          *gt, cam, frame.width, frame.height, cfg.train.background, cfg.train.render);
      return std::make_shared<zp3::OraclePredictor>(zp3::make_sharpen_oracle(
          {target}, cfg.priors.sharpen_amount, cfg.priors.sharpen_std, schedule));
    };
  } else if (cfg.priors.hf == "bridge") {
    if (!ctx.bridge) throw zp3::InvalidArgument("bridge HF prior needs a bridge");
    auto predictor =
        std::make_shared<zp3::BridgePredictor>(ctx.bridge, zp3::RequestKind::kHf);
    priors.hf = [predictor](const zp3::ViewSpec&, const zp3::Camera&)
        -> std::shared_ptr<const zp3::NoisePredictor> { return predictor; };
  }
  if (cfg.perceptual == zp3::PerceptualKind::kBridgeLpips) {
    priors.perceptual_bridge = ctx.bridge.get();
  }
  return priors;
}

}  // namespace zp3app
