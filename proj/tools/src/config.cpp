// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3app/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "zp3/error.hpp"

namespace zp3app {
namespace {

using nlohmann::json;

// Reads keys from a JSON object into fields, rejecting unknown keys.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw zp3::InvalidArgument(name_ + " must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw zp3::InvalidArgument("unknown config key " + name_ + "." + it.key());
      }
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw zp3::InvalidArgument("config key " + name_ + "." + key +
                                 " has the wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

json vec3(const zp3::Vec3& v) { return json::array({v[0], v[1], v[2]}); }

void read_vec3(Section& s, const char* key, zp3::Vec3& out) {
  std::vector<double> v{out[0], out[1], out[2]};
  s.get(key, v);
  if (v.size() != 3) throw zp3::InvalidArgument(std::string(key) + " needs 3 values");
  out = zp3::Vec3(v[0], v[1], v[2]);
}

const char* strategy_name(zp3::PlanStrategy s) {
  return s == zp3::PlanStrategy::kAlternating ? "alternating" : "monotone";
}

zp3::PlanStrategy strategy_from(const std::string& s) {
  if (s == "alternating") return zp3::PlanStrategy::kAlternating;
  if (s == "monotone") return zp3::PlanStrategy::kMonotone;
  throw zp3::InvalidArgument("unknown plan strategy '" + s + "'");
}

json to_json_value(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["schedule"] = {{"kind", zp3::to_string(c.schedule_kind)},
                   {"steps", c.schedule_steps}};
  j["fusion"] = {{"tau", c.fusion.tau},
                 {"sigma", c.fusion.sigma},
                 {"eta", c.fusion.eta},
                 {"normalize", c.sampler.normalize_mvd},
                 {"invert_t", c.sampler.invert_t},
                 {"lf_enabled", c.sampler.lf_enabled},
                 {"hf_enabled", c.sampler.hf_enabled}};
  j["sampler"] = {{"canonical_ddim", c.sampler.canonical_ddim},
                  {"stochastic_eta", c.sampler.stochastic_eta},
                  {"variance_compensation", c.sampler.variance_compensation},
                  {"delta", c.sampler.compensation_delta},
                  {"width", c.sampler.width},
                  {"height", c.sampler.height},
                  {"far_field_factor", c.far_field_factor}};
  j["views"] = {{"frontal_max", c.view_classes.frontal_max},
                {"back_min", c.view_classes.back_min},
                {"frontal_weight", c.view_classes.frontal_weight},
                {"back_weight", c.view_classes.back_weight},
                {"side_weight", c.view_classes.side_weight}};
  j["plan"] = {{"theta0", c.plan.theta0},
               {"delta_theta", c.plan.delta_theta},
               {"delta_e", c.plan.delta_e},
               {"iterations", c.plan.iterations},
               {"batch_size", c.plan.batch_size},
               {"elevations", c.plan.elevations},
               {"strategy", strategy_name(c.plan.strategy)}};
  j["init"] = {{"points", c.init_points},
               {"steps", c.init_steps},
               {"opacity", c.init.opacity},
               {"depth_jitter", c.init.depth_jitter},
               {"neighbors", c.init.neighbors}};
  const auto& t = c.train;
  j["refine"] = {
      {"steps_per_iteration", c.steps_per_iteration},
      {"densify_from", t.densify_from},
      {"densify_until", t.densify_until},
      {"densify_interval", t.densify_interval},
      {"grad_threshold", t.densify.grad_threshold},
      {"percent_dense", t.densify.percent_dense},
      {"split_factor", t.densify.split_factor},
      {"prune_opacity", t.prune_opacity},
      {"max_gaussians", t.max_gaussians},
      {"alpha_weight", t.alpha_weight},
      {"background", vec3(t.background)},
      {"scene_extent", t.scene_extent},
      {"lambda", c.lambda},
      {"perceptual", zp3::to_string(c.perceptual)},
      {"supervision_weight", c.supervision_weight},
      {"retain_supervision", c.retain_supervision},
      {"lr",
       {{"position", t.lr.position},
        {"position_final", t.lr.position_final},
        {"scale", t.lr.scale},
        {"rotation", t.lr.rotation},
        {"opacity", t.lr.opacity},
        {"sh_dc", t.lr.sh_dc},
        {"sh_rest", t.lr.sh_rest}}}};
  j["render"] = {{"dilation", t.render.dilation},
                 {"near", t.render.near},
                 {"tile_size", t.render.tile_size}};
  const auto& p = c.priors;
  j["priors"] = {{"mvd", p.mvd},
                 {"hf", p.hf},
                 {"oracle_cloud", p.oracle_cloud},
                 {"conditioning_views", p.conditioning_views},
                 {"offsets", p.pose.offsets},
                 {"base_spread", p.pose.base_spread},
                 {"spread_per_degree", p.pose.spread_per_degree},
                 {"component_std", p.pose.component_std},
                 {"sharpen_amount", p.sharpen_amount},
                 {"sharpen_std", p.sharpen_std}};
  j["bridge"] = {{"enabled", c.bridge_enabled},
                 {"transport", zp3::to_string(c.bridge.transport)},
                 {"executable", c.bridge.executable},
                 {"args", c.bridge.args},
                 {"directory", c.bridge.directory},
                 {"timeout", c.bridge.timeout_seconds}};
  j["eval"] = {{"full_frame", c.eval_full_frame}};
  return j;
}

}  // namespace

void validate(const RunConfig& c) {
  if (c.schedule_steps < 2) throw zp3::InvalidArgument("schedule.steps must be >= 2");
  zp3::validate(c.fusion);
  if (c.sampler.width < 1 || c.sampler.height < 1) {
    throw zp3::InvalidArgument("sampler resolution must be positive");
  }
  if (c.sampler.stochastic_eta < 0.0) {
    throw zp3::InvalidArgument("sampler.stochastic_eta must be >= 0");
  }
  if (!(c.sampler.compensation_delta > 0.0)) {
    throw zp3::InvalidArgument("sampler.delta must be > 0");
  }
  if (!(c.far_field_factor >= 1.0)) {
    throw zp3::InvalidArgument("sampler.far_field_factor must be >= 1");
  }
  if (c.plan.iterations < 0 || c.plan.batch_size < 1 || !(c.plan.delta_theta > 0.0)) {
    throw zp3::InvalidArgument("plan needs iterations >= 0, batch_size >= 1, delta_theta > 0");
  }
  if (c.plan.elevations.empty()) throw zp3::InvalidArgument("plan.elevations is empty");
  for (double e : c.plan.elevations) {
    if (e < -90.0 || e > 90.0) throw zp3::InvalidArgument("plan elevation out of range");
  }
  if (c.init_points < 1 || c.init_steps < 1) {
    throw zp3::InvalidArgument("init.points and init.steps must be >= 1");
  }
  if (c.steps_per_iteration < 1) {
    throw zp3::InvalidArgument("refine.steps_per_iteration must be >= 1");
  }
  if (c.train.densify_until > c.steps_per_iteration) {
    throw zp3::InvalidArgument("refine.densify_until must not exceed steps_per_iteration");
  }
  zp3::validate(c.train, c.steps_per_iteration);
  if (!(c.lambda >= 0.0)) throw zp3::InvalidArgument("refine.lambda must be >= 0");
  if (c.priors.mvd != "oracle" && c.priors.mvd != "bridge") {
    throw zp3::InvalidArgument("priors.mvd must be oracle or bridge");
  }
  if (c.priors.hf != "null" && c.priors.hf != "sharpen" && c.priors.hf != "bridge") {
    throw zp3::InvalidArgument("priors.hf must be null, sharpen or bridge");
  }
  if (c.priors.conditioning_views != 2 && c.priors.conditioning_views != 3) {
    throw zp3::InvalidArgument("priors.conditioning_views must be 2 or 3");
  }
  const bool needs_bridge = c.priors.mvd == "bridge" || c.priors.hf == "bridge" ||
                            c.perceptual == zp3::PerceptualKind::kBridgeLpips;
  if (needs_bridge && !c.bridge_enabled) {
    throw zp3::InvalidArgument("bridge-backed priors need bridge.enabled = true");
  }
  if (c.bridge_enabled) zp3::validate(c.bridge);
}

std::string to_json(const RunConfig& cfg) {
  return to_json_value(cfg).dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw zp3::InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  {
    Section s(root, "config");
    s.get("seed", c.seed);
    if (const json* j = s.child("schedule")) {
      Section q(*j, "schedule");
      std::string kind = zp3::to_string(c.schedule_kind);
      q.get("kind", kind);
      c.schedule_kind = zp3::schedule_kind_from_string(kind);
      q.get("steps", c.schedule_steps);
    }
    if (const json* j = s.child("fusion")) {
      Section q(*j, "fusion");
      q.get("tau", c.fusion.tau);
      q.get("sigma", c.fusion.sigma);
      q.get("eta", c.fusion.eta);
      q.get("normalize", c.sampler.normalize_mvd);
      q.get("invert_t", c.sampler.invert_t);
      q.get("lf_enabled", c.sampler.lf_enabled);
      q.get("hf_enabled", c.sampler.hf_enabled);
    }
    if (const json* j = s.child("sampler")) {
      Section q(*j, "sampler");
      q.get("canonical_ddim", c.sampler.canonical_ddim);
      q.get("stochastic_eta", c.sampler.stochastic_eta);
      q.get("variance_compensation", c.sampler.variance_compensation);
      q.get("delta", c.sampler.compensation_delta);
      q.get("width", c.sampler.width);
      q.get("height", c.sampler.height);
      q.get("far_field_factor", c.far_field_factor);
    }
    if (const json* j = s.child("views")) {
      Section q(*j, "views");
      q.get("frontal_max", c.view_classes.frontal_max);
      q.get("back_min", c.view_classes.back_min);
      q.get("frontal_weight", c.view_classes.frontal_weight);
      q.get("back_weight", c.view_classes.back_weight);
      q.get("side_weight", c.view_classes.side_weight);
    }
    if (const json* j = s.child("plan")) {
      Section q(*j, "plan");
      q.get("theta0", c.plan.theta0);
      q.get("delta_theta", c.plan.delta_theta);
      q.get("delta_e", c.plan.delta_e);
      q.get("iterations", c.plan.iterations);
      q.get("batch_size", c.plan.batch_size);
      q.get("elevations", c.plan.elevations);
      std::string strategy = strategy_name(c.plan.strategy);
      q.get("strategy", strategy);
      c.plan.strategy = strategy_from(strategy);
    }
    if (const json* j = s.child("init")) {
      Section q(*j, "init");
      q.get("points", c.init_points);
      q.get("steps", c.init_steps);
      q.get("opacity", c.init.opacity);
      q.get("depth_jitter", c.init.depth_jitter);
      q.get("neighbors", c.init.neighbors);
    }
    if (const json* j = s.child("refine")) {
      Section q(*j, "refine");
      auto& t = c.train;
      q.get("steps_per_iteration", c.steps_per_iteration);
      q.get("densify_from", t.densify_from);
      q.get("densify_until", t.densify_until);
      q.get("densify_interval", t.densify_interval);
      q.get("grad_threshold", t.densify.grad_threshold);
      q.get("percent_dense", t.densify.percent_dense);
      q.get("split_factor", t.densify.split_factor);
      q.get("prune_opacity", t.prune_opacity);
      q.get("max_gaussians", t.max_gaussians);
      q.get("alpha_weight", t.alpha_weight);
      read_vec3(q, "background", t.background);
      q.get("scene_extent", t.scene_extent);
      q.get("lambda", c.lambda);
      std::string perceptual = zp3::to_string(c.perceptual);
      q.get("perceptual", perceptual);
      c.perceptual = zp3::perceptual_kind_from_string(perceptual);
      q.get("supervision_weight", c.supervision_weight);
      q.get("retain_supervision", c.retain_supervision);
      if (const json* l = q.child("lr")) {
        Section r(*l, "refine.lr");
        r.get("position", t.lr.position);
        r.get("position_final", t.lr.position_final);
        r.get("scale", t.lr.scale);
        r.get("rotation", t.lr.rotation);
        r.get("opacity", t.lr.opacity);
        r.get("sh_dc", t.lr.sh_dc);
        r.get("sh_rest", t.lr.sh_rest);
      }
    }
    if (const json* j = s.child("render")) {
      Section q(*j, "render");
      q.get("dilation", c.train.render.dilation);
      q.get("near", c.train.render.near);
      q.get("tile_size", c.train.render.tile_size);
    }
    if (const json* j = s.child("priors")) {
      Section q(*j, "priors");
      auto& p = c.priors;
      q.get("mvd", p.mvd);
      q.get("hf", p.hf);
      q.get("oracle_cloud", p.oracle_cloud);
      q.get("conditioning_views", p.conditioning_views);
      q.get("offsets", p.pose.offsets);
      q.get("base_spread", p.pose.base_spread);
      q.get("spread_per_degree", p.pose.spread_per_degree);
      q.get("component_std", p.pose.component_std);
      q.get("sharpen_amount", p.sharpen_amount);
      q.get("sharpen_std", p.sharpen_std);
    }
    if (const json* j = s.child("bridge")) {
      Section q(*j, "bridge");
      q.get("enabled", c.bridge_enabled);
      std::string transport = zp3::to_string(c.bridge.transport);
      q.get("transport", transport);
      c.bridge.transport = zp3::transport_from_string(transport);
      q.get("executable", c.bridge.executable);
      q.get("args", c.bridge.args);
      q.get("directory", c.bridge.directory);
      q.get("timeout", c.bridge.timeout_seconds);
    }
    if (const json* j = s.child("eval")) {
      Section q(*j, "eval");
      q.get("full_frame", c.eval_full_frame);
    }
  }
  c.sampler.render = c.train.render;
  c.priors.pose.background = c.train.background;
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw zp3::IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

zp3::NoiseSchedule make_schedule(const RunConfig& cfg) {
  return zp3::make_schedule(cfg.schedule_steps, cfg.schedule_kind);
}

}  // namespace zp3app
