// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3app/cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>

#include "zp3/cloud_io.hpp"
#include "zp3/error.hpp"
#include "zp3/metrics.hpp"
#include "zp3/refine.hpp"
#include "zp3/render.hpp"
#include "zp3app/config.hpp"
#include "zp3app/dataset.hpp"
#include "zp3app/pipeline.hpp"
#include "zp3app/png_io.hpp"
#include "zp3app/toy.hpp"

namespace zp3app {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Held for the lifetime of a command that writes into `dir`.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      throw zp3::IoError("cannot create output directory " + dir.string());
    }
    path_ = dir / ".zp3.lock";
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST) {
        throw zp3::IoError("output directory " + dir.string() +
                           " is locked by another zp3 process (" +
                           path_.string() + ")");
      }
      throw zp3::IoError("cannot write into " + dir.string() + ": " +
                         std::strerror(errno));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] auto n = ::write(fd_, pid.data(), pid.size());
  }
  ~DirectoryLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

fs::path parent_or_cwd(const fs::path& file) {
  const fs::path p = file.parent_path();
  return p.empty() ? fs::path(".") : p;
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw zp3::IoError("cannot write " + path.string());
    out << text;
    if (!out) throw zp3::IoError("cannot write " + path.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

// Options shared by every command that reads a run configuration.
struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON run configuration");
  cmd->add_option("--seed", o.seed, "random seed (overrides the config)");
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  validate(cfg);
  return cfg;
}

std::shared_ptr<zp3::BridgeClient> make_bridge(const RunConfig& cfg) {
  const bool needed = cfg.priors.mvd == "bridge" || cfg.priors.hf == "bridge" ||
                      cfg.perceptual == zp3::PerceptualKind::kBridgeLpips;
  if (!needed) return nullptr;
  if (!cfg.bridge_enabled) {
    throw zp3::InvalidArgument("config selects a bridge prior but bridge.enabled is false");
  }
  return std::make_shared<zp3::BridgeClient>(cfg.bridge);
}

// The oracle cloud defaults to gt.zp3g next to the dataset or one level up,
// which is where `synth` puts it.
std::shared_ptr<const zp3::GaussianCloud> load_oracle(const RunConfig& cfg,
                                                      const std::string& data) {
  const bool needed = cfg.priors.mvd == "oracle" || cfg.priors.hf == "sharpen";
  if (!needed) return nullptr;
  std::vector<fs::path> candidates;
  if (!cfg.priors.oracle_cloud.empty()) {
    candidates.emplace_back(cfg.priors.oracle_cloud);
  } else {
    candidates.push_back(fs::path(data) / "gt.zp3g");
    candidates.push_back(fs::path(data).parent_path() / "gt.zp3g");
    candidates.push_back(fs::path(data) / ".." / "gt.zp3g");
  }
  for (const auto& c : candidates) {
    if (fs::exists(c)) {
      return std::make_shared<zp3::GaussianCloud>(zp3::read_cloud(c.string()));
    }
  }
  throw zp3::InvalidArgument(
      "oracle prior needs a ground-truth cloud; set priors.oracle_cloud or "
      "place gt.zp3g next to the dataset");
}

zp3::EvalOptions eval_options(const RunConfig& cfg) {
  zp3::EvalOptions e;
  e.full_frame = cfg.eval_full_frame;
  e.background = cfg.train.background;
  e.render = cfg.train.render;
  return e;
}

// ---------------------------------------------------------------- init

struct InitArgs {
  CommonOptions common;
  std::string data;
  std::string out;
  std::optional<int> points;
  std::optional<int> steps;
};

int cmd_init(const InitArgs& a) {
  RunConfig cfg = resolve_config(a.common);
  if (a.points) cfg.init_points = *a.points;
  if (a.steps) cfg.init_steps = *a.steps;
  validate(cfg);
  const Dataset ds = load_dataset(a.data);
  const fs::path out(a.out);
  DirectoryLock lock(parent_or_cwd(out));

  zp3::GaussianCloud cloud =
      zp3::init_cloud(ds.views, cfg.init_points, cfg.seed, cfg.init);
  const zp3::FitResult fit = zp3::coarse_fit(
      cloud, ds.views, cfg.init_steps, coarse_train_options(cfg), cfg.seed + 1);
  zp3::write_cloud(out.string(), fit.cloud);

  const zp3::MetricReport rep =
      zp3::evaluate(fit.cloud, ds.views, ds.meta.observed_start,
                    ds.meta.observed_end, eval_options(cfg));
  json log;
  log["gaussians"] = fit.cloud.size();
  log["steps"] = cfg.init_steps;
  log["seed"] = cfg.seed;
  log["losses"] = fit.losses;
  log["train_psnr"] = rep.total.psnr;
  log["train_ssim"] = rep.total.ssim;
  write_json(out.string() + ".log.json", log);

  std::printf("wrote %s (%zu gaussians)\n", out.c_str(), fit.cloud.size());
  std::printf("masked training PSNR %.2f dB, SSIM %.4f\n", rep.total.psnr,
              rep.total.ssim);
  return kExitOk;
}

// -------------------------------------------------------------- sample

struct SampleArgs {
  CommonOptions common;
  std::string checkpoint;
  std::string data;
  std::string view;
  std::string out;
};

zp3::ViewSpec parse_view(const std::string& text, const SceneFrame& frame) {
  static const std::regex re(R"(\s*([-+0-9.eE]+)\s*,\s*([-+0-9.eE]+)\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) {
    throw zp3::InvalidArgument("--view expects AZIMUTH,ELEVATION, got '" + text + "'");
  }
  zp3::ViewSpec spec;
  try {
    spec.azimuth = std::stod(m[1].str());
    spec.elevation = std::stod(m[2].str());
  } catch (const std::exception&) {
    throw zp3::InvalidArgument("--view expects numbers, got '" + text + "'");
  }
  if (!(spec.azimuth >= 0.0 && spec.azimuth < 360.0)) {
    throw zp3::InvalidArgument("--view azimuth must lie in [0, 360)");
  }
  spec.radius = frame.radius;
  spec.target = frame.target;
  zp3::validate(spec);
  return spec;
}

int cmd_sample(const SampleArgs& a) {
  const RunConfig cfg = resolve_config(a.common);
  const Dataset ds = load_dataset(a.data);
  const SceneFrame frame = scene_frame(ds.views, ds.meta);
  const zp3::ViewSpec spec = parse_view(a.view, frame);
  const zp3::GaussianCloud cloud = zp3::read_cloud(a.checkpoint);
  const fs::path out(a.out);
  DirectoryLock lock(parent_or_cwd(out));

  PriorContext ctx;
  ctx.oracle_cloud = load_oracle(cfg, a.data);
  ctx.observations = ds.views;
  ctx.bridge = make_bridge(cfg);
  const zp3::RefinePriors priors = make_refine_priors(cfg, frame, ctx);
  const zp3::RefineConfig rc = make_refine_config(cfg, frame);
  const zp3::Camera cam = zp3::supervision_camera(spec, rc);

  zp3::PriorBundle bundle;
  bundle.mvd = priors.mvd(spec, cam);
  bundle.lf_cloud = &cloud;
  bundle.background = cfg.train.background;
  if (priors.hf) bundle.hf = priors.hf(spec, cam);
  const zp3::SampleResult s =
      zp3::sample(cam, bundle, rc.schedule, rc.fusion, cfg.seed, rc.sampler);
  write_png(out.string(), s.image);

  json sidecar;
  sidecar["view"] = {{"azimuth", spec.azimuth}, {"elevation", spec.elevation}};
  sidecar["seed"] = cfg.seed;
  json weights = json::array();
  for (int t = 0; t < rc.schedule.steps; ++t) {
    const zp3::WeightPair w = zp3::step_weights(t, rc.schedule, rc.fusion, rc.sampler);
    weights.push_back({{"t", t}, {"w_lf", w.lf}, {"w_hf", w.hf}});
  }
  sidecar["weights"] = weights;
  json steps = json::array();
  for (const auto& r : s.steps) {
    steps.push_back({{"t", r.t}, {"w_lf", r.w_lf}, {"w_hf", r.w_hf}});
  }
  sidecar["steps"] = steps;
  write_json(out.string() + ".json", sidecar);
  std::printf("wrote %s\n", out.c_str());
  return kExitOk;
}

// -------------------------------------------------------------- refine

struct RefineArgs {
  CommonOptions common;
  std::string checkpoint;
  std::string data;
  std::string out;
  std::string eval;
  bool resume = false;
};

std::string batch_name(int b) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "batch_%03d", b);
  return buf;
}

int cmd_refine(const RefineArgs& a) {
  const RunConfig cfg = resolve_config(a.common);
  const Dataset ds = load_dataset(a.data);
  const SceneFrame frame = scene_frame(ds.views, ds.meta);
  const fs::path out(a.out);
  DirectoryLock lock(out);
  std::optional<Dataset> truth;
  if (!a.eval.empty()) truth = load_dataset(a.eval);

  PriorContext ctx;
  ctx.oracle_cloud = load_oracle(cfg, a.data);
  ctx.observations = ds.views;
  ctx.bridge = make_bridge(cfg);
  const zp3::RefinePriors priors = make_refine_priors(cfg, frame, ctx);
  zp3::RefineConfig rc = make_refine_config(cfg, frame);
  const int n_batches = static_cast<int>(rc.plan.batches.size());

  const zp3::GaussianCloud coarse = zp3::read_cloud(a.checkpoint);
  zp3::GaussianCloud cloud = coarse;
  int start = 0;
  json history = json::array();
  const fs::path history_path = out / "history.json";
  if (a.resume) {
    for (int b = n_batches - 1; b >= 0; --b) {
      const fs::path ck = out / (batch_name(b) + ".zp3g");
      if (fs::exists(ck)) {
        cloud = zp3::read_cloud(ck.string());
        start = b + 1;
        break;
      }
    }
    if (start > 0 && fs::exists(history_path)) {
      std::ifstream in(history_path);
      try {
        in >> history;
      } catch (const json::exception& e) {
        throw zp3::InvalidArgument("bad " + history_path.string() + ": " + e.what());
      }
      json kept = json::array();
      for (const auto& h : history) {
        if (h.value("batch", n_batches) < start) kept.push_back(h);
      }
      history = kept;
    }
    std::printf("resuming at batch %d of %d\n", start, n_batches);
  }

  fs::create_directories(out / "supervision");
  const std::vector<std::vector<zp3::ViewSpec>> all_batches = rc.plan.batches;
  bool last_failed = false;
  for (int b = start; b < n_batches; ++b) {
    rc.start_batch = b;
    rc.plan.batches.assign(all_batches.begin(), all_batches.begin() + b + 1);
    zp3::RefineResult res;
    try {
      res = zp3::refine(cloud, ds.views, rc, priors, cfg.seed);
    } catch (const zp3::Error& e) {
      if (e.kind() != zp3::ErrorKind::kOptimizationFailure) throw;
      std::fprintf(stderr, "zp3: %s\n", e.what());
      history.push_back({{"batch", b}, {"error", e.what()}});
      last_failed = b == n_batches - 1;
      continue;
    }
    cloud = std::move(res.cloud);
    const zp3::BatchRecord& rec = res.batches.back();
    for (std::size_t v = 0; v < rec.supervision.size(); ++v) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_view_%02zu.png", batch_name(b).c_str(), v);
      write_png((out / "supervision" / name).string(), rec.supervision[v]);
    }
    // Continue from the stored f32 values so --resume reproduces this run.
    const auto bytes = zp3::encode_cloud(cloud);
    cloud = zp3::decode_cloud(bytes);
    zp3::write_cloud((out / (batch_name(b) + ".zp3g")).string(), cloud);
    json entry;
    entry["batch"] = b;
    entry["gaussians"] = cloud.size();
    json views = json::array();
    for (const auto& v : rec.views) views.push_back({v.azimuth, v.elevation});
    entry["views"] = views;
    entry["final_loss"] = rec.losses.empty() ? 0.0 : rec.losses.back();
    if (truth) {
      const auto r = zp3::evaluate(cloud, truth->views, truth->meta.observed_start,
                                   truth->meta.observed_end, eval_options(cfg));
      entry["visible_psnr"] = r.visible.psnr;
      entry["invisible_psnr"] = r.invisible.psnr;
    }
    history.push_back(entry);
    write_json(history_path, history);
    std::printf("batch %d/%d: %zu gaussians\n", b + 1, n_batches, cloud.size());
  }
  write_json(history_path, history);
  zp3::write_cloud((out / "final.zp3g").string(), cloud);

  if (truth) {
    const auto before = zp3::evaluate(coarse, truth->views, truth->meta.observed_start,
                                      truth->meta.observed_end, eval_options(cfg));
    const auto after = zp3::evaluate(cloud, truth->views, truth->meta.observed_start,
                                     truth->meta.observed_end, eval_options(cfg));
    std::printf("%-10s %10s %10s\n", "region", "coarse", "refined");
    std::printf("%-10s %10.2f %10.2f\n", "visible", before.visible.psnr,
                after.visible.psnr);
    std::printf("%-10s %10.2f %10.2f\n", "invisible", before.invisible.psnr,
                after.invisible.psnr);
  }
  std::printf("wrote %s\n", (out / "final.zp3g").c_str());
  return last_failed ? kExitOptimization : kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  CommonOptions common;
  std::string checkpoint;
  std::string data;
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  const RunConfig cfg = resolve_config(a.common);
  const Dataset ds = load_dataset(a.data);
  const zp3::GaussianCloud cloud = zp3::read_cloud(a.checkpoint);
  std::shared_ptr<zp3::BridgeClient> bridge = make_bridge(cfg);
  zp3::EvalOptions opts = eval_options(cfg);
  if (cfg.perceptual == zp3::PerceptualKind::kBridgeLpips) opts.lpips = bridge.get();
  const zp3::MetricReport rep = zp3::evaluate(
      cloud, ds.views, ds.meta.observed_start, ds.meta.observed_end, opts);
  const std::string table = zp3::report_table(rep);
  if (!a.out.empty()) {
    const fs::path out(a.out);
    DirectoryLock lock(parent_or_cwd(out));
    write_text(out, zp3::report_csv(rep));
    fs::path txt = out;
    txt.replace_extension(".txt");
    write_text(txt, table);
  }
  std::fputs(table.c_str(), stdout);
  return kExitOk;
}

// -------------------------------------------------------------- render

struct RenderArgs {
  CommonOptions common;
  std::string checkpoint;
  std::string data;
  std::string out;
  int frames = 36;
  double elevation = 0.0;
  int width = 64;
  int height = 64;
  double radius = 2.5;
  double focal = 80.0;
};

int cmd_render(const RenderArgs& a) {
  const RunConfig cfg = resolve_config(a.common);
  if (a.frames < 1) throw zp3::InvalidArgument("--frames must be >= 1");
  SceneFrame frame;
  if (!a.data.empty()) {
    const Dataset ds = load_dataset(a.data);
    frame = scene_frame(ds.views, ds.meta);
  } else {
    ToyOptions t;
    t.width = a.width;
    t.height = a.height;
    t.focal = a.focal * 64.0 / a.width;
    frame.intrinsics = toy_intrinsics(t);
    frame.width = a.width;
    frame.height = a.height;
    frame.radius = a.radius;
  }
  const zp3::GaussianCloud cloud = zp3::read_cloud(a.checkpoint);
  const fs::path out(a.out);
  DirectoryLock lock(out);
  for (int i = 0; i < a.frames; ++i) {
    zp3::ViewSpec spec;
    spec.azimuth = 360.0 * i / a.frames;
    spec.elevation = a.elevation;
    spec.radius = frame.radius;
    spec.target = frame.target;
    zp3::validate(spec);
    const zp3::Camera cam = zp3::camera_from_spec(spec, frame.intrinsics);
    zp3::RenderOutput r =
        zp3::render(cloud, cam, frame.width, frame.height, cfg.train.render);
    char name[32];
    std::snprintf(name, sizeof(name), "%03d.png", i);
    write_png((out / name).string(),
              zp3::clamped(zp3::composite_over(r, cfg.train.background), 0.0, 1.0));
  }
  std::printf("wrote %d frames to %s\n", a.frames, out.c_str());
  return kExitOk;
}

// --------------------------------------------------------------- synth

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 7;
  int width = 64;
  int height = 64;
  int gaussians = 600;
  double observed_start = 0.0;
  double observed_end = 90.0;
};

int cmd_synth(const SynthArgs& a) {
  ToyOptions t;
  t.seed = a.seed;
  t.width = a.width;
  t.height = a.height;
  t.gaussians = a.gaussians;
  t.observed_start = a.observed_start;
  t.observed_end = a.observed_end;
  const ToyDataset toy = make_toy_dataset(t);
  const fs::path out(a.out);
  DirectoryLock lock(out);
  write_dataset((out / "train").string(), toy.train, toy.meta);
  write_dataset((out / "test").string(), toy.test, toy.meta);
  zp3::write_cloud((out / "gt.zp3g").string(), toy.ground_truth);
  std::printf("wrote %zu train and %zu test views to %s\n", toy.train.size(),
              toy.test.size(), out.c_str());
  return kExitOk;
}

int exit_code_for(zp3::ErrorKind kind) {
  switch (kind) {
    case zp3::ErrorKind::kOptimizationFailure:
      return kExitOptimization;
    case zp3::ErrorKind::kBridgeTimeout:
    case zp3::ErrorKind::kProtocolError:
    case zp3::ErrorKind::kBackendError:
      return kExitBridge;
    case zp3::ErrorKind::kInvalidArgument:
    case zp3::ErrorKind::kDegenerateTimestep:
    case zp3::ErrorKind::kIo:
      break;
  }
  return kExitUsage;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"zp3: sparse-view Gaussian splatting reconstruction with diffusion priors"};
  app.require_subcommand(1);

  InitArgs init;
  auto* c_init = app.add_subcommand("init", "coarse fit from observed views");
  add_common(c_init, init.common);
  c_init->add_option("--data", init.data, "dataset directory")->required();
  c_init->add_option("--out", init.out, "output checkpoint (.zp3g)")->required();
  c_init->add_option("--points", init.points, "initial Gaussian count");
  c_init->add_option("--steps", init.steps, "optimization steps");

  SampleArgs smp;
  auto* c_sample = app.add_subcommand("sample", "sample one novel view with fused priors");
  add_common(c_sample, smp.common);
  c_sample->add_option("--checkpoint", smp.checkpoint, "current cloud")->required();
  c_sample->add_option("--data", smp.data, "dataset directory")->required();
  c_sample->add_option("--view", smp.view, "AZIMUTH,ELEVATION in degrees")->required();
  c_sample->add_option("--out", smp.out, "output PNG")->required();

  RefineArgs ref;
  auto* c_refine = app.add_subcommand("refine", "iterative refinement with sampled views");
  add_common(c_refine, ref.common);
  c_refine->add_option("--checkpoint", ref.checkpoint, "coarse cloud")->required();
  c_refine->add_option("--data", ref.data, "dataset directory")->required();
  c_refine->add_option("--out", ref.out, "output directory")->required();
  c_refine->add_option("--eval", ref.eval, "ground-truth views for progress metrics");
  c_refine->add_flag("--resume", ref.resume, "continue after the last batch checkpoint");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "visible/invisible region metrics");
  add_common(c_eval, ev.common);
  c_eval->add_option("--checkpoint", ev.checkpoint, "cloud to evaluate")->required();
  c_eval->add_option("--data", ev.data, "ground-truth dataset")->required();
  c_eval->add_option("--out", ev.out, "CSV report (a .txt table is written next to it)");

  RenderArgs rnd;
  auto* c_render = app.add_subcommand("render", "render an azimuth orbit");
  add_common(c_render, rnd.common);
  c_render->add_option("--checkpoint", rnd.checkpoint, "cloud to render")->required();
  c_render->add_option("--out", rnd.out, "output directory")->required();
  c_render->add_option("--frames", rnd.frames, "frame count")->capture_default_str();
  c_render->add_option("--elevation", rnd.elevation, "degrees")->capture_default_str();
  c_render->add_option("--data", rnd.data, "take camera intrinsics and radius from a dataset");
  c_render->add_option("--width", rnd.width)->capture_default_str();
  c_render->add_option("--height", rnd.height)->capture_default_str();
  c_render->add_option("--radius", rnd.radius)->capture_default_str();
  c_render->add_option("--focal", rnd.focal, "focal length in pixels")->capture_default_str();

  SynthArgs syn;
  auto* c_synth = app.add_subcommand("synth", "write the synthetic toy dataset");
  c_synth->group("");
  c_synth->add_option("--out", syn.out)->required();
  c_synth->add_option("--seed", syn.seed)->capture_default_str();
  c_synth->add_option("--width", syn.width)->capture_default_str();
  c_synth->add_option("--height", syn.height)->capture_default_str();
  c_synth->add_option("--gaussians", syn.gaussians)->capture_default_str();
  c_synth->add_option("--observed-start", syn.observed_start)->capture_default_str();
  c_synth->add_option("--observed-end", syn.observed_end)->capture_default_str();

  bool dump_defaults = false;
  std::string check;
  auto* c_config = app.add_subcommand("config", "inspect configuration");
  c_config->add_flag("--dump-defaults", dump_defaults, "print the default configuration");
  c_config->add_option("--check", check, "validate a configuration file and print it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_init) return cmd_init(init);
    if (*c_sample) return cmd_sample(smp);
    if (*c_refine) return cmd_refine(ref);
    if (*c_eval) return cmd_eval(ev);
    if (*c_render) return cmd_render(rnd);
    if (*c_synth) return cmd_synth(syn);
    if (*c_config) {
      if (!check.empty()) {
        std::fputs(to_json(load_config(check)).c_str(), stdout);
      } else if (dump_defaults) {
        std::fputs(to_json(RunConfig{}).c_str(), stdout);
      } else {
        std::fputs(c_config->help().c_str(), stderr);
        return kExitUsage;
      }
      return kExitOk;
    }
  } catch (const zp3::Error& e) {
    std::fprintf(stderr, "zp3: error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "zp3: error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "zp3: error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("zp3");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace zp3app
