// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zp3/error.hpp"

namespace zp3 {

const char* to_string(ScheduleKind kind) {
  return kind == ScheduleKind::kCosine ? "cosine" : "linear-beta";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "linear-beta" || name == "linear") return ScheduleKind::kLinearBeta;
  if (name == "cosine") return ScheduleKind::kCosine;
  throw InvalidArgument("unknown schedule kind '" + name + "'");
}

double NoiseSchedule::at(int t) const {
  if (t < 0 || t >= steps) {
    throw InvalidArgument("timestep " + std::to_string(t) +
                          " outside schedule of " + std::to_string(steps));
  }
  return alpha_bar[static_cast<std::size_t>(t)];
}

NoiseSchedule make_schedule(int steps, ScheduleKind kind) {
  if (steps < 2) throw InvalidArgument("schedule needs at least 2 steps");
  NoiseSchedule s;
  s.steps = steps;
  s.kind = kind;
  s.alpha_bar.resize(static_cast<std::size_t>(steps));
  if (kind == ScheduleKind::kLinearBeta) {
    constexpr int kVirtual = 1000;
    std::vector<double> log_abar(kVirtual);
    double acc = 0.0;
    for (int i = 0; i < kVirtual; ++i) {
      const double beta = 1e-4 + (2e-2 - 1e-4) * i / (kVirtual - 1);
      acc += std::log1p(-beta);
      log_abar[i] = acc;
    }
    for (int t = 0; t < steps; ++t) {
      const double u = static_cast<double>(t) * (kVirtual - 1) / (steps - 1);
      const int lo = std::min(static_cast<int>(std::floor(u)), kVirtual - 1);
      const int hi = std::min(lo + 1, kVirtual - 1);
      const double f = u - lo;
      s.alpha_bar[t] = std::exp((1.0 - f) * log_abar[lo] + f * log_abar[hi]);
    }
  } else {
    constexpr double kOffset = 0.008;
    for (int t = 0; t < steps; ++t) {
      const double phase = (static_cast<double>(t) / steps + kOffset) /
                           (1.0 + kOffset) * std::numbers::pi / 2.0;
      const double c = std::cos(phase);
      s.alpha_bar[t] = c * c;
    }
  }
  return s;
}

void validate(const FusionWeights& w) {
  if (!(w.sigma > 0.0)) throw InvalidArgument("fusion sigma must be > 0");
  if (!(w.eta > 0.0)) throw InvalidArgument("fusion eta must be > 0");
}

WeightPair schedule_weights(double t, const FusionWeights& w) {
  validate(w);
  WeightPair out;
  out.lf = (std::tanh(-(t - w.tau) / w.sigma) + 1.0) / 2.0;
  out.hf = (1.0 - out.lf) / w.eta;
  return out;
}

Image lf_noise_from_render(const Image& x_t, const Image& x_lf, int t,
                           const NoiseSchedule& sched) {
  require_same_shape(x_t, x_lf, "lf_noise_from_render");
  const double abar = sched.at(t);
  if (abar >= 1.0) {
    throw DegenerateTimestep("alpha_bar == 1 at t=" + std::to_string(t));
  }
  const double a = std::sqrt(abar);
  const double inv = 1.0 / std::sqrt(1.0 - abar);
  Image out(x_t.width(), x_t.height(), x_t.channels(), Domain::kSampling);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (x_t[i] - a * x_lf[i]) * inv;
  }
  return out;
}

Image fuse_mvd(std::span<const ViewPrediction> predictions, bool normalize) {
  if (predictions.empty()) {
    throw InvalidArgument("fuse_mvd needs at least one prediction");
  }
  double total = 0.0;
  for (const auto& p : predictions) {
    if (!(p.weight > 0.0)) {
      throw InvalidArgument("view prediction weights must be > 0");
    }
    require_same_shape(p.noise, predictions.front().noise, "fuse_mvd");
    total += p.weight;
  }
  const Image& first = predictions.front().noise;
  Image out(first.width(), first.height(), first.channels(), Domain::kSampling);
  for (const auto& p : predictions) {
    const double w = normalize ? p.weight / total : p.weight;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * p.noise[i];
  }
  return out;
}

Image fuse_noise(const Image& eps_mvd, const Image& eps_hf,
                 const Image& eps_lf, const WeightPair& weights) {
  require_same_shape(eps_mvd, eps_hf, "fuse_noise (hf)");
  require_same_shape(eps_mvd, eps_lf, "fuse_noise (lf)");
  Image out(eps_mvd.width(), eps_mvd.height(), eps_mvd.channels(),
            Domain::kSampling);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = eps_mvd[i] + weights.hf * eps_hf[i] + weights.lf * eps_lf[i];
  }
  return out;
}

Image fuse_noise(const Image& eps_mvd, const Image& eps_hf,
                 const Image& eps_lf, double t, const FusionWeights& w) {
  return fuse_noise(eps_mvd, eps_hf, eps_lf, schedule_weights(t, w));
}

Image ddim_step(const Image& x_t, const Image& eps_t, int t,
                const NoiseSchedule& sched) {
  if (t < 1) throw InvalidArgument("ddim_step needs t >= 1");
  require_same_shape(x_t, eps_t, "ddim_step");
  const double abar = sched.at(t);
  const double abar_prev = sched.at(t - 1);
  if (abar >= 1.0) {
    throw DegenerateTimestep("alpha_bar == 1 at t=" + std::to_string(t));
  }
  const double coeff =
      (std::sqrt(abar_prev) - std::sqrt(abar)) / std::sqrt(1.0 - abar);
  Image out(x_t.width(), x_t.height(), x_t.channels(), Domain::kSampling);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = x_t[i] + coeff * eps_t[i];
  }
  return out;
}

Image ddim_step_canonical(const Image& x_t, const Image& eps_t, int t,
                          const NoiseSchedule& sched, double stochasticity,
                          double* noise_scale) {
  if (t < 1) throw InvalidArgument("ddim_step needs t >= 1");
  require_same_shape(x_t, eps_t, "ddim_step");
  const double abar = sched.at(t);
  const double abar_prev = sched.at(t - 1);
  if (abar >= 1.0) {
    throw DegenerateTimestep("alpha_bar == 1 at t=" + std::to_string(t));
  }
  const double sigma =
      stochasticity * std::sqrt((1.0 - abar_prev) / (1.0 - abar)) *
      std::sqrt(std::max(0.0, 1.0 - abar / abar_prev));
  const double a = std::sqrt(abar);
  const double s = std::sqrt(1.0 - abar);
  const double a_prev = std::sqrt(abar_prev);
  const double dir = std::sqrt(std::max(0.0, 1.0 - abar_prev - sigma * sigma));
  Image out(x_t.width(), x_t.height(), x_t.channels(), Domain::kSampling);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x0 = (x_t[i] - s * eps_t[i]) / a;
    out[i] = a_prev * x0 + dir * eps_t[i];
  }
  if (noise_scale) *noise_scale = sigma;
  return out;
}

std::vector<double> channel_variance(const Image& image) {
  const int c_count = image.channels();
  const std::size_t n = image.pixel_count();
  std::vector<double> var(static_cast<std::size_t>(c_count), 0.0);
  if (n == 0) return var;
  for (int c = 0; c < c_count; ++c) {
    double mean = 0.0;
    for (std::size_t p = 0; p < n; ++p) mean += image[p * c_count + c];
    mean /= static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double d = image[p * c_count + c] - mean;
      acc += d * d;
    }
    var[c] = acc / static_cast<double>(n);
  }
  return var;
}

VarianceCompensation variance_compensate(const Image& x_orig,
                                         const Image& x_avg,
                                         const Image& noise_term,
                                         double delta) {
  require_same_shape(x_orig, x_avg, "variance_compensate");
  require_same_shape(x_orig, noise_term, "variance_compensate");
  if (!(delta > 0.0)) throw InvalidArgument("variance delta must be > 0");
  const auto v_orig = channel_variance(x_orig);
  const auto v_avg = channel_variance(x_avg);
  const auto v_noise = channel_variance(noise_term);
  VarianceCompensation out;
  const int channels = x_orig.channels();
  out.lambda.resize(static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) {
    const double numerator = std::max(0.0, v_orig[c] - v_avg[c] + v_noise[c]);
    out.lambda[c] = std::sqrt(numerator / (v_noise[c] + delta));
  }
  out.adjusted = x_avg;
  for (std::size_t p = 0; p < x_avg.pixel_count(); ++p) {
    for (int c = 0; c < channels; ++c) {
      const std::size_t i = p * channels + c;
      out.adjusted[i] = x_avg[i] - noise_term[i] + out.lambda[c] * noise_term[i];
    }
  }
  return out;
}

}  // namespace zp3
