// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/loss.hpp"

#include <cmath>
#include <vector>

#include "zp3/bridge.hpp"
#include "zp3/error.hpp"

namespace zp3 {
namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_inputs(const Image& render, const Image& target, const Image& mask) {
  require_same_shape(render, target, "loss: render vs target");
  if (mask.width() != render.width() || mask.height() != render.height() ||
      mask.channels() != 1) {
    throw InvalidArgument("loss: mask must be H x W x 1 matching the render");
  }
}

double mask_sum(const Image& mask) {
  double s = 0.0;
  for (double v : mask.values()) s += v;
  return s;
}

}  // namespace

const char* to_string(PerceptualKind kind) {
  switch (kind) {
    case PerceptualKind::kMultiscaleL1:
      return "multiscale-l1";
    case PerceptualKind::kBridgeLpips:
      return "bridge-lpips";
    case PerceptualKind::kNone:
      return "none";
  }
  return "none";
}

PerceptualKind perceptual_kind_from_string(const std::string& name) {
  if (name == "multiscale-l1") return PerceptualKind::kMultiscaleL1;
  if (name == "bridge-lpips") return PerceptualKind::kBridgeLpips;
  if (name == "none") return PerceptualKind::kNone;
  throw InvalidArgument("unknown perceptual kind '" + name + "'");
}

Image avg_pool2(const Image& image) {
  const int w = image.width() / 2, h = image.height() / 2;
  Image out(w, h, image.channels(), image.domain());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < image.channels(); ++c) {
        out.at(x, y, c) =
            0.25 * (image.at(2 * x, 2 * y, c) + image.at(2 * x + 1, 2 * y, c) +
                    image.at(2 * x, 2 * y + 1, c) +
                    image.at(2 * x + 1, 2 * y + 1, c));
      }
    }
  }
  return out;
}

LossResult masked_l1(const Image& render, const Image& target,
                     const Image& mask) {
  check_inputs(render, target, mask);
  const double denom = mask_sum(mask) * render.channels();
  LossResult out;
  out.grad = Image(render.width(), render.height(), render.channels(),
                   render.domain());
  if (denom <= 0.0) return out;
  const int ch = render.channels();
  for (std::size_t p = 0; p < mask.size(); ++p) {
    const double m = mask[p];
    if (m == 0.0) continue;
    for (int c = 0; c < ch; ++c) {
      const std::size_t i = p * ch + c;
      const double d = render[i] - target[i];
      out.value += m * std::abs(d);
      out.grad[i] = m * sign(d) / denom;
    }
  }
  out.value /= denom;
  return out;
}

LossResult multiscale_l1(const Image& render, const Image& target,
                         const Image& mask, int levels) {
  check_inputs(render, target, mask);
  if (levels < 1) throw InvalidArgument("multiscale_l1 needs >= 1 level");
  const int ch = render.channels();
  // Masked residual at full resolution.
  Image residual(render.width(), render.height(), ch, render.domain());
  for (std::size_t p = 0; p < mask.size(); ++p) {
    for (int c = 0; c < ch; ++c) {
      const std::size_t i = p * ch + c;
      residual[i] = mask[p] * (render[i] - target[i]);
    }
  }
  std::vector<Image> res_pyr{residual};
  std::vector<Image> mask_pyr{mask};
  for (int l = 1; l < levels; ++l) {
    if (res_pyr.back().width() < 2 || res_pyr.back().height() < 2) break;
    res_pyr.push_back(avg_pool2(res_pyr.back()));
    mask_pyr.push_back(avg_pool2(mask_pyr.back()));
  }
  const double n_levels = static_cast<double>(res_pyr.size());

  LossResult out;
  out.grad = Image(render.width(), render.height(), ch, render.domain());
  // d loss / d residual at full resolution, accumulated level by level.
  Image g_res(render.width(), render.height(), ch, render.domain());
  for (std::size_t l = 0; l < res_pyr.size(); ++l) {
    const double denom = mask_sum(mask_pyr[l]) * ch;
    if (denom <= 0.0) continue;
    const Image& r = res_pyr[l];
    double level_sum = 0.0;
    for (double v : r.values()) level_sum += std::abs(v);
    out.value += level_sum / denom / n_levels;
    const int factor = 1 << l;
    const double share = 1.0 / (factor * factor);
    for (int y = 0; y < r.height(); ++y) {
      for (int x = 0; x < r.width(); ++x) {
        for (int c = 0; c < ch; ++c) {
          const double g = sign(r.at(x, y, c)) / denom / n_levels * share;
          if (g == 0.0) continue;
          for (int dy = 0; dy < factor; ++dy) {
            for (int dx = 0; dx < factor; ++dx) {
              g_res.at(x * factor + dx, y * factor + dy, c) += g;
            }
          }
        }
      }
    }
  }
  for (std::size_t p = 0; p < mask.size(); ++p) {
    for (int c = 0; c < ch; ++c) {
      const std::size_t i = p * ch + c;
      out.grad[i] = mask[p] * g_res[i];
    }
  }
  return out;
}

LossResult composite_loss(const Image& render, const Image& target,
                          const Image& mask, double lambda,
                          PerceptualKind kind, BridgeClient* bridge) {
  if (!(lambda >= 0.0)) throw InvalidArgument("loss lambda must be >= 0");
  LossResult out = masked_l1(render, target, mask);
  if (lambda == 0.0 || kind == PerceptualKind::kNone) return out;
  LossResult perc;
  if (kind == PerceptualKind::kMultiscaleL1) {
    perc = multiscale_l1(render, target, mask);
  } else {
    if (!bridge) {
      throw InvalidArgument("bridge-lpips loss needs a configured bridge");
    }
    const PerceptualResult r = bridge_perceptual(*bridge, render, target, mask);
    perc.value = r.loss;
    perc.grad = r.grad;
  }
  out.value += lambda * perc.value;
  for (std::size_t i = 0; i < out.grad.size(); ++i) {
    out.grad[i] += lambda * perc.grad[i];
  }
  return out;
}

}  // namespace zp3
