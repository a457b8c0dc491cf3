// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/metrics.hpp"

#include <cmath>
#include <limits>

#include "zp3/bridge.hpp"
#include "zp3/error.hpp"
#include "zp3/loss.hpp"
#include "zp3/reconstruct.hpp"

namespace zp3 {
namespace {

void check_mask(const Image& a, const Image* mask) {
  if (!mask) return;
  if (mask->width() != a.width() || mask->height() != a.height() ||
      mask->channels() != 1) {
    throw InvalidArgument("metric mask must be H x W x 1 matching the image");
  }
}

// Separable blur with a normalized Gaussian kernel, valid region only.
Image blur_valid(const Image& img, const std::vector<double>& k) {
  const int r = static_cast<int>(k.size()) / 2;
  const int w = img.width(), h = img.height(), ch = img.channels();
  Image tmp(w - 2 * r, h, ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w - 2 * r; ++x) {
      for (int c = 0; c < ch; ++c) {
        double s = 0.0;
        for (int i = 0; i < static_cast<int>(k.size()); ++i) s += k[i] * img.at(x + i, y, c);
        tmp.at(x, y, c) = s;
      }
    }
  }
  Image out(w - 2 * r, h - 2 * r, ch);
  for (int y = 0; y < h - 2 * r; ++y) {
    for (int x = 0; x < w - 2 * r; ++x) {
      for (int c = 0; c < ch; ++c) {
        double s = 0.0;
        for (int i = 0; i < static_cast<int>(k.size()); ++i) s += k[i] * tmp.at(x, y + i, c);
        out.at(x, y, c) = s;
      }
    }
  }
  return out;
}

}  // namespace

double psnr(const Image& a, const Image& b, const Image* mask) {
  require_same_shape(a, b, "psnr");
  check_mask(a, mask);
  const int ch = a.channels();
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t p = 0; p < a.pixel_count(); ++p) {
    const double m = mask ? (*mask)[p] : 1.0;
    if (m == 0.0) continue;
    for (int c = 0; c < ch; ++c) {
      const double d = a[p * ch + c] - b[p * ch + c];
      sum += m * d * d;
    }
    count += m * ch;
  }
  if (count <= 0.0) throw InvalidArgument("psnr: empty mask");
  const double mse = sum / count;
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Image& a, const Image& b, const Image* mask,
            const SsimOptions& opts) {
  require_same_shape(a, b, "ssim");
  check_mask(a, mask);
  if (opts.window < 1 || opts.window % 2 == 0) {
    throw InvalidArgument("ssim window must be odd and positive");
  }
  if (std::min(a.width(), a.height()) < opts.window) {
    throw InvalidArgument("ssim: image smaller than window");
  }
  const int r = opts.window / 2;
  std::vector<double> k(static_cast<std::size_t>(opts.window));
  double ks = 0.0;
  for (int i = 0; i < opts.window; ++i) {
    k[i] = std::exp(-0.5 * (i - r) * (i - r) / (opts.sigma * opts.sigma));
    ks += k[i];
  }
  for (double& v : k) v /= ks;

  const int w = a.width(), h = a.height(), ch = a.channels();
  Image aa(w, h, ch), bb(w, h, ch), ab(w, h, ch);
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const Image mu_a = blur_valid(a, k), mu_b = blur_valid(b, k);
  const Image s_aa = blur_valid(aa, k), s_bb = blur_valid(bb, k),
              s_ab = blur_valid(ab, k);
  const double c1 = (opts.k1) * (opts.k1), c2 = (opts.k2) * (opts.k2);

  auto accumulate = [&](bool use_mask, double& total, double& count) {
    for (int y = 0; y < mu_a.height(); ++y) {
      for (int x = 0; x < mu_a.width(); ++x) {
        if (use_mask && mask->at(x + r, y + r, 0) == 0.0) continue;
        for (int c = 0; c < ch; ++c) {
          const double ma = mu_a.at(x, y, c), mb = mu_b.at(x, y, c);
          const double va = s_aa.at(x, y, c) - ma * ma;
          const double vb = s_bb.at(x, y, c) - mb * mb;
          const double cov = s_ab.at(x, y, c) - ma * mb;
          total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                   ((ma * ma + mb * mb + c1) * (va + vb + c2));
        }
        count += ch;
      }
    }
  };
  double total = 0.0, count = 0.0;
  accumulate(mask != nullptr, total, count);
  if (count == 0.0) accumulate(false, total, count);
  return total / count;
}

const char* to_string(Region region) {
  return region == Region::kVisible ? "visible" : "invisible";
}

bool in_observed_range(double azimuth, double start, double end) {
  const double span = end - start;
  if (span >= 360.0) return true;
  const double offset = normalize_degrees(azimuth - start);
  return offset <= span + 1e-9;
}

void aggregate(MetricReport& report) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  MetricAggregate vis, inv, tot;
  for (const auto& row : report.rows) {
    for (MetricAggregate* agg : {row.region == Region::kVisible ? &vis : &inv, &tot}) {
      agg->count += 1;
      agg->psnr += row.psnr;
      agg->ssim += row.ssim;
      agg->perceptual += row.perceptual;
    }
  }
  for (MetricAggregate* agg : {&vis, &inv, &tot}) {
    if (agg->count == 0) {
      agg->psnr = agg->ssim = agg->perceptual = nan;
      continue;
    }
    agg->psnr /= agg->count;
    agg->ssim /= agg->count;
    agg->perceptual /= agg->count;
  }
  report.visible = vis;
  report.invisible = inv;
  report.total = tot;
}

MetricReport evaluate(const GaussianCloud& cloud,
                      const std::vector<Observation>& ground_truth,
                      double range_start, double range_end,
                      const EvalOptions& opts) {
  if (ground_truth.empty()) throw InvalidArgument("evaluate needs ground-truth views");
  MetricReport report;
  report.perceptual_label = opts.lpips ? "lpips" : "multiscale-l1";
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    const Observation& gt = ground_truth[i];
    validate(gt);
    const int w = gt.image.width(), h = gt.image.height();
    const Image rendered = clamped(
        composite_over(render(cloud, gt.camera, w, h, opts.render), opts.background),
        0.0, 1.0);
    const Image full(w, h, 1, Domain::kPixel, 1.0);
    const Image& mask = opts.full_frame ? full : gt.mask;
    MetricRow row;
    row.view_id = gt.id.empty() ? std::to_string(i) : gt.id;
    row.azimuth = gt.view_spec.azimuth;
    row.region = in_observed_range(row.azimuth, range_start, range_end)
                     ? Region::kVisible
                     : Region::kInvisible;
    row.psnr = psnr(rendered, gt.image, &mask);
    row.ssim = ssim(rendered, gt.image, &mask);
    if (opts.lpips) {
      row.perceptual = bridge_perceptual(*opts.lpips, rendered, gt.image, mask).loss;
    } else {
      row.perceptual = multiscale_l1(rendered, gt.image, mask).value;
    }
    report.rows.push_back(row);
  }
  aggregate(report);
  return report;
}

}  // namespace zp3
