// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "zp3/image.hpp"
#include "zp3/render.hpp"

namespace zp3 {

class BridgeClient;
struct Observation;

inline constexpr double kPsnrCap = 99.0;

/// 10 log10(1 / MSE) over the mask (all pixels when null), capped at 99 dB.
double psnr(const Image& a, const Image& b, const Image* mask = nullptr);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Mean local SSIM (Gaussian window, valid region) averaged over channels.
/// With a mask, only window centers inside the mask count; if none do, all
/// valid centers are used.
double ssim(const Image& a, const Image& b, const Image* mask = nullptr,
            const SsimOptions& opts = {});

enum class Region { kVisible, kInvisible };

const char* to_string(Region region);

/// True if `azimuth` lies in [start, end] going counter-clockwise.
bool in_observed_range(double azimuth, double start, double end);

struct MetricRow {
  std::string view_id;
  double azimuth = 0.0;
  Region region = Region::kVisible;
  double psnr = 0.0;
  double ssim = 0.0;
  double perceptual = 0.0;
};

struct MetricAggregate {
  int count = 0;
  double psnr = 0.0;  // NaN when count == 0
  double ssim = 0.0;
  double perceptual = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  MetricAggregate visible;
  MetricAggregate invisible;
  MetricAggregate total;
  std::string perceptual_label = "multiscale-l1";
};

/// Fills the aggregates from the rows (arithmetic means).
void aggregate(MetricReport& report);

struct EvalOptions {
  bool full_frame = false;
  Vec3 background = Vec3::Ones();
  RenderOptions render;
  /// When set, the perceptual column is LPIPS from this backend.
  BridgeClient* lpips = nullptr;
};

/// Renders every ground-truth view, scores it over its mask and splits
/// rows by the observed azimuth range.
MetricReport evaluate(const GaussianCloud& cloud,
                      const std::vector<Observation>& ground_truth,
                      double range_start, double range_end,
                      const EvalOptions& opts = {});

/// CSV with one row per view followed by visible, invisible and total rows.
std::string report_csv(const MetricReport& report);
/// Aligned plain-text table of the same content.
std::string report_table(const MetricReport& report);

}  // namespace zp3
