// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <sstream>

#include "zp3/metrics.hpp"

namespace zp3 {
namespace {

std::string fmt(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

struct Line {
  std::string view, azimuth, region, psnr, ssim, perceptual;
};

std::vector<Line> lines(const MetricReport& report) {
  std::vector<Line> out;
  for (const auto& r : report.rows) {
    out.push_back({r.view_id, fmt(r.azimuth, 2), to_string(r.region),
                   fmt(r.psnr, 4), fmt(r.ssim, 6), fmt(r.perceptual, 6)});
  }
  const std::pair<const char*, const MetricAggregate*> aggs[] = {
      {"visible", &report.visible},
      {"invisible", &report.invisible},
      {"total", &report.total}};
  for (const auto& [name, agg] : aggs) {
    out.push_back({name, "", name, fmt(agg->psnr, 4), fmt(agg->ssim, 6),
                   fmt(agg->perceptual, 6)});
  }
  return out;
}

}  // namespace

std::string report_csv(const MetricReport& report) {
  std::ostringstream os;
  os << "view,azimuth,region,psnr,ssim," << report.perceptual_label << "\n";
  for (const auto& l : lines(report)) {
    os << l.view << "," << l.azimuth << "," << l.region << "," << l.psnr << ","
       << l.ssim << "," << l.perceptual << "\n";
  }
  return os.str();
}

std::string report_table(const MetricReport& report) {
  std::vector<Line> rows = lines(report);
  rows.insert(rows.begin(), {"view", "azimuth", "region", "psnr", "ssim",
                             report.perceptual_label});
  std::size_t width[6] = {};
  for (const auto& l : rows) {
    const std::string* cells[] = {&l.view, &l.azimuth, &l.region,
                                  &l.psnr, &l.ssim, &l.perceptual};
    for (int i = 0; i < 6; ++i) width[i] = std::max(width[i], cells[i]->size());
  }
  std::ostringstream os;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Line& l = rows[r];
    const std::string* cells[] = {&l.view, &l.azimuth, &l.region,
                                  &l.psnr, &l.ssim, &l.perceptual};
    for (int i = 0; i < 6; ++i) {
      os << (i ? "  " : "");
      const std::string& s = *cells[i];
      if (i >= 3 || i == 1) {
        os << std::string(width[i] - s.size(), ' ') << s;
      } else {
        os << s << std::string(width[i] - s.size(), ' ');
      }
    }
    os << "\n";
    if (r == 0 || r == rows.size() - 4) {
      std::size_t total = 10;
      for (auto wd : width) total += wd;
      os << std::string(total, '-') << "\n";
    }
  }
  return os.str();
}

}  // namespace zp3
