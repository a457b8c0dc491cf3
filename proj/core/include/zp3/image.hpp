// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace zp3 {

/// Value domain of an image buffer. Pixel images live in [0, 1]; the
/// diffusion sampler works in [-1, 1]. Conversion is always explicit.
enum class Domain { kPixel, kSampling };

/// Interleaved row-major H x W x C buffer of doubles.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, Domain domain = Domain::kPixel,
        double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  Domain domain() const { return domain_; }
  std::size_t size() const { return data_.size(); }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const { return data_.empty(); }

  double& at(int x, int y, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int x, int y, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  /// Relabels the buffer without touching values. Used by deserializers
  /// that know the domain out of band.
  void set_domain(Domain domain) { domain_ = domain; }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  Domain domain_ = Domain::kPixel;
  std::vector<double> data_;
};

/// x -> 2x - 1. Throws InvalidArgument if the image is not in pixel domain.
Image to_sampling(const Image& pixel);
/// x -> (x + 1) / 2. Throws InvalidArgument if not in sampling domain.
Image to_pixel(const Image& sampling);

/// Throws InvalidArgument naming `what` when shapes differ.
void require_same_shape(const Image& a, const Image& b, const char* what);

/// Clamp every value into [lo, hi].
Image clamped(Image image, double lo, double hi);

}  // namespace zp3
