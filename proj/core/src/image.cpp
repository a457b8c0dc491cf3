// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/image.hpp"

#include <algorithm>
#include <string>

#include "zp3/error.hpp"

namespace zp3 {

Image::Image(int width, int height, int channels, Domain domain, double fill)
    : width_(width), height_(height), channels_(channels), domain_(domain) {
  if (width < 0 || height < 0 || channels < 0) {
    throw InvalidArgument("image dimensions must be non-negative");
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image to_sampling(const Image& pixel) {
  if (pixel.domain() != Domain::kPixel) {
    throw InvalidArgument("to_sampling expects a pixel-domain image");
  }
  Image out(pixel.width(), pixel.height(), pixel.channels(), Domain::kSampling);
  for (std::size_t i = 0; i < pixel.size(); ++i) out[i] = 2.0 * pixel[i] - 1.0;
  return out;
}

Image to_pixel(const Image& sampling) {
  if (sampling.domain() != Domain::kSampling) {
    throw InvalidArgument("to_pixel expects a sampling-domain image");
  }
  Image out(sampling.width(), sampling.height(), sampling.channels(),
            Domain::kPixel);
  for (std::size_t i = 0; i < sampling.size(); ++i) {
    out[i] = 0.5 * (sampling[i] + 1.0);
  }
  return out;
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw InvalidArgument(std::string(what) + ": shape mismatch (" +
                          std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + "x" +
                          std::to_string(a.channels()) + " vs " +
                          std::to_string(b.width()) + "x" +
                          std::to_string(b.height()) + "x" +
                          std::to_string(b.channels()) + ")");
  }
}

Image clamped(Image image, double lo, double hi) {
  for (double& v : image.values()) v = std::clamp(v, lo, hi);
  return image;
}

}  // namespace zp3
