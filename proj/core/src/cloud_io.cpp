// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/cloud_io.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "byte_io.hpp"
#include "zp3/error.hpp"

namespace zp3 {
namespace detail {

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path,
                      const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace detail

std::vector<std::uint8_t> encode_cloud(const GaussianCloud& cloud) {
  detail::ByteWriter w;
  w.magic("ZP3G");
  w.u32(kCloudFormatVersion);
  w.u32(static_cast<std::uint32_t>(cloud.size()));
  for (const auto& g : cloud.gaussians) {
    for (double v : g.params()) w.f32(static_cast<float>(v));
  }
  return w.take();
}

GaussianCloud decode_cloud(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r(bytes.data(), bytes.size());
  if (!r.magic("ZP3G")) throw ProtocolError("not a ZP3G cloud file");
  const std::uint32_t version = r.u32();
  if (version != kCloudFormatVersion) {
    throw ProtocolError("unsupported cloud format version " +
                        std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  r.need(static_cast<std::size_t>(count) * kGaussianParams * 4);
  GaussianCloud cloud;
  cloud.gaussians.resize(count);
  for (auto& g : cloud.gaussians) {
    ParamVector p;
    for (double& v : p) v = r.f32();
    g.set_params(p);
  }
  if (r.remaining() != 0) throw ProtocolError("trailing bytes in cloud file");
  return cloud;
}

void write_cloud(const std::string& path, const GaussianCloud& cloud) {
  detail::write_file_bytes(path, encode_cloud(cloud));
}

GaussianCloud read_cloud(const std::string& path) {
  return decode_cloud(detail::read_file_bytes(path));
}

void export_ply(const std::string& path, const GaussianCloud& cloud) {
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\nelement vertex "
         << cloud.size() << "\n";
  for (const char* name : {"x", "y", "z", "nx", "ny", "nz"}) {
    header << "property float " << name << "\n";
  }
  for (int c = 0; c < 3; ++c) header << "property float f_dc_" << c << "\n";
  for (int i = 0; i < (kShCoeffs - 1) * 3; ++i) {
    header << "property float f_rest_" << i << "\n";
  }
  header << "property float opacity\n";
  for (int i = 0; i < 3; ++i) header << "property float scale_" << i << "\n";
  for (int i = 0; i < 4; ++i) header << "property float rot_" << i << "\n";
  header << "end_header\n";

  detail::ByteWriter w;
  const std::string h = header.str();
  w.bytes(h.data(), h.size());
  for (const auto& g : cloud.gaussians) {
    for (int k = 0; k < 3; ++k) w.f32(static_cast<float>(g.position[k]));
    for (int k = 0; k < 3; ++k) w.f32(0.0f);
    for (int c = 0; c < 3; ++c) w.f32(static_cast<float>(g.sh[0][c]));
    for (int c = 0; c < 3; ++c) {
      for (int k = 1; k < kShCoeffs; ++k) w.f32(static_cast<float>(g.sh[k][c]));
    }
    w.f32(static_cast<float>(g.opacity_logit));
    for (int k = 0; k < 3; ++k) w.f32(static_cast<float>(g.log_scale[k]));
    for (int k = 0; k < 4; ++k) w.f32(static_cast<float>(g.rotation[k]));
  }
  detail::write_file_bytes(path, w.take());
}

}  // namespace zp3
