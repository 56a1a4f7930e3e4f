/* Copyright 2026 The VDF Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "../binary_io.hpp"
#include "vdf/error.hpp"
#include "vdf/models.hpp"

namespace vdf {

std::vector<std::uint8_t> encode_model(const SegModel& model) {
  detail::ByteWriter w;
  w.magic("VDFM");
  w.u16(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.layers().size()));
  for (const ConvLayer& l : model.layers()) {
    w.u32(static_cast<std::uint32_t>(l.geometry.kernel_h));
    w.u32(static_cast<std::uint32_t>(l.geometry.kernel_w));
    w.u32(static_cast<std::uint32_t>(l.in_channels()));
    w.u32(static_cast<std::uint32_t>(l.out_channels()));
    w.u32(static_cast<std::uint32_t>(l.geometry.stride));
    w.u32(static_cast<std::uint32_t>(l.geometry.pad));
    for (double v : l.weight.values()) w.f64(v);
    for (double v : l.bias.values()) w.f64(v);
  }
  return w.take();
}

SegModel decode_model(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r(bytes, "VDFM model");
  r.expect_magic("VDFM");
  const std::uint16_t version = r.u16();
  if (version != kModelFormatVersion) {
    throw IoError("VDFM model: unsupported version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32();
  if (count == 0 || count > 64) throw IoError("VDFM model: implausible layer count");
  std::vector<ConvLayer> layers;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t kh = r.u32(), kw = r.u32(), cin = r.u32(), cout = r.u32();
    const std::size_t stride = r.u32(), pad = r.u32();
    if (kh * kw * cin * cout == 0 || stride == 0) throw IoError("VDFM model: degenerate layer");
    ConvLayer l{Tensor(Shape{kh * kw, cin, cout}), Tensor(Shape{1, 1, cout}),
                ad::ConvGeometry{kh, kw, stride, pad}};
    for (double& v : l.weight.values()) v = r.f64();
    for (double& v : l.bias.values()) v = r.f64();
    layers.push_back(std::move(l));
  }
  r.expect_end();
  return SegModel(std::move(layers));
}

void save_model(const std::filesystem::path& path, const SegModel& model) {
  detail::write_file(path, encode_model(model));
}

SegModel load_model(const std::filesystem::path& path) {
  return decode_model(detail::read_file(path));
}

}  // namespace vdf
