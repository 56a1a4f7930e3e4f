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

#include "vdf/robustness.hpp"

#include <jpeglib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <csetjmp>
#include <sstream>

#include "vdf/error.hpp"
#include "vdf/metrics.hpp"

namespace vdf {
namespace {

struct JpegErrorManager {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void on_jpeg_error(j_common_ptr info) {
  auto* err = reinterpret_cast<JpegErrorManager*>(info->err);
  (*info->err->format_message)(info, err->message);
  std::longjmp(err->jump, 1);
}

// Shortest text that parses back to the same double.
std::string format_number(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

void PurificationSpec::validate() const {
  if (kind == Kind::kJpeg && (quality < 1 || quality > 100)) {
    throw DomainError("jpeg quality must lie in [1, 100]");
  }
  if (kind == Kind::kResize && (!(scale > 0.0) || !std::isfinite(scale))) {
    throw DomainError("resize scale must be positive");
  }
}

std::string PurificationSpec::label() const {
  if (kind == Kind::kJpeg) return "jpeg:" + std::to_string(quality);
  return "resize:" + format_number(scale);
}

PurificationSpec PurificationSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("purification spec must be kind:value, got '" + text + "'");
  const std::string kind = text.substr(0, colon), value = text.substr(colon + 1);
  PurificationSpec spec;
  std::size_t used = 0;
  try {
    if (kind == "jpeg") {
      spec.kind = Kind::kJpeg;
      spec.quality = std::stoi(value, &used);
    } else if (kind == "resize") {
      spec.kind = Kind::kResize;
      spec.scale = std::stod(value, &used);
    } else {
      throw DomainError("unknown purification kind '" + kind + "'");
    }
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const DomainError*>(&e) != nullptr) throw;
    throw DomainError("bad purification value in '" + text + "'");
  }
  if (used != value.size()) throw DomainError("bad purification value in '" + text + "'");
  spec.validate();
  return spec;
}

std::vector<std::uint8_t> jpeg_encode(const Tensor& x, int quality) {
  if (x.channels() != 3) throw ShapeError("jpeg needs 3 channels");
  if (quality < 1 || quality > 100) throw DomainError("jpeg quality must lie in [1, 100]");
  std::vector<JSAMPLE> rgb(x.size());
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    rgb[i] = static_cast<JSAMPLE>(std::floor(std::clamp(x[i], 0.0, 1.0) * 255.0 + 0.5));
  }
  jpeg_compress_struct cinfo{};
  JpegErrorManager err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = on_jpeg_error;
  unsigned char* out = nullptr;
  unsigned long out_size = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    std::free(out);
    throw IoError(std::string("jpeg encode: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &out, &out_size);
  cinfo.image_width = static_cast<JDIMENSION>(x.width());
  cinfo.image_height = static_cast<JDIMENSION>(x.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  // 4:2:0: luma 2x2, chroma 1x1.
  cinfo.comp_info[0].h_samp_factor = 2;
  cinfo.comp_info[0].v_samp_factor = 2;
  for (int c = 1; c < 3; ++c) {
    cinfo.comp_info[c].h_samp_factor = 1;
    cinfo.comp_info[c].v_samp_factor = 1;
  }
  cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_compress(&cinfo, TRUE);
  const std::size_t stride = x.width() * 3;
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = rgb.data() + cinfo.next_scanline * stride;
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::vector<std::uint8_t> bytes(out, out + out_size);
  std::free(out);
  return bytes;
}

Tensor jpeg_roundtrip(const Tensor& x, int quality) {
  std::vector<std::uint8_t> bytes = jpeg_encode(x, quality);
  jpeg_decompress_struct dinfo{};
  JpegErrorManager err{};
  dinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = on_jpeg_error;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&dinfo);
    throw IoError(std::string("jpeg decode: ") + err.message);
  }
  jpeg_create_decompress(&dinfo);
  jpeg_mem_src(&dinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&dinfo, TRUE);
  dinfo.out_color_space = JCS_RGB;
  dinfo.dct_method = JDCT_ISLOW;
  jpeg_start_decompress(&dinfo);
  if (dinfo.output_width != x.width() || dinfo.output_height != x.height() ||
      dinfo.output_components != 3) {
    jpeg_destroy_decompress(&dinfo);
    throw IoError("jpeg decode: unexpected output geometry");
  }
  Tensor out(x.shape());
  std::vector<JSAMPLE> row(x.width() * 3);
  while (dinfo.output_scanline < dinfo.output_height) {
    const std::size_t y = dinfo.output_scanline;
    JSAMPROW ptr = row.data();
    jpeg_read_scanlines(&dinfo, &ptr, 1);
    for (std::size_t i = 0; i < row.size(); ++i) out[y * row.size() + i] = row[i] / 255.0;
  }
  jpeg_finish_decompress(&dinfo);
  jpeg_destroy_decompress(&dinfo);
  return out;
}

Tensor resize_roundtrip(const Tensor& x, double scale) {
  const std::size_t h = x.height(), w = x.width();
  const std::size_t oh = scaled_extent(h, scale), ow = scaled_extent(w, scale);
  const double sy = static_cast<double>(oh) / h, sx = static_cast<double>(ow) / w;
  const Tensor down = ad::resize_bilinear_forward(x, oh, ow, sy, sx);
  return ad::resize_bilinear_forward(down, h, w, 1.0 / sy, 1.0 / sx);
}

Tensor purify(const Tensor& x, const PurificationSpec& spec) {
  spec.validate();
  return spec.kind == PurificationSpec::Kind::kJpeg ? jpeg_roundtrip(x, spec.quality)
                                                   : resize_roundtrip(x, spec.scale);
}

double RobustnessReport::mean_post_rate(std::size_t section, double scale) const {
  const auto it = std::find(scales.begin(), scales.end(), scale);
  if (it == scales.end()) throw DomainError("scale not evaluated");
  const std::size_t k = static_cast<std::size_t>(it - scales.begin());
  const PurificationSection& s = sections.at(section);
  if (s.frames.empty()) throw DomainError("no frames in section");
  double sum = 0.0;
  for (const PurifiedFrame& f : s.frames) sum += f.rates[k];
  return sum / static_cast<double>(s.frames.size());
}

RobustnessReport evaluate_robustness(const std::vector<Tensor>& protected_frames,
                                     const std::vector<Tensor>& clean_frames,
                                     const std::vector<Mask>& masks, const PixelClassifier& model,
                                     const std::vector<PurificationSpec>& specs,
                                     const LossConfig& cfg) {
  if (protected_frames.size() != clean_frames.size() || masks.size() != clean_frames.size()) {
    throw ShapeError("protected, clean and mask counts differ");
  }
  RobustnessReport report;
  report.scales = cfg.scales;
  for (std::size_t i = 0; i < protected_frames.size(); ++i) {
    require_same_shape(protected_frames[i], clean_frames[i], "robustness");
    report.pre_rates.push_back(misclassification_rates(protected_frames[i], masks[i], model, cfg).rates);
  }
  for (const PurificationSpec& spec : specs) {
    PurificationSection section{spec, {}};
    for (std::size_t i = 0; i < protected_frames.size(); ++i) {
      const Tensor purified = purify(protected_frames[i], spec);
      PurifiedFrame f;
      f.rates = misclassification_rates(purified, masks[i], model, cfg).rates;
      for (std::size_t k = 0; k < f.rates.size(); ++k) {
        const double pre = report.pre_rates[i][k];
        f.retention.push_back(pre > 0.0 ? std::optional<double>(f.rates[k] / pre) : std::nullopt);
      }
      f.psnr = psnr(purified, clean_frames[i]);
      section.frames.push_back(std::move(f));
    }
    report.sections.push_back(std::move(section));
  }
  return report;
}

std::string robustness_csv(const RobustnessReport& report) {
  std::ostringstream os;
  os << "frame,spec,scale_idx,rate_pre,rate_post,retention,psnr\n";
  for (const PurificationSection& s : report.sections) {
    for (std::size_t i = 0; i < s.frames.size(); ++i) {
      const PurifiedFrame& f = s.frames[i];
      for (std::size_t k = 0; k < f.rates.size(); ++k) {
        os << i << ',' << s.spec.label() << ',' << k << ',' << format_number(report.pre_rates[i][k]) << ','
           << format_number(f.rates[k]) << ','
           << (f.retention[k] ? format_number(*f.retention[k]) : std::string()) << ','
           << format_number(f.psnr) << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace vdf
