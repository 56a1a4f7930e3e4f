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

#include "vdf/report.hpp"

#include <cmath>

#include "json.hpp"
#include "vdf/error.hpp"

namespace vdf {
namespace {

using json = nlohmann::ordered_json;

// JSON has no infinities; +inf PSNR is written as the string "inf".
json real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

json reals(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

}  // namespace

std::string protect_report_json(const RunConfig& cfg, const Shape& frame, const PipelineReport& report) {
  json doc;
  json c;
  for (const auto& [k, v] : cfg.echo()) {
    // Where the run is written does not affect its content.
    if (k != "output") c[k] = v;
  }
  doc["config"] = c;
  doc["resolved"] = {{"eta_delta", cfg.attack.eta_delta_for(frame)},
                     {"sigma_random", cfg.attack.sigma_random_for(frame)},
                     {"frame_shape", {frame.h, frame.w, frame.c}}};
  doc["derived_masks"] = report.derived_masks;
  json frames = json::array();
  for (const FrameEntry& e : report.frames) {
    json f;
    f["index"] = e.index;
    f["iterations_used"] = e.attack.iterations_used;
    f["stop_reason"] = to_string(e.attack.stop_reason);
    f["inherited"] = e.inherited;
    f["ssim_to_previous"] = e.ssim_to_previous ? real(*e.ssim_to_previous) : json(nullptr);
    f["psnr"] = real(e.psnr);
    f["ssim"] = real(e.ssim);
    f["max_deviation"] = real(e.max_deviation);
    json degenerate = json::array();
    for (bool d : e.attack.loss.degenerate) degenerate.push_back(d);
    f["loss"] = {{"seg_terms", reals(e.attack.loss.seg_terms)},
                 {"perceptual", real(e.attack.loss.perceptual)},
                 {"total", real(e.attack.loss.total)},
                 {"rates", reals(e.attack.rates)},
                 {"degenerate_scales", degenerate}};
    frames.push_back(f);
  }
  doc["frames"] = frames;
  doc["aggregate"] = {{"frames", report.frames.size()},
                      {"mean_iterations", real(report.mean_iterations)},
                      {"mean_psnr", real(report.mean_psnr)},
                      {"mean_ssim", real(report.mean_ssim)}};
  return doc.dump(2) + "\n";
}

std::string timing_json(const PipelineReport& report) {
  json doc;
  json frames = json::array();
  for (const FrameEntry& e : report.frames) {
    frames.push_back({{"index", e.index}, {"wall_time", e.attack.wall_time}});
  }
  doc["frames"] = frames;
  doc["total_wall_time"] = report.wall_time;
  return doc.dump(2) + "\n";
}

std::string append_robustness(const std::string& report_json, const RobustnessReport& report) {
  json doc = report_json.empty() ? json::object() : json::parse(report_json, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw IoError("report.json is not a JSON object");
  json r;
  r["scales"] = reals(report.scales);
  json pre = json::array();
  for (const auto& v : report.pre_rates) pre.push_back(reals(v));
  r["pre_rates"] = pre;
  json sections = json::array();
  for (const PurificationSection& s : report.sections) {
    json frames = json::array();
    for (const PurifiedFrame& f : s.frames) {
      json retention = json::array();
      for (const auto& v : f.retention) retention.push_back(v ? real(*v) : json(nullptr));
      frames.push_back({{"rates", reals(f.rates)}, {"retention", retention}, {"psnr", real(f.psnr)}});
    }
    sections.push_back({{"spec", s.spec.label()}, {"frames", frames}});
  }
  r["purifications"] = sections;
  doc["robustness"] = r;
  return doc.dump(2) + "\n";
}

}  // namespace vdf
