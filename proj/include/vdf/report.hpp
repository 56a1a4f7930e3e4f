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

#pragma once

// JSON documents: report.json (deterministic) and timing.json (wall times).

#include <string>

#include "vdf/config.hpp"
#include "vdf/pipeline.hpp"
#include "vdf/robustness.hpp"

namespace vdf {

/// report.json for a protect run: config echo, resolved step sizes, one
/// entry per frame and aggregates. Wall times are excluded.
std::string protect_report_json(const RunConfig& cfg, const Shape& frame, const PipelineReport& report);

/// Per-frame and total wall times.
std::string timing_json(const PipelineReport& report);

/// Adds (or replaces) the "robustness" section of an existing report.json
/// document; an empty input starts a fresh document.
std::string append_robustness(const std::string& report_json, const RobustnessReport& report);

}  // namespace vdf
