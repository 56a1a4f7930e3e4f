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

// Flat "key = value" run configuration with total defaults.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdf/attack.hpp"
#include "vdf/robustness.hpp"

namespace vdf {

/// Malformed configuration text or an unknown key (a usage error).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  AttackConfig attack;
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path model;
  std::vector<PurificationSpec> purify;

  /// Sets one key from its text form. Throws ConfigError.
  void set(const std::string& key, const std::string& value);
  /// Ordered (key, text value) pairs of every field; parse(echo()) is the
  /// identity.
  std::vector<std::pair<std::string, std::string>> echo() const;
  void validate() const;
};

/// Lines of "key = value"; '#' starts a comment; blank lines ignored.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Applies VDF_SEED (master seed) when set.
void apply_environment(RunConfig& cfg);

/// --ablate KEY=VAL for noise_domain, spatial_mask, perceptual, inherit,
/// eq7_mode.
void apply_ablation(RunConfig& cfg, const std::string& assignment);

std::string format_real(double v);

}  // namespace vdf
