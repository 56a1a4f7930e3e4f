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

#include "vdf/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vdf/error.hpp"

namespace vdf {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected on/off, got '" + v + "'");
}

std::string bool_text(bool b) { return b ? "on" : "off"; }

template <typename T, typename F>
std::string join(const T& items, F&& fmt) {
  std::string out;
  for (const auto& v : items) out += (out.empty() ? "" : ",") + fmt(v);
  return out;
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  AttackConfig& a = attack;
  LossConfig& l = attack.loss;
  try {
    if (key == "radius") a.radius = parse_real(key, v);
    else if (key == "eta_delta") a.eta_delta = parse_real(key, v);
    else if (key == "eta_attention") a.eta_attention = parse_real(key, v);
    else if (key == "eta_spatial") a.eta_spatial = parse_real(key, v);
    else if (key == "max_iters") a.max_iters = parse_uint(key, v);
    else if (key == "stop_threshold") a.stop_threshold = parse_real(key, v);
    else if (key == "rate_check_every") a.rate_check_every = parse_uint(key, v);
    else if (key == "noise_domain") a.noise_domain = parse_noise_domain(v);
    else if (key == "spatial_mask") a.spatial_mask = parse_bool(key, v);
    else if (key == "inherit") a.inherit = parse_bool(key, v);
    else if (key == "eq7_mode") a.eq7_mode = parse_eq7_mode(v);
    else if (key == "attention_inside") a.attention_inside = parse_real(key, v);
    else if (key == "attention_outside") a.attention_outside = parse_real(key, v);
    else if (key == "sigma_random") a.sigma_random = parse_real(key, v);
    else if (key == "seed") a.noise_seed = parse_uint(key, v);
    else if (key == "data_seed") a.data_seed = parse_uint(key, v);
    else if (key == "weight_seed") a.weight_seed = parse_uint(key, v);
    else if (key == "verbose") a.verbose = parse_bool(key, v);
    else if (key == "perceptual") l.perceptual_on = parse_bool(key, v);
    else if (key == "multiscale") l.multiscale_on = parse_bool(key, v);
    else if (key == "epsilon") l.epsilon = parse_real(key, v);
    else if (key == "scales") {
      l.scales.clear();
      for (const std::string& s : split(v, ',')) l.scales.push_back(parse_real(key, s));
    } else if (key == "target_classes") {
      l.target_classes.clear();
      for (const std::string& s : split(v, ',')) l.target_classes.push_back(parse_uint(key, s));
    } else if (key == "layer_weights") {
      const auto parts = split(v, ',');
      if (parts.size() != l.layer_weights.size()) throw ConfigError("layer_weights needs 4 values");
      for (std::size_t i = 0; i < parts.size(); ++i) l.layer_weights[i] = parse_real(key, parts[i]);
    } else if (key == "input") input = v;
    else if (key == "output") output = v;
    else if (key == "model") model = v;
    else if (key == "purify") {
      purify.clear();
      for (const std::string& s : split(v, ',')) {
        if (!s.empty()) purify.push_back(PurificationSpec::parse(s));
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const DomainError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  const AttackConfig& a = attack;
  const LossConfig& l = attack.loss;
  return {
      {"radius", format_real(a.radius)},
      {"eta_delta", format_real(a.eta_delta)},
      {"eta_attention", format_real(a.eta_attention)},
      {"eta_spatial", format_real(a.eta_spatial)},
      {"max_iters", std::to_string(a.max_iters)},
      {"stop_threshold", format_real(a.stop_threshold)},
      {"rate_check_every", std::to_string(a.rate_check_every)},
      {"noise_domain", to_string(a.noise_domain)},
      {"spatial_mask", bool_text(a.spatial_mask)},
      {"inherit", bool_text(a.inherit)},
      {"eq7_mode", to_string(a.eq7_mode)},
      {"attention_inside", format_real(a.attention_inside)},
      {"attention_outside", format_real(a.attention_outside)},
      {"sigma_random", format_real(a.sigma_random)},
      {"seed", std::to_string(a.noise_seed)},
      {"data_seed", std::to_string(a.data_seed)},
      {"weight_seed", std::to_string(a.weight_seed)},
      {"verbose", bool_text(a.verbose)},
      {"perceptual", bool_text(l.perceptual_on)},
      {"multiscale", bool_text(l.multiscale_on)},
      {"epsilon", format_real(l.epsilon)},
      {"scales", join(l.scales, format_real)},
      {"target_classes", join(l.target_classes, [](std::size_t c) { return std::to_string(c); })},
      {"layer_weights", join(l.layer_weights, format_real)},
      {"input", input.string()},
      {"output", output.string()},
      {"model", model.string()},
      {"purify", join(purify, [](const PurificationSpec& p) { return p.label(); })},
  };
}

void RunConfig::validate() const {
  try {
    attack.validate();
    for (const PurificationSpec& p : purify) p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void apply_environment(RunConfig& cfg) {
  if (const char* s = std::getenv("VDF_SEED"); s != nullptr && *s != '\0') cfg.set("seed", s);
}

void apply_ablation(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--ablate expects KEY=VAL, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  if (key != "noise_domain" && key != "spatial_mask" && key != "perceptual" && key != "inherit" &&
      key != "eq7_mode") {
    throw ConfigError("--ablate key must be one of noise_domain, spatial_mask, perceptual, inherit, eq7_mode");
  }
  cfg.set(key, assignment.substr(eq + 1));
}

}  // namespace vdf
