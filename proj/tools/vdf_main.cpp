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

// vdf: gen-data, train-model, protect, evaluate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vdf/config.hpp"
#include "vdf/dataset.hpp"
#include "vdf/error.hpp"
#include "vdf/image_io.hpp"
#include "vdf/models.hpp"
#include "vdf/pipeline.hpp"
#include "vdf/report.hpp"
#include "vdf/robustness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

constexpr double kAccuracyGate = 0.95;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw vdf::IoError(path.string() + ": write failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw vdf::IoError(path.string() + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- gen-data ----

struct GenDataArgs {
  std::string out;
  std::size_t count = vdf::kCanonicalTrainCount;
  std::size_t size = vdf::kCanonicalSize;
  std::uint64_t seed = vdf::kCanonicalDataSeed;
  bool sequence = false;
  double shift = 1.0;
};

int run_gen_data(const GenDataArgs& a) {
  if (a.count == 0) throw UsageError("--count must be at least 1");
  if (a.size < 16) throw UsageError("--size must be at least 16");
  vdf::DatasetManifest m;
  m.seed = a.seed;
  m.count = a.count;
  m.size = a.size;
  m.sequence = a.sequence;
  m.shift_px = a.shift;
  const std::vector<vdf::SyntheticScene> scenes = vdf::render_dataset(m);
  vdf::StagedDirectory staged(a.out);
  vdf::write_dataset(staged.path(), scenes, m);
  staged.commit();
  std::printf("wrote %zu scenes to %s\n", scenes.size(), a.out.c_str());
  return kExitOk;
}

// ---- train-model ----

struct TrainArgs {
  std::string data;
  std::string out;
  std::size_t epochs = 30;
  std::uint64_t weight_seed = 7;
};

int run_train(const TrainArgs& a) {
  const vdf::DatasetManifest manifest = vdf::read_manifest(a.data);
  const vdf::FrameSequence data = vdf::load_frame_directory(a.data);
  std::vector<vdf::SyntheticScene> train;
  for (std::size_t i = 0; i < data.frames.size(); ++i) {
    train.push_back(vdf::SyntheticScene{data.frames[i], data.masks[i], 0});
  }
  const auto heldout = vdf::heldout_scenes(manifest.seed, vdf::kCanonicalHeldoutCount, manifest.size);
  vdf::SegModel model = vdf::SegModel::initialize(a.weight_seed);
  vdf::TrainOptions options;
  options.epochs = a.epochs;
  const vdf::TrainReport report = vdf::train_seg(model, train, heldout, options);
  vdf::save_model(a.out, model);
  const double final_loss = report.epoch_loss.empty() ? 0.0 : report.epoch_loss.back();
  std::printf("epochs %zu steps %zu final_loss %.6f heldout_accuracy %.6f\n", a.epochs, report.steps,
              final_loss, report.heldout_accuracy);
  if (report.heldout_accuracy < kAccuracyGate) {
    std::fprintf(stderr, "held-out accuracy %.4f is below %.2f\n", report.heldout_accuracy, kAccuracyGate);
    return kExitRuntime;
  }
  return kExitOk;
}

// ---- protect ----

struct ProtectArgs {
  std::string input;
  std::string output;
  std::string model;
  std::string config;
  std::vector<std::string> ablate;
  bool verbose = false;
};

vdf::RunConfig resolve_config(const std::string& config_path) {
  vdf::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = vdf::load_config(config_path);
    vdf::apply_environment(cfg);
  } catch (const vdf::ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

int run_protect(const ProtectArgs& a) {
  vdf::RunConfig cfg = resolve_config(a.config);
  try {
    for (const std::string& s : a.ablate) vdf::apply_ablation(cfg, s);
    cfg.input = a.input;
    cfg.output = a.output;
    cfg.model = a.model;
    if (a.verbose) cfg.attack.verbose = true;
    cfg.validate();
  } catch (const vdf::ConfigError& e) {
    throw UsageError(e.what());
  }
  const vdf::SegModel model = vdf::load_model(cfg.model);
  const vdf::FeatureExtractor features;
  const vdf::FrameSequence seq = vdf::load_frame_directory(cfg.input, &model);
  vdf::StagedDirectory staged(cfg.output);
  const vdf::ProtectedVideo result = vdf::protect_video(
      seq, vdf::TargetModels{&model, &features}, cfg.attack, [&](const vdf::FrameEntry& e) {
        if (cfg.attack.verbose) {
          std::fprintf(stderr, "frame %zu done: %zu iterations, %s\n", e.index, e.attack.iterations_used,
                       vdf::to_string(e.attack.stop_reason).c_str());
        }
      });
  for (std::size_t i = 0; i < result.frames.size(); ++i) {
    vdf::write_png_rgb(staged.path() / vdf::frame_name(i), result.frames[i]);
    vdf::write_png_mask(staged.path() / vdf::mask_name(i), seq.masks[i]);
    vdf::write_state(staged.path() / vdf::state_name(i), result.states[i]);
  }
  const vdf::Shape shape = seq.frames.front().shape();
  write_text(staged.path() / "report.json", vdf::protect_report_json(cfg, shape, result.report));
  write_text(staged.path() / "timing.json", vdf::timing_json(result.report));
  staged.commit();
  std::size_t met = 0;
  for (const auto& e : result.report.frames) met += e.attack.stop_reason == vdf::StopReason::kThresholdMet;
  std::printf("protected %zu frames (%zu met the threshold), mean iterations %.2f, mean PSNR %.2f dB\n",
              result.frames.size(), met, result.report.mean_iterations, result.report.mean_psnr);
  return kExitOk;
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string protected_dir;
  std::string clean_dir;
  std::string model;
  std::string config;
  std::vector<std::string> purify;
};

int run_evaluate(const EvaluateArgs& a) {
  vdf::RunConfig cfg = resolve_config(a.config);
  std::vector<vdf::PurificationSpec> specs = cfg.purify;
  try {
    if (!a.purify.empty()) {
      specs.clear();
      for (const std::string& s : a.purify) specs.push_back(vdf::PurificationSpec::parse(s));
    }
    cfg.validate();
  } catch (const vdf::DomainError& e) {
    throw UsageError(e.what());
  } catch (const vdf::ConfigError& e) {
    throw UsageError(e.what());
  }
  const vdf::SegModel model = vdf::load_model(a.model);
  const vdf::FrameSequence clean = vdf::load_frame_directory(a.clean_dir, &model);
  const vdf::FrameSequence prot = vdf::load_frame_directory(a.protected_dir, &model);
  if (clean.frames.size() != prot.frames.size()) {
    throw vdf::ShapeError("protected has " + std::to_string(prot.frames.size()) + " frames, clean has " +
                          std::to_string(clean.frames.size()));
  }
  const vdf::RobustnessReport report =
      vdf::evaluate_robustness(prot.frames, clean.frames, clean.masks, model, specs, cfg.attack.loss);
  const std::filesystem::path report_path = std::filesystem::path(a.protected_dir) / "report.json";
  const std::string existing = std::filesystem::exists(report_path) ? read_text(report_path) : std::string();
  write_text(report_path, vdf::append_robustness(existing, report));
  write_text(std::filesystem::path(a.protected_dir) / "robustness.csv", vdf::robustness_csv(report));
  for (std::size_t s = 0; s < report.sections.size(); ++s) {
    std::printf("%s: mean post-purification rate at scale 1.0 = %.4f\n",
                report.sections[s].spec.label().c_str(), report.mean_post_rate(s, 1.0));
  }
  if (report.sections.empty()) std::printf("pre-purification rates only (%zu frames)\n", report.pre_rates.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video defense framework: frequency-domain adversarial protection of frame sequences"};
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write synthetic frames, masks and a manifest");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--count", gen.count, "Number of scenes");
  gen_cmd->add_option("--size", gen.size, "Frame height and width");
  gen_cmd->add_option("--seed", gen.seed, "Dataset seed");
  gen_cmd->add_flag("--sequence", gen.sequence, "One scene whose face drifts across frames");
  gen_cmd->add_option("--shift", gen.shift, "Face drift per frame in pixels (with --sequence)");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train-model", "Train the toy segmentation model");
  train_cmd->add_option("--data", train.data, "Directory from gen-data")->required();
  train_cmd->add_option("--out", train.out, "Weight file")->required();
  train_cmd->add_option("--epochs", train.epochs, "Training epochs");
  train_cmd->add_option("--weight-seed", train.weight_seed, "Initialisation seed");

  ProtectArgs prot;
  auto* prot_cmd = app.add_subcommand("protect", "Protect a frame directory");
  prot_cmd->add_option("--input", prot.input, "Frame directory")->required();
  prot_cmd->add_option("--output", prot.output, "Output directory (absent or empty)")->required();
  prot_cmd->add_option("--model", prot.model, "Weight file")->required();
  prot_cmd->add_option("--config", prot.config, "key = value config file");
  prot_cmd->add_option("--ablate", prot.ablate, "KEY=VAL override (repeatable)");
  prot_cmd->add_flag("--verbose", prot.verbose, "Progress on standard error");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Rates after purification");
  eval_cmd->add_option("--protected", eval.protected_dir, "Protected frame directory")->required();
  eval_cmd->add_option("--clean", eval.clean_dir, "Clean frame directory")->required();
  eval_cmd->add_option("--model", eval.model, "Weight file")->required();
  eval_cmd->add_option("--config", eval.config, "key = value config file");
  eval_cmd->add_option("--purify", eval.purify, "jpeg:Q or resize:S (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen_data(gen);
    if (*train_cmd) return run_train(train);
    if (*prot_cmd) return run_protect(prot);
    if (*eval_cmd) return run_evaluate(eval);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
