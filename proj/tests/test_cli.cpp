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

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("vdf_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// Exit status of the CLI with the given arguments; output goes to log.
int vdf(const std::string& args, const fs::path& log, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" VDF_CLI "' " + args + " > '" +
                          log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_files(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file();
  return n;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("usage errors exit with 1") {
  TempDir t;
  const fs::path log = t.path / "log";
  CHECK(vdf("", log) == 1);
  CHECK(vdf("frobnicate", log) == 1);
  CHECK(vdf("protect --input x", log) == 1);
  CHECK(vdf("gen-data --out " + q(t.path / "d") + " --count 0", log) == 1);
  CHECK(vdf("gen-data --out " + q(t.path / "d") + " --count abc", log) == 1);
  std::ofstream(t.path / "bad.cfg") << "no_such_key = 1\n";
  CHECK(vdf("protect --input x --output y --model z --config " + q(t.path / "bad.cfg"), log) == 1);
  CHECK(vdf("protect --input x --output y --model z --ablate radius=0.1", log) == 1);
  CHECK(vdf("--help", log) == 0);
}

TEST_CASE("runtime failures exit with 2") {
  TempDir t;
  const fs::path log = t.path / "log";
  CHECK(vdf("protect --input " + q(t.path / "none") + " --output " + q(t.path / "o") + " --model " +
                q(t.path / "missing.vdfm"),
            log) == 2);
  CHECK(slurp(log).find("error:") != std::string::npos);
  CHECK(vdf("train-model --data " + q(t.path / "none") + " --out " + q(t.path / "m.vdfm"), log) == 2);
}

TEST_CASE("gen-data writes one frame, one mask and a manifest per scene, deterministically") {
  TempDir t;
  const fs::path log = t.path / "log";
  REQUIRE(vdf("gen-data --out " + q(t.path / "one") + " --count 1", log) == 0);
  CHECK(count_files(t.path / "one") == 3);
  CHECK(fs::exists(t.path / "one" / "frame_000000.png"));
  CHECK(fs::exists(t.path / "one" / "mask_000000.png"));
  const auto manifest = nlohmann::json::parse(slurp(t.path / "one" / "manifest.json"));
  CHECK(manifest["seed"] == 2024);
  CHECK(manifest["count"] == 1);

  REQUIRE(vdf("gen-data --out " + q(t.path / "a") + " --count 5 --size 32", log) == 0);
  REQUIRE(vdf("gen-data --out " + q(t.path / "b") + " --count 5 --size 32", log) == 0);
  for (const auto& e : fs::directory_iterator(t.path / "a")) {
    CHECK(slurp(e.path()) == slurp(t.path / "b" / e.path().filename()));
  }
  // Existing non-empty output is refused and left alone.
  CHECK(vdf("gen-data --out " + q(t.path / "a") + " --count 1", log) == 2);
  CHECK(count_files(t.path / "a") == 11);
}

TEST_CASE("canonical training set generates in under 30 s") {
  TempDir t;
  const auto start = std::chrono::steady_clock::now();
  REQUIRE(vdf("gen-data --out " + q(t.path / "train"), t.path / "log") == 0);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("gen-data 200 scenes: " << s << " s");
  CHECK(s < 30.0);
  CHECK(count_files(t.path / "train") == 401);
}

TEST_CASE("train, protect and evaluate end to end") {
  TempDir t;
  const fs::path log = t.path / "log";
  REQUIRE(vdf("gen-data --out " + q(t.path / "train") + " --count 6 --size 32", log) == 0);
  const int train = vdf("train-model --data " + q(t.path / "train") + " --out " + q(t.path / "m.vdfm") +
                            " --epochs 1",
                        log);
  // One epoch on six scenes need not pass the accuracy gate; the weights
  // are written either way.
  CHECK((train == 0 || train == 2));
  CHECK(slurp(log).find("heldout_accuracy") != std::string::npos);
  REQUIRE(fs::exists(t.path / "m.vdfm"));
  const int retrain = vdf("train-model --data " + q(t.path / "train") + " --out " + q(t.path / "m2.vdfm") +
                              " --epochs 1",
                          log);
  CHECK(retrain == train);
  CHECK(slurp(t.path / "m.vdfm") == slurp(t.path / "m2.vdfm"));
  // Untrained weights sit far below the accuracy gate.
  CHECK(vdf("train-model --data " + q(t.path / "train") + " --out " + q(t.path / "m0.vdfm") + " --epochs 0",
            log) == 2);
  CHECK(fs::exists(t.path / "m0.vdfm"));

  REQUIRE(vdf("gen-data --out " + q(t.path / "seq") + " --count 3 --size 32 --sequence", log) == 0);
  std::ofstream(t.path / "run.cfg") << "max_iters = 3\nrate_check_every = 1\n";
  const std::string common = "protect --input " + q(t.path / "seq") + " --model " + q(t.path / "m.vdfm") +
                             " --config " + q(t.path / "run.cfg");
  REQUIRE(vdf(common + " --output " + q(t.path / "p1"), log) == 0);
  REQUIRE(vdf(common + " --output " + q(t.path / "p2"), log) == 0);
  CHECK(count_files(t.path / "p1") == 3 * 3 + 2);
  for (const auto& e : fs::directory_iterator(t.path / "p1")) {
    if (e.path().filename() == "timing.json") continue;
    INFO(e.path().filename());
    CHECK(slurp(e.path()) == slurp(t.path / "p2" / e.path().filename()));
  }
  const auto report = nlohmann::json::parse(slurp(t.path / "p1" / "report.json"));
  CHECK(report["frames"].size() == 3);
  CHECK_FALSE(report["config"].contains("output"));
  CHECK(report["config"]["max_iters"] == "3");
  CHECK(report["frames"][0]["iterations_used"].get<int>() <= 3);
  CHECK(report["frames"][1]["inherited"] == true);
  CHECK(report["frames"][0]["loss"]["rates"].size() == 5);
  CHECK(nlohmann::json::parse(slurp(t.path / "p1" / "timing.json")).contains("total_wall_time"));
  for (const char* key : {"config", "resolved", "derived_masks", "frames", "aggregate"}) CHECK(report.contains(key));
  for (const auto& f : report["frames"]) {
    for (const char* key : {"index", "iterations_used", "stop_reason", "inherited", "ssim_to_previous", "psnr",
                            "ssim", "max_deviation", "loss"}) {
      CHECK(f.contains(key));
    }
    for (const char* key : {"seg_terms", "perceptual", "total", "rates", "degenerate_scales"}) {
      CHECK(f["loss"].contains(key));
    }
  }
  for (const char* key : {"mean_iterations", "mean_psnr", "mean_ssim"}) CHECK(report["aggregate"].contains(key));

  // The echoed config reproduces the run.
  {
    std::ofstream echo(t.path / "echo.cfg");
    for (const auto& [k, v] : report["config"].items()) echo << k << " = " << v.get<std::string>() << "\n";
  }
  REQUIRE(vdf("protect --input " + q(t.path / "seq") + " --model " + q(t.path / "m.vdfm") + " --config " +
                  q(t.path / "echo.cfg") + " --output " + q(t.path / "p_echo"),
              log) == 0);
  for (const auto& e : fs::directory_iterator(t.path / "p1")) {
    if (e.path().filename() == "timing.json") continue;
    CHECK(slurp(e.path()) == slurp(t.path / "p_echo" / e.path().filename()));
  }

  REQUIRE(vdf(common + " --output " + q(t.path / "p_off") + " --ablate inherit=off", log) == 0);
  const auto off = nlohmann::json::parse(slurp(t.path / "p_off" / "report.json"));
  for (const auto& f : off["frames"]) CHECK(f["inherited"] == false);
  CHECK(off["config"]["inherit"] == "off");

  // Output must be absent or empty.
  CHECK(vdf(common + " --output " + q(t.path / "p1"), log) == 2);

  REQUIRE(vdf(common + " --output " + q(t.path / "p3"), log, "VDF_SEED=5") == 0);
  const auto seeded = nlohmann::json::parse(slurp(t.path / "p3" / "report.json"));
  CHECK(seeded["config"]["seed"] == "5");
  CHECK(slurp(t.path / "p3" / "state_000000.vdfs") != slurp(t.path / "p1" / "state_000000.vdfs"));

  REQUIRE(vdf("evaluate --protected " + q(t.path / "p1") + " --clean " + q(t.path / "seq") + " --model " +
                  q(t.path / "m.vdfm") + " --purify jpeg:75 --purify resize:0.6",
              log) == 0);
  const std::string csv = slurp(t.path / "p1" / "robustness.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 2 * 5);
  const auto evaluated = nlohmann::json::parse(slurp(t.path / "p1" / "report.json"));
  CHECK(evaluated["robustness"]["purifications"].size() == 2);
  CHECK(evaluated["frames"] == report["frames"]);
  CHECK(vdf("evaluate --protected " + q(t.path / "p1") + " --clean " + q(t.path / "seq") + " --model " +
                q(t.path / "m.vdfm") + " --purify blur:3",
            log) == 1);
  REQUIRE(vdf("gen-data --out " + q(t.path / "seq2") + " --count 2 --size 32 --sequence", log) == 0);
  CHECK(vdf("evaluate --protected " + q(t.path / "p2") + " --clean " + q(t.path / "seq2") + " --model " +
                q(t.path / "m.vdfm"),
            log) == 2);
  CHECK(slurp(log).find("frames") != std::string::npos);
  REQUIRE(vdf("evaluate --protected " + q(t.path / "p2") + " --clean " + q(t.path / "seq") + " --model " +
                  q(t.path / "m.vdfm") + " --purify resize:1.0",
              log) == 0);
  const auto ident = nlohmann::json::parse(slurp(t.path / "p2" / "report.json"));
  for (const auto& f : ident["robustness"]["purifications"][0]["frames"]) {
    for (const auto& r : f["retention"]) {
      if (!r.is_null()) CHECK(r.get<double>() == 1.0);
    }
  }
}
