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

// Differentiable attack targets and the synthetic data that trains them.
//
// The face parser is a three-stage toy network trained on synthetic scenes;
// the perceptual taps come from a frozen random-weight pyramid. Both are
// read-only once built and may be shared across threads.

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "vdf/autodiff.hpp"
#include "vdf/tensor.hpp"

namespace vdf {

inline constexpr std::size_t kBackgroundClass = 0;
inline constexpr std::size_t kFaceClass = 1;

struct ConvLayer {
  Tensor weight;  // (KH*KW, Cin, Cout)
  Tensor bias;    // 1 x 1 x Cout
  ad::ConvGeometry geometry;

  std::size_t in_channels() const { return weight.width(); }
  std::size_t out_channels() const { return weight.channels(); }
};

/// Anything that maps an H x W x 3 image to H x W x K class probabilities.
class PixelClassifier {
 public:
  virtual ~PixelClassifier() = default;
  virtual std::size_t classes() const = 0;
  /// Differentiable probabilities on x's tape.
  virtual ad::Var probabilities(const ad::Var& x) const = 0;
  /// Forward-only convenience.
  Tensor predict(const Tensor& x) const;
};

/// conv 3->16 (3x3) -> ReLU -> conv 16->16 (3x3) -> ReLU -> conv 16->K (1x1)
/// -> channel softmax.
class SegModel final : public PixelClassifier {
 public:
  static constexpr std::size_t kHidden = 16;

  /// He-normal weights from `weight_seed`, zero biases.
  static SegModel initialize(std::uint64_t weight_seed, std::size_t classes = 2);
  explicit SegModel(std::vector<ConvLayer> layers);

  std::size_t classes() const override { return layers_.back().out_channels(); }
  ad::Var probabilities(const ad::Var& x) const override;
  ad::Var logits(const ad::Var& x) const;

  const std::vector<ConvLayer>& layers() const { return layers_; }
  std::vector<ConvLayer>& mutable_layers() { return layers_; }

 private:
  std::vector<ConvLayer> layers_;
};

// ---- VDFM weight file ----
// Little-endian: "VDFM", u16 version, u32 layer count, then per layer
// u32 KH, KW, Cin, Cout, stride, pad followed by KH*KW*Cin*Cout weights and
// Cout biases as f64.
inline constexpr std::uint16_t kModelFormatVersion = 1;
std::vector<std::uint8_t> encode_model(const SegModel& model);
SegModel decode_model(const std::vector<std::uint8_t>& bytes);
void save_model(const std::filesystem::path& path, const SegModel& model);
SegModel load_model(const std::filesystem::path& path);

/// Four stride-2 3x3 stages (3->8->16->32->64) with ReLU; one tap after each.
/// Weights ~ N(0, 1/fan_in) from a fixed seed, biases zero, never mutated.
class FeatureExtractor {
 public:
  static constexpr std::size_t kTaps = 4;
  static constexpr std::uint64_t kDefaultSeed = 42;

  explicit FeatureExtractor(std::uint64_t seed = kDefaultSeed);

  std::vector<ad::Var> taps(const ad::Var& x) const;
  std::vector<Tensor> extract(const Tensor& x) const;
  const std::vector<ConvLayer>& layers() const { return layers_; }

 private:
  void check_input(const Shape& s) const;
  std::vector<ConvLayer> layers_;
};

/// p_face = sigmoid((|rgb - mu_bg|^2 - |rgb - mu_face|^2) / tau), realised as
/// a 1x1 linear layer. Used as a closed-form gradient oracle.
class AnalyticClassifier final : public PixelClassifier {
 public:
  AnalyticClassifier(std::array<double, 3> mu_face, std::array<double, 3> mu_bg, double tau);

  std::size_t classes() const override { return 2; }
  ad::Var probabilities(const ad::Var& x) const override;

  double face_probability(double r, double g, double b) const;
  /// d/dx of mean_pixels(p_face(x)), derived by hand.
  Tensor mean_face_gradient(const Tensor& x) const;

 private:
  std::array<double, 3> mu_face_;
  std::array<double, 3> mu_bg_;
  double tau_;
  ConvLayer layer_;
};

/// Emits the same probability vector at every pixel; zero input gradient.
class ConstantClassifier final : public PixelClassifier {
 public:
  explicit ConstantClassifier(std::vector<double> probabilities);
  std::size_t classes() const override { return probs_.size(); }
  ad::Var probabilities(const ad::Var& x) const override;

 private:
  std::vector<double> probs_;
};

// ---- synthetic scenes ----

/// Colour and geometry knobs of the scene generator. Defaults are the
/// canonical dataset.
struct SceneStyle {
  std::size_t height = 64;
  std::size_t width = 64;
  double background_level = 0.5;    // mean of the smoothed noise field
  double background_spread = 1.0;   // noise amplitude before smoothing (uniform width)
  double background_blue_bias = 0.2;
  double face_level = 0.5;          // base tone of the face fill
  double face_red_bias = 0.3;
  double texture_std = 0.05;
  double feature_darkening = 0.5;   // eyes and mouth are multiplied by this
};

struct SyntheticScene {
  Tensor image;
  Mask mask;
  std::uint64_t seed = 0;
};

SyntheticScene generate_scene(std::uint64_t seed, const SceneStyle& style = {});

/// One scene whose face drifts `shift_px` pixels to the right per frame.
std::vector<SyntheticScene> generate_sequence(std::uint64_t seed, std::size_t count,
                                              const SceneStyle& style = {},
                                              double shift_px = 1.0);

// ---- training ----

struct TrainOptions {
  std::size_t epochs = 30;
  double learning_rate = 0.05;
  std::size_t batch_size = 8;
};

struct TrainReport {
  std::vector<double> epoch_loss;
  std::size_t steps = 0;
  double heldout_accuracy = 0.0;
};

/// Plain minibatch gradient descent on per-pixel cross-entropy, scenes in
/// the given order. Throws NumericError if the loss becomes non-finite.
TrainReport train_seg(SegModel& model, const std::vector<SyntheticScene>& train,
                      const std::vector<SyntheticScene>& heldout, const TrainOptions& options = {});

/// Fraction of pixels whose argmax class equals the mask label.
double pixel_accuracy(const PixelClassifier& model, const std::vector<SyntheticScene>& scenes);

/// Per-pixel argmax of a probability tensor.
std::vector<std::uint8_t> argmax_classes(const Tensor& probabilities);

}  // namespace vdf
