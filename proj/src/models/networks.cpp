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

#include <algorithm>
#include <cmath>
#include <random>

#include "vdf/error.hpp"
#include "vdf/models.hpp"

namespace vdf {
namespace {

ad::Var run_layer(const ConvLayer& layer, const ad::Var& x) {
  ad::Tape& t = x.tape();
  return ad::conv2d(x, t.constant(layer.weight), t.constant(layer.bias), layer.geometry);
}

ConvLayer gaussian_layer(std::mt19937_64& rng, std::size_t k, std::size_t cin, std::size_t cout,
                         std::size_t stride, std::size_t pad, double stddev) {
  ConvLayer l{Tensor(Shape{k * k, cin, cout}), Tensor(Shape{1, 1, cout}, 0.0),
              ad::ConvGeometry{k, k, stride, pad}};
  std::normal_distribution<double> n(0.0, stddev);
  for (double& v : l.weight.values()) v = n(rng);
  return l;
}

}  // namespace

Tensor PixelClassifier::predict(const Tensor& x) const {
  ad::Tape t;
  return probabilities(t.constant(x)).value();
}

std::vector<std::uint8_t> argmax_classes(const Tensor& probabilities) {
  const std::size_t c = probabilities.channels();
  std::vector<std::uint8_t> out(probabilities.shape().pixels());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double* row = probabilities.raw() + p * c;
    // Ties resolve to the lowest class index.
    out[p] = static_cast<std::uint8_t>(std::max_element(row, row + c) - row);
  }
  return out;
}

// ---- SegModel ----

SegModel SegModel::initialize(std::uint64_t weight_seed, std::size_t classes) {
  if (classes < 2) throw DomainError("segmentation model needs at least two classes");
  std::mt19937_64 rng(weight_seed);
  std::vector<ConvLayer> layers;
  layers.push_back(gaussian_layer(rng, 3, 3, kHidden, 1, 1, std::sqrt(2.0 / (9.0 * 3.0))));
  layers.push_back(gaussian_layer(rng, 3, kHidden, kHidden, 1, 1, std::sqrt(2.0 / (9.0 * kHidden))));
  layers.push_back(gaussian_layer(rng, 1, kHidden, classes, 1, 0, std::sqrt(2.0 / kHidden)));
  return SegModel(std::move(layers));
}

SegModel::SegModel(std::vector<ConvLayer> layers) : layers_(std::move(layers)) {
  if (layers_.size() != 3) throw ShapeError("segmentation model has exactly three stages");
  if (layers_[0].in_channels() != 3) throw ShapeError("segmentation model expects RGB input");
  for (std::size_t i = 1; i < layers_.size(); ++i) {
    if (layers_[i].in_channels() != layers_[i - 1].out_channels()) {
      throw ShapeError("segmentation model stage channel mismatch");
    }
  }
  if (classes() < 2) throw ShapeError("segmentation model needs at least two classes");
}

ad::Var SegModel::logits(const ad::Var& x) const {
  ad::Var h = ad::relu(run_layer(layers_[0], x));
  h = ad::relu(run_layer(layers_[1], h));
  return run_layer(layers_[2], h);
}

ad::Var SegModel::probabilities(const ad::Var& x) const { return ad::channel_softmax(logits(x)); }

// ---- FeatureExtractor ----

FeatureExtractor::FeatureExtractor(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t widths[] = {3, 8, 16, 32, 64};
  for (std::size_t i = 0; i < kTaps; ++i) {
    const double fan_in = 9.0 * static_cast<double>(widths[i]);
    layers_.push_back(gaussian_layer(rng, 3, widths[i], widths[i + 1], 2, 1, 1.0 / std::sqrt(fan_in)));
  }
}

void FeatureExtractor::check_input(const Shape& s) const {
  if (s.c != 3) throw ShapeError("feature extractor expects 3 channels, got " + s.str());
  if (s.h < 16 || s.w < 16) {
    throw ShapeError("feature extractor needs at least 16x16 input, got " + s.str());
  }
}

std::vector<ad::Var> FeatureExtractor::taps(const ad::Var& x) const {
  check_input(x.shape());
  std::vector<ad::Var> out;
  ad::Var h = x;
  for (const ConvLayer& l : layers_) {
    h = ad::relu(run_layer(l, h));
    out.push_back(h);
  }
  return out;
}

std::vector<Tensor> FeatureExtractor::extract(const Tensor& x) const {
  ad::Tape t;
  std::vector<Tensor> out;
  for (const ad::Var& v : taps(t.constant(x))) out.push_back(v.value());
  return out;
}

// ---- AnalyticClassifier ----

AnalyticClassifier::AnalyticClassifier(std::array<double, 3> mu_face, std::array<double, 3> mu_bg,
                                       double tau)
    : mu_face_(mu_face), mu_bg_(mu_bg), tau_(tau) {
  if (!(tau > 0.0)) throw DomainError("analytic classifier temperature must be positive");
  // (|x - mb|^2 - |x - mf|^2) / tau = sum_c 2 x_c (mf_c - mb_c) / tau + (|mb|^2 - |mf|^2) / tau
  layer_ = ConvLayer{Tensor(Shape{1, 3, 2}, 0.0), Tensor(Shape{1, 1, 2}, 0.0), ad::ConvGeometry{1, 1, 1, 0}};
  double bias = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    layer_.weight[c * 2 + kFaceClass] = 2.0 * (mu_face[c] - mu_bg[c]) / tau;
    bias += (mu_bg[c] * mu_bg[c] - mu_face[c] * mu_face[c]) / tau;
  }
  layer_.bias[kFaceClass] = bias;
}

ad::Var AnalyticClassifier::probabilities(const ad::Var& x) const {
  if (x.shape().c != 3) throw ShapeError("analytic classifier expects RGB input");
  return ad::channel_softmax(run_layer(layer_, x));
}

double AnalyticClassifier::face_probability(double r, double g, double b) const {
  const double rgb[3] = {r, g, b};
  double db = 0.0, df = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    db += (rgb[c] - mu_bg_[c]) * (rgb[c] - mu_bg_[c]);
    df += (rgb[c] - mu_face_[c]) * (rgb[c] - mu_face_[c]);
  }
  return 1.0 / (1.0 + std::exp(-(db - df) / tau_));
}

Tensor AnalyticClassifier::mean_face_gradient(const Tensor& x) const {
  // d p / d x_c = p (1 - p) * d z / d x_c,  d z / d x_c = 2 (mf_c - mb_c) / tau
  const std::size_t n = x.shape().pixels();
  Tensor g(x.shape());
  for (std::size_t p = 0; p < n; ++p) {
    const double pf = face_probability(x[p * 3], x[p * 3 + 1], x[p * 3 + 2]);
    for (std::size_t c = 0; c < 3; ++c) {
      g[p * 3 + c] = pf * (1.0 - pf) * 2.0 * (mu_face_[c] - mu_bg_[c]) / tau_ / static_cast<double>(n);
    }
  }
  return g;
}

// ---- ConstantClassifier ----

ConstantClassifier::ConstantClassifier(std::vector<double> probabilities)
    : probs_(std::move(probabilities)) {
  if (probs_.size() < 2) throw DomainError("constant classifier needs at least two classes");
}

ad::Var ConstantClassifier::probabilities(const ad::Var& x) const {
  const Shape& s = x.shape();
  Tensor p(Shape{s.h, s.w, probs_.size()});
  for (std::size_t i = 0; i < s.pixels(); ++i) {
    std::copy(probs_.begin(), probs_.end(), p.raw() + i * probs_.size());
  }
  return x.tape().constant(std::move(p));
}

}  // namespace vdf
