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

#include <cmath>

#include "vdf/error.hpp"
#include "vdf/models.hpp"

namespace vdf {
namespace {

struct StepResult {
  double loss = 0.0;
  std::vector<Tensor> grads;  // weight, bias per layer
};

StepResult scene_gradient(const SegModel& model, const SyntheticScene& scene) {
  ad::Tape t;
  std::vector<ad::Var> params;
  ad::Var h = t.constant(scene.image);
  const auto& layers = model.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    params.push_back(t.variable(layers[i].weight));
    params.push_back(t.variable(layers[i].bias));
    h = ad::conv2d(h, params[params.size() - 2], params.back(), layers[i].geometry);
    if (i + 1 < layers.size()) h = ad::relu(h);
  }
  const ad::Var loss = ad::softmax_cross_entropy(h, scene.mask.bits());
  StepResult r;
  r.loss = loss.value().item();
  const ad::Gradients g = t.backward(loss);
  for (const ad::Var& p : params) r.grads.push_back(g.of(p));
  return r;
}

}  // namespace

TrainReport train_seg(SegModel& model, const std::vector<SyntheticScene>& train,
                      const std::vector<SyntheticScene>& heldout, const TrainOptions& options) {
  if (options.batch_size == 0) throw DomainError("batch size must be positive");
  if (!(options.learning_rate > 0.0)) throw DomainError("learning rate must be positive");
  if (train.empty() && options.epochs > 0) throw DomainError("no training scenes");
  TrainReport report;
  auto& layers = model.mutable_layers();
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train.size(); start += options.batch_size) {
      const std::size_t end = std::min(train.size(), start + options.batch_size);
      const double inv = 1.0 / static_cast<double>(end - start);
      std::vector<Tensor> sum;
      for (std::size_t i = start; i < end; ++i) {
        StepResult r = scene_gradient(model, train[i]);
        if (!std::isfinite(r.loss)) {
          throw NumericError("training diverged at epoch " + std::to_string(epoch));
        }
        epoch_loss += r.loss;
        if (sum.empty()) {
          sum = std::move(r.grads);
        } else {
          for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += r.grads[k];
        }
      }
      for (std::size_t l = 0; l < layers.size(); ++l) {
        Tensor* targets[2] = {&layers[l].weight, &layers[l].bias};
        for (std::size_t j = 0; j < 2; ++j) {
          const Tensor& g = sum[l * 2 + j];
          for (std::size_t e = 0; e < g.size(); ++e) (*targets[j])[e] -= options.learning_rate * inv * g[e];
        }
      }
      ++report.steps;
    }
    report.epoch_loss.push_back(epoch_loss / static_cast<double>(train.size()));
  }
  report.heldout_accuracy = heldout.empty() ? 0.0 : pixel_accuracy(model, heldout);
  return report;
}

double pixel_accuracy(const PixelClassifier& model, const std::vector<SyntheticScene>& scenes) {
  if (scenes.empty()) throw DomainError("accuracy needs at least one scene");
  std::size_t correct = 0, total = 0;
  for (const SyntheticScene& s : scenes) {
    const std::vector<std::uint8_t> cls = argmax_classes(model.predict(s.image));
    const auto& bits = s.mask.bits();
    for (std::size_t p = 0; p < cls.size(); ++p) correct += cls[p] == (bits[p] ? kFaceClass : kBackgroundClass);
    total += cls.size();
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace vdf
