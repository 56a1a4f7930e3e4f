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

#include "vdf/autodiff.hpp"
#include "vdf/error.hpp"

namespace vdf::ad {

const Tensor& Var::value() const { return tape_->value(id_); }

bool Var::requires_grad() const { return tape_->requires_grad(id_); }

const Tensor& Gradients::of(const Var& v) const {
  const auto it = std::find(ids_.begin(), ids_.end(), v.id());
  if (it == ids_.end()) throw TapeError("gradient requested for an unregistered variable");
  return grads_[static_cast<std::size_t>(it - ids_.begin())];
}

void Tape::ensure_live() const {
  if (consumed_) throw TapeError("tape already consumed by backward()");
}

Var Tape::push(Tensor value, bool requires_grad) {
  ensure_live();
  nodes_.push_back(Node{std::move(value), Tensor(), requires_grad});
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::variable(Tensor value) {
  Var v = push(std::move(value), true);
  variables_.push_back(v.id());
  return v;
}

Var Tape::constant(Tensor value) { return push(std::move(value), false); }

void Tape::record(std::function<void()> adjoint) {
  ensure_live();
  adjoints_.push_back(std::move(adjoint));
}

Tensor& Tape::grad(std::uint32_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(n.value.shape(), 0.0);
  return n.grad;
}

const Tensor* Tape::grad_if_any(std::uint32_t id) const {
  const Node& n = nodes_[id];
  return n.grad.empty() ? nullptr : &n.grad;
}

Gradients Tape::backward(const Var& output) {
  ensure_live();
  if (&output.tape() != this) throw TapeError("backward() output belongs to another tape");
  if (nodes_[output.id()].value.size() != 1) {
    throw TapeError("backward() requires a scalar output, got " +
                    nodes_[output.id()].value.shape().str());
  }
  grad(output.id())[0] = 1.0;
  for (auto it = adjoints_.rbegin(); it != adjoints_.rend(); ++it) (*it)();

  Gradients out;
  out.ids_ = variables_;
  out.grads_.reserve(variables_.size());
  for (std::uint32_t id : variables_) {
    Node& n = nodes_[id];
    out.grads_.push_back(n.grad.empty() ? Tensor(n.value.shape(), 0.0) : std::move(n.grad));
  }
  consumed_ = true;
  adjoints_.clear();
  adjoints_.shrink_to_fit();
  return out;
}

}  // namespace vdf::ad
