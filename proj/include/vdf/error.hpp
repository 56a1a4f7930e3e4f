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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vdf {

// Operand shapes disagree (binary ops, conv channel counts, state vs frame).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter lies outside its documented domain (radius, scale, quality...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// File system or codec failure; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical abort: non-finite loss, divergence during training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misuse of a reverse-mode tape (non-scalar output, reuse after backward).
class TapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A per-frame failure inside the video loop; wraps the original message.
class FrameError : public std::runtime_error {
 public:
  FrameError(std::size_t frame, const std::string& what)
      : std::runtime_error("frame " + std::to_string(frame) + ": " + what), frame_(frame) {}
  std::size_t frame() const { return frame_; }

 private:
  std::size_t frame_;
};

}  // namespace vdf
