// Copyright 2026 The distsample Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "distsample/rng.hpp"

namespace distsample {

struct BoxOutput {
  bool alpha;
  bool beta;
};

/// PR non-local box: alpha uniform, beta = alpha xor (x and y).
///
/// Both inputs are supplied in one query; each query is one nl-bit. Protocol
/// code should go through NlBoxSession, which releases outputs only after
/// both parties have committed their inputs.
class NlBox {
 public:
  explicit NlBox(RngStream rng) : rng_(rng) {}

  BoxOutput query(bool x, bool y) {
    const bool alpha = rng_.uniform() < 0.5;
    ++uses_;
    return {alpha, alpha != (x && y)};
  }

  std::uint64_t uses() const { return uses_; }
  /// Uniforms drawn by the box so far (one per query).
  std::uint64_t draws() const { return rng_.draws(); }

 private:
  RngStream rng_;
  std::uint64_t uses_ = 0;
};

/// One use of a box split into its two halves. Each party inputs its bit
/// and can read only its own output, and only once both inputs are in.
class NlBoxSession {
 public:
  explicit NlBoxSession(NlBox& box) : box_(box) {}

  void alice_input(bool x) {
    if (x_) throw std::logic_error("NlBoxSession: Alice already supplied her input");
    x_ = x;
    maybe_fire();
  }

  void bob_input(bool y) {
    if (y_) throw std::logic_error("NlBoxSession: Bob already supplied his input");
    y_ = y;
    maybe_fire();
  }

  bool alice_output() const { return result().alpha; }
  bool bob_output() const { return result().beta; }

 private:
  void maybe_fire() {
    if (x_ && y_) out_ = box_.query(*x_, *y_);
  }

  const BoxOutput& result() const {
    if (!out_) throw std::logic_error("NlBoxSession: outputs requested before both inputs");
    return *out_;
  }

  NlBox& box_;
  std::optional<bool> x_;
  std::optional<bool> y_;
  std::optional<BoxOutput> out_;
};

}  // namespace distsample
