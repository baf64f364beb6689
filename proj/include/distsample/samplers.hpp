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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "distsample/geometry.hpp"

namespace distsample {

/// Density |a.lambda| / 2pi of the biased law rho_a on S2.
inline double biased_density(const UnitVector3& a, const UnitVector3& lambda) {
  return std::abs(dot(a, lambda)) / (2.0 * std::numbers::pi);
}

struct RejectionResult {
  UnitVector3 sample;
  /// Candidates examined, including the accepted one (>= 1).
  std::uint64_t iterations;

  /// 0-based position of the accepted candidate on the shared tape.
  std::uint64_t accepted_index() const { return iterations - 1; }
};

struct ChoiceResult {
  UnitVector3 sample;
  int chosen_index;  // 0 or 1
};

inline constexpr std::uint64_t kRejectionIterationCap = 1'000'000;

/// Raw uniforms consumed per rejection iteration: a sphere point and u.
inline constexpr int kRejectionDrawsPerIteration = kSphereDraws + 1;

class IterationCapExceeded : public std::runtime_error {
 public:
  explicit IterationCapExceeded(std::uint64_t cap)
      : std::runtime_error("rejection sampler exhausted its iteration cap of " +
                           std::to_string(cap)),
        cap_(cap) {}
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t cap_;
};

/// Rejection method for rho_a: draw lambda_k uniform and u_k ~ U[0,1],
/// accept the first lambda_k with u_k <= |a.lambda_k|.
template <UniformSource G>
RejectionResult rejection_sample(const UnitVector3& a, G& rng,
                                 std::uint64_t cap = kRejectionIterationCap) {
  for (std::uint64_t k = 0; k < cap; ++k) {
    const UnitVector3 candidate = sample_uniform_sphere(rng);
    const double u = rng.uniform();
    if (u <= std::abs(dot(a, candidate))) {
      return {candidate, k + 1};
    }
  }
  throw IterationCapExceeded(cap);
}

/// Choice method: keep lambda0 iff |a.lambda1| <= |a.lambda0| (ties go to 0).
/// Consumes no randomness of its own.
inline ChoiceResult choice_sample(const UnitVector3& a, const UnitVector3& lambda0,
                                  const UnitVector3& lambda1) {
  if (std::abs(dot(a, lambda1)) <= std::abs(dot(a, lambda0))) {
    return {lambda0, 0};
  }
  return {lambda1, 1};
}

/// Rejection over a shared tape (lambda_0, lambda_1, ...). Same law as
/// rejection_sample; the caller reads the index k to transmit.
template <UniformSource G>
RejectionResult steiner_sample(const UnitVector3& a, G& rng,
                               std::uint64_t cap = kRejectionIterationCap) {
  return rejection_sample(a, rng, cap);
}

}  // namespace distsample
