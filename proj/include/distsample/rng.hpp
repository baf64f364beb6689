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

#include <array>
#include <concepts>
#include <cstdint>
#include <string_view>

namespace distsample {

/// Source of i.i.d. uniforms on [0,1). Samplers are written against this so
/// tests can feed them scripted tapes.
template <class G>
concept UniformSource = requires(G& g) {
  { g.uniform() } -> std::convertible_to<double>;
};

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

}  // namespace detail

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with ten rounds (Salmon et al., SC'11).
constexpr PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{detail::kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{detail::kPhiloxM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += detail::kPhiloxW0;
    key[1] += detail::kPhiloxW1;
  }
  return ctr;
}

/// SplitMix64 finalizer; used only to derive per-experiment seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Derives an experiment seed from a master seed and a textual tag (FNV-1a
/// over the tag, then mixed). Portable: no std::hash.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return mix64(master ^ mix64(h));
}

/// Deterministic counter-based stream of uniforms.
///
/// The stream is fully determined by (seed, index, lane): the master seed is
/// the Philox key and the 128-bit counter is laid out as
///   word0..1 : block number (48 bits) | lane (16 bits)
///   word2..3 : stream index
/// so any trial's stream can be built directly without touching others.
/// Each Philox block yields two 53-bit doubles. `draws()` counts uniforms
/// handed out, which is what resource ledgers report.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index, std::uint16_t lane = 0)
      : seed_(seed), index_(index), lane_(lane) {}

  double uniform() {
    if (slot_ == 2) {
      refill();
    }
    const double u = buffer_[slot_++];
    ++draws_;
    return u;
  }

  /// A fresh stream sharing (seed, index) on another lane.
  RngStream lane(std::uint16_t lane) const { return RngStream(seed_, index_, lane); }

  std::uint64_t draws() const { return draws_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }
  std::uint16_t lane_id() const { return lane_; }

 private:
  void refill() {
    const PhiloxBlock ctr{
        static_cast<std::uint32_t>(block_),
        static_cast<std::uint32_t>((block_ >> 32) & 0xFFFFu) | (std::uint32_t{lane_} << 16),
        static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32)};
    const PhiloxKey key{static_cast<std::uint32_t>(seed_),
                        static_cast<std::uint32_t>(seed_ >> 32)};
    const PhiloxBlock out = philox4x32_10(ctr, key);
    buffer_[0] = to_unit((std::uint64_t{out[0]} << 32) | out[1]);
    buffer_[1] = to_unit((std::uint64_t{out[2]} << 32) | out[3]);
    ++block_;
    slot_ = 0;
  }

  static double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed_;
  std::uint64_t index_;
  std::uint16_t lane_;
  std::uint64_t block_ = 0;
  std::uint64_t draws_ = 0;
  std::array<double, 2> buffer_{};
  int slot_ = 2;
};

static_assert(UniformSource<RngStream>);

}  // namespace distsample
