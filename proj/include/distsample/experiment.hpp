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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "distsample/geometry.hpp"
#include "distsample/oracle.hpp"
#include "distsample/protocols.hpp"
#include "distsample/rng.hpp"
#include "distsample/statistics.hpp"

namespace distsample {

/// Trial k of a plan runs on RngStream(seed, first_index + k), so results do
/// not depend on how trials are spread over threads.
struct TrialPlan {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  unsigned threads = 1;
  std::uint64_t first_index = 0;
};

/// Runs fn(RngStream&) once per trial and returns results in trial order.
/// If trials throw, the exception of the lowest-indexed failing trial is
/// rethrown.
template <class Fn>
auto run_trials(const TrialPlan& plan, Fn&& fn) {
  using Result = std::decay_t<std::invoke_result_t<Fn&, RngStream&>>;
  std::vector<std::optional<Result>> slots(plan.trials);
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(plan.threads, 1, std::max<std::uint64_t>(plan.trials, 1)));
  std::vector<std::exception_ptr> errors(workers);

  auto work = [&](unsigned w) {
    const std::uint64_t begin = plan.trials * w / workers;
    const std::uint64_t end = plan.trials * (w + 1) / workers;
    try {
      for (std::uint64_t k = begin; k < end; ++k) {
        RngStream rng(plan.seed, plan.first_index + k);
        slots[k].emplace(fn(rng));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<Result> results;
  results.reserve(plan.trials);
  for (auto& s : slots) results.push_back(std::move(*s));
  return results;
}

/// A projective protocol as the CHSH harness sees it.
using SpinProtocol =
    std::function<SpinRun(const UnitVector3&, const UnitVector3&, RngStream&)>;

/// Runs `protocol` at fixed settings and summarizes the runs.
inline TrialStats simulate_spin(const SpinProtocol& protocol, const UnitVector3& a,
                                const UnitVector3& b, const TrialPlan& plan) {
  const auto runs = run_trials(plan, [&](RngStream& rng) { return protocol(a, b, rng); });
  return summarize_runs(runs);
}

struct ChshEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::array<double, 4> correlations{};  // E11, E12, E21, E22
  std::array<double, 4> std_errors{};
  ResourceMeans resources;  // pooled over all 4n runs
};

/// Estimates E_ij with n runs per setting pair (independent substreams per
/// pair) and combines them into C = E11 + E12 + E21 - E22.
inline ChshEstimate chsh_experiment(const SpinProtocol& protocol, const ChshSettings& settings,
                                    std::uint64_t n, std::uint64_t seed, unsigned threads = 1) {
  if (n < 1000) throw StatisticsError("chsh_experiment: need at least 1000 runs per pair");
  const std::array<std::pair<const UnitVector3*, const UnitVector3*>, 4> pairs{{
      {&settings.a1, &settings.b1},
      {&settings.a1, &settings.b2},
      {&settings.a2, &settings.b1},
      {&settings.a2, &settings.b2},
  }};
  static constexpr std::array<const char*, 4> kTags{"chsh/11", "chsh/12", "chsh/21", "chsh/22"};
  ChshEstimate out;
  double var = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    const TrialPlan plan{derive_seed(seed, kTags[k]), n, threads};
    const TrialStats s = simulate_spin(protocol, *pairs[k].first, *pairs[k].second, plan);
    out.correlations[k] = s.mean;
    out.std_errors[k] = s.std_error;
    var += s.std_error * s.std_error;
    const ResourceMeans& m = s.resources;
    ResourceMeans& r = out.resources;
    r.bits_a_to_b += m.bits_a_to_b / 4.0;
    r.bits_b_to_a += m.bits_b_to_a / 4.0;
    r.bits_total += m.bits_total / 4.0;
    r.nlbit_uses += m.nlbit_uses / 4.0;
    r.rounds += m.rounds / 4.0;
    r.raw_uniforms += m.raw_uniforms / 4.0;
    r.max_bits_total = std::max(r.max_bits_total, m.max_bits_total);
    r.max_rounds = std::max(r.max_rounds, m.max_rounds);
  }
  out.value = chsh_value(out.correlations[0], out.correlations[1], out.correlations[2],
                         out.correlations[3]);
  out.std_error = std::sqrt(var);
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic local strategies
// ---------------------------------------------------------------------------

struct HiddenPair {
  UnitVector3 lambda0;
  UnitVector3 lambda1;
};

/// Outputs are deterministic functions of (own setting, shared hidden pair).
struct LocalStrategy {
  std::string name;
  std::function<int(const UnitVector3&, const HiddenPair&)> alice;
  std::function<int(const UnitVector3&, const HiddenPair&)> bob;
};

inline std::vector<LocalStrategy> builtin_local_strategies() {
  return {
      {"werner",
       [](const UnitVector3& a, const HiddenPair& h) {
         return -sgn(dot(a, h.lambda0.vec() + h.lambda1.vec()));
       },
       [](const UnitVector3& b, const HiddenPair& h) { return sgn(dot(b, h.lambda0)); }},
      {"sign",
       [](const UnitVector3& a, const HiddenPair& h) { return -sgn(dot(a, h.lambda0)); },
       [](const UnitVector3& b, const HiddenPair& h) { return sgn(dot(b, h.lambda0)); }},
      {"parity",
       [](const UnitVector3& a, const HiddenPair& h) {
         return sgn(dot(a, h.lambda0)) * sgn(dot(a, h.lambda1));
       },
       [](const UnitVector3& b, const HiddenPair& h) { return -sgn(dot(b, h.lambda1)); }},
      {"fixed_axis",
       [](const UnitVector3& a, const HiddenPair&) { return sgn(a.z()); },
       [](const UnitVector3& b, const HiddenPair&) { return -sgn(b.x()); }},
  };
}

/// CHSH of a local strategy with one hidden pair per trial shared by all
/// four setting pairs. Per trial the CHSH sum is exactly +-2, so the
/// estimate obeys |C| <= 2 without statistical slack.
inline double chsh_local_strategy(const LocalStrategy& strategy, const ChshSettings& s,
                                  const TrialPlan& plan) {
  const auto per_trial = run_trials(plan, [&](RngStream& rng) -> std::int64_t {
    const HiddenPair h{sample_uniform_sphere(rng), sample_uniform_sphere(rng)};
    const int a1 = strategy.alice(s.a1, h);
    const int a2 = strategy.alice(s.a2, h);
    const int b1 = strategy.bob(s.b1, h);
    const int b2 = strategy.bob(s.b2, h);
    return a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2;
  });
  std::int64_t total = 0;
  for (const auto c : per_trial) total += c;
  return static_cast<double>(total) / static_cast<double>(plan.trials);
}

}  // namespace distsample
