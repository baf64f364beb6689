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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "distsample/geometry.hpp"
#include "distsample/nonlocal_box.hpp"
#include "distsample/oracle.hpp"
#include "distsample/rng.hpp"
#include "distsample/samplers.hpp"

namespace distsample {

/// Party output of a projective protocol; `abort` is the post-selection
/// symbol and only appears in protocols that declare it.
enum class Spin : std::int8_t { minus = -1, abort = 0, plus = 1 };

constexpr Spin to_spin(int s) { return s >= 0 ? Spin::plus : Spin::minus; }
constexpr int value(Spin s) { return static_cast<int>(s); }
constexpr bool is_abort(Spin s) { return s == Spin::abort; }

struct SpinOutcome {
  Spin alice = Spin::abort;
  Spin bob = Spin::abort;

  bool accepted() const { return !is_abort(alice) && !is_abort(bob); }
  friend bool operator==(const SpinOutcome&, const SpinOutcome&) = default;
};

/// Side resources consumed by one protocol run.
struct ResourceLedger {
  std::uint64_t bits_a_to_b = 0;
  std::uint64_t bits_b_to_a = 0;
  std::uint64_t nlbit_uses = 0;
  bool aborted_alice = false;
  bool aborted_bob = false;
  std::uint64_t raw_uniforms = 0;
  std::uint64_t rounds = 1;

  std::uint64_t total_bits() const { return bits_a_to_b + bits_b_to_a; }
  friend bool operator==(const ResourceLedger&, const ResourceLedger&) = default;
};

struct SpinRun {
  SpinOutcome outcome;
  ResourceLedger ledger;
  friend bool operator==(const SpinRun&, const SpinRun&) = default;
};

/// f-sample with f(x, y) = sgn(x.y): s_alice = f(a, lambda_s), s_bob = f(b, lambda_s).
struct FSample {
  int s_alice = 1;
  int s_bob = 1;
  friend bool operator==(const FSample&, const FSample&) = default;
};

struct NlBoxRun {
  FSample sample;
  SpinOutcome outcome;
  ResourceLedger ledger;
  // Diagnostics: the vectors each party ended with. Bob's computation never
  // reads lambda_s.
  UnitVector3 lambda_s;
  UnitVector3 lambda_bob;
};

/// Strong-sampling map between EPR outputs and f-samples: s_A = -A, s_B = B.
constexpr FSample epr_to_fsample(int alice, int bob) { return {-alice, bob}; }
constexpr SpinOutcome fsample_to_epr(const FSample& f) {
  return {to_spin(-f.s_alice), to_spin(f.s_bob)};
}

// Raw uniforms drawn from the protocol stream per run (box draws are
// metered separately and added to the ledger).
inline constexpr std::uint64_t kWernerDraws = 2 * kSphereDraws;
inline constexpr std::uint64_t kPostselectionDraws = kSphereDraws + 1;
inline constexpr std::uint64_t kSymmetrizedDraws = 2 + kSphereDraws + 1;
inline constexpr std::uint64_t kCommunicationDraws = 2 * kSphereDraws;
inline constexpr std::uint64_t kNlBoxDraws = 2 * kSphereDraws;

namespace detail {

inline SpinOutcome sign_outputs(const UnitVector3& a, const UnitVector3& b,
                                const UnitVector3& lambda_s) {
  return {to_spin(-sgn(dot(a, lambda_s))), to_spin(sgn(dot(b, lambda_s)))};
}

}  // namespace detail

/// Local hidden variable model for the Werner state at visibility 1/2.
/// A = -sgn(a.(lambda0 + lambda1)), B = sgn(b.lambda0). No communication.
inline SpinRun run_werner_lhv(const UnitVector3& a, const UnitVector3& b, RngStream& rng) {
  const std::uint64_t start = rng.draws();
  const UnitVector3 lambda0 = sample_uniform_sphere(rng);
  const UnitVector3 lambda1 = sample_uniform_sphere(rng);
  SpinRun run;
  run.outcome = {to_spin(-sgn(dot(a, lambda0.vec() + lambda1.vec()))),
                 to_spin(sgn(dot(b, lambda0)))};
  run.ledger.raw_uniforms = rng.draws() - start;
  return run;
}

/// Post-selection on Alice's side only: she aborts iff u > |a.lambda|.
/// Bob always answers sgn(b.lambda).
inline SpinRun run_postselection(const UnitVector3& a, const UnitVector3& b, RngStream& rng) {
  const std::uint64_t start = rng.draws();
  const UnitVector3 lambda = sample_uniform_sphere(rng);
  const double u = rng.uniform();
  SpinRun run;
  run.outcome = detail::sign_outputs(a, b, lambda);
  if (u > std::abs(dot(a, lambda))) {
    run.outcome.alice = Spin::abort;
    run.ledger.aborted_alice = true;
  }
  run.ledger.raw_uniforms = rng.draws() - start;
  return run;
}

/// Probability of the shared event that makes both parties abort in the
/// symmetrized post-selection protocol: q + (1 - q)/4 = 1/3.
inline constexpr double kJointAbortProbability = 1.0 / 9.0;

/// Role-symmetrized post-selection: a shared event of probability 1/9
/// aborts both parties; otherwise a shared fair coin picks the party who
/// runs the rejection test (and may abort), the other never aborts. Each
/// party aborts with probability 1/3. Always draws 5 uniforms.
inline SpinRun run_postselection_symmetrized(const UnitVector3& a, const UnitVector3& b,
                                             RngStream& rng) {
  const std::uint64_t start = rng.draws();
  const double joint_abort = rng.uniform();
  const double role = rng.uniform();
  const UnitVector3 lambda = sample_uniform_sphere(rng);
  const double u = rng.uniform();

  SpinRun run;
  run.ledger.raw_uniforms = rng.draws() - start;
  if (joint_abort < kJointAbortProbability) {
    run.outcome = {Spin::abort, Spin::abort};
    run.ledger.aborted_alice = run.ledger.aborted_bob = true;
    return run;
  }
  if (role < 0.5) {
    run.outcome = detail::sign_outputs(a, b, lambda);
    if (u > std::abs(dot(a, lambda))) {
      run.outcome.alice = Spin::abort;
      run.ledger.aborted_alice = true;
    }
  } else {
    // Bob samples rho_b; the singlet law is symmetric under exchanging parties.
    run.outcome = {to_spin(sgn(dot(a, lambda))), to_spin(-sgn(dot(b, lambda)))};
    if (u > std::abs(dot(b, lambda))) {
      run.outcome.bob = Spin::abort;
      run.ledger.aborted_bob = true;
    }
  }
  return run;
}

/// One bit of communication: Alice runs the choice method on a shared pair
/// and sends her choice bit x; both use lambda_x.
inline SpinRun run_communication(const UnitVector3& a, const UnitVector3& b, RngStream& rng) {
  const std::uint64_t start = rng.draws();
  const UnitVector3 lambda0 = sample_uniform_sphere(rng);
  const UnitVector3 lambda1 = sample_uniform_sphere(rng);

  // Alice's side.
  const ChoiceResult choice = choice_sample(a, lambda0, lambda1);
  const int message = choice.chosen_index;
  const Spin alice = to_spin(-sgn(dot(a, choice.sample)));

  // Bob's side: only the received bit and the shared pair.
  const UnitVector3& lambda_s = message == 0 ? lambda0 : lambda1;
  const Spin bob = to_spin(sgn(dot(b, lambda_s)));

  SpinRun run;
  run.outcome = {alice, bob};
  run.ledger.bits_a_to_b = 1;
  run.ledger.raw_uniforms = rng.draws() - start;
  return run;
}

enum class IndexEncoding { unary, elias_gamma };

/// Bits needed to send the tape index k (0-based).
/// unary: k zeros then a one (k + 1 bits); Elias gamma of k + 1.
constexpr std::uint64_t encoded_index_bits(std::uint64_t k, IndexEncoding encoding) {
  if (encoding == IndexEncoding::unary) return k + 1;
  std::uint64_t n = k + 1;
  std::uint64_t floor_log2 = 0;
  while (n >>= 1) ++floor_log2;
  return 2 * floor_log2 + 1;
}

struct SteinerRun {
  SpinRun run;
  std::uint64_t accepted_index;
};

/// Rejection sampling over the shared tape; Alice sends the index k of the
/// accepted sample. Communication is unbounded in the worst case.
inline SteinerRun run_steiner(const UnitVector3& a, const UnitVector3& b, RngStream& rng,
                              IndexEncoding encoding = IndexEncoding::unary) {
  const std::uint64_t start = rng.draws();
  const RejectionResult accepted = steiner_sample(a, rng);
  SteinerRun out;
  out.accepted_index = accepted.accepted_index();
  out.run.outcome = detail::sign_outputs(a, b, accepted.sample);
  out.run.ledger.bits_a_to_b = encoded_index_bits(out.accepted_index, encoding);
  out.run.ledger.raw_uniforms = rng.draws() - start;
  return out;
}

/// f-sampling with one PR box. Alice inputs her choice bit x, Bob inputs
/// y = [sgn(b.lambda0) != sgn(b.lambda1)]; Alice uses (-1)^alpha lambda_x and
/// Bob (-1)^beta lambda0. Outputs follow the strong-sampling map.
inline NlBoxRun run_nlbox(const UnitVector3& a, const UnitVector3& b, RngStream& rng,
                          NlBox& box) {
  const std::uint64_t start = rng.draws();
  const std::uint64_t box_draws = box.draws();
  const std::uint64_t box_uses = box.uses();

  const UnitVector3 lambda0 = sample_uniform_sphere(rng);
  const UnitVector3 lambda1 = sample_uniform_sphere(rng);
  NlBoxSession session(box);

  const ChoiceResult choice = choice_sample(a, lambda0, lambda1);
  session.alice_input(choice.chosen_index == 1);

  session.bob_input(sgn(dot(b, lambda0)) != sgn(dot(b, lambda1)));

  const UnitVector3 lambda_s = session.alice_output() ? -choice.sample : choice.sample;
  const UnitVector3 lambda_bob = session.bob_output() ? -lambda0 : lambda0;

  const FSample sample{sgn(dot(a, lambda_s)), sgn(dot(b, lambda_bob))};
  ResourceLedger ledger;
  ledger.nlbit_uses = box.uses() - box_uses;
  ledger.raw_uniforms = (rng.draws() - start) + (box.draws() - box_draws);
  return {sample, fsample_to_epr(sample), ledger, lambda_s, lambda_bob};
}

/// run_nlbox with a fresh box on lane 1 of the trial stream.
inline SpinRun run_nlbox_fresh(const UnitVector3& a, const UnitVector3& b, RngStream& rng) {
  NlBox box(rng.lane(1));
  const NlBoxRun r = run_nlbox(a, b, rng, box);
  return {r.outcome, r.ledger};
}

// ---------------------------------------------------------------------------
// POVMs
// ---------------------------------------------------------------------------

enum class PovmVariant { postselect, communication, nlbox_comm };

inline std::string_view to_string(PovmVariant v) {
  switch (v) {
    case PovmVariant::postselect: return "postselect";
    case PovmVariant::communication: return "communication";
    case PovmVariant::nlbox_comm: return "nlbox_comm";
  }
  return "unknown";
}

inline std::optional<PovmVariant> parse_povm_variant(std::string_view s) {
  if (s == "postselect") return PovmVariant::postselect;
  if (s == "communication") return PovmVariant::communication;
  if (s == "nlbox_comm" || s == "nlbox-comm") return PovmVariant::nlbox_comm;
  return std::nullopt;
}

/// Outcome indices are 0-based; nullopt is the abort symbol.
struct PovmOutcome {
  std::optional<std::size_t> alice;
  std::optional<std::size_t> bob;

  bool accepted() const { return alice.has_value() && bob.has_value(); }
  friend bool operator==(const PovmOutcome&, const PovmOutcome&) = default;
};

struct PovmRun {
  PovmOutcome outcome;
  ResourceLedger ledger;
};

inline constexpr std::uint64_t kPovmRoundCap = 10'000;
static_assert(kPovmRoundCap < 0xFFFF, "each nl-box round needs its own stream lane");

class RoundCapExceeded : public std::runtime_error {
 public:
  explicit RoundCapExceeded(std::uint64_t cap)
      : std::runtime_error("POVM protocol exhausted its round cap of " + std::to_string(cap)) {}
};

/// Inverse-CDF draw of i ~ |a_i|/2 over the elements in order. One uniform.
inline std::size_t sample_povm_element(const PovmSpec& povm, RngStream& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < povm.size(); ++i) {
    cumulative += povm_marginal(povm, i);
    if (u < cumulative) return i;
  }
  return povm.size() - 1;
}

/// POVM simulation: each round both parties draw an element by its
/// marginal, simulate the projective measurement along its direction, and
/// keep the round only when the spin outcomes pass the POVM test.
///   postselect    : inner symmetrized post-selection; a party aborts
///                   unless its own spin is +1. Single round.
///   communication : inner one-bit protocol, then A and B are exchanged
///                   (3 bits per round); repeat until A == B.
///   nlbox_comm    : inner PR-box protocol with a fresh box per round, then
///                   the same 2-bit exchange; repeat until A == B.
inline PovmRun run_povm(const PovmSpec& alice_povm, const PovmSpec& bob_povm,
                        PovmVariant variant, RngStream& rng,
                        std::uint64_t round_cap = kPovmRoundCap) {
  PovmRun out;
  out.ledger.rounds = 0;
  const std::uint64_t start = rng.draws();

  for (std::uint64_t round = 0; round < round_cap; ++round) {
    ++out.ledger.rounds;
    const std::size_t i = sample_povm_element(alice_povm, rng);
    const std::size_t j = sample_povm_element(bob_povm, rng);
    const UnitVector3 a = alice_povm.element(i).direction();
    const UnitVector3 b = bob_povm.element(j).direction();

    if (variant == PovmVariant::postselect) {
      const SpinRun inner = run_postselection_symmetrized(a, b, rng);
      if (inner.outcome.alice == Spin::plus) out.outcome.alice = i;
      if (inner.outcome.bob == Spin::plus) out.outcome.bob = j;
      out.ledger.aborted_alice = !out.outcome.alice.has_value();
      out.ledger.aborted_bob = !out.outcome.bob.has_value();
      out.ledger.raw_uniforms = rng.draws() - start;
      return out;
    }

    SpinRun inner;
    if (variant == PovmVariant::communication) {
      inner = run_communication(a, b, rng);
    } else {
      const auto lane = static_cast<std::uint16_t>(1 + round);
      NlBox box(rng.lane(lane));
      const NlBoxRun r = run_nlbox(a, b, rng, box);
      inner = {r.outcome, r.ledger};
      out.ledger.raw_uniforms += box.draws();
    }
    out.ledger.bits_a_to_b += inner.ledger.bits_a_to_b;
    out.ledger.bits_b_to_a += inner.ledger.bits_b_to_a;
    out.ledger.nlbit_uses += inner.ledger.nlbit_uses;

    // POVM test: Alice sends A, Bob sends B.
    out.ledger.bits_a_to_b += 1;
    out.ledger.bits_b_to_a += 1;
    if (inner.outcome.alice == inner.outcome.bob) {
      out.outcome = {i, j};
      out.ledger.raw_uniforms += rng.draws() - start;
      return out;
    }
  }
  throw RoundCapExceeded(round_cap);
}

}  // namespace distsample
