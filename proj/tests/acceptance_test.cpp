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

// Runs the full acceptance suite at the default seed and prints one line per
// criterion. Also checks the suite is reproducible and that it catches
// broken protocol implementations.

#include <gtest/gtest.h>

#include <iostream>

#include "distsample/acceptance.hpp"

namespace distsample {
namespace {

const AcceptanceReport& baseline() {
  static const AcceptanceReport report = run_acceptance(AcceptanceOptions{});
  return report;
}

TEST(Acceptance, EveryCriterionPasses) {
  const AcceptanceReport& report = baseline();
  std::cout << report.render();
  ASSERT_EQ(report.criteria.size(), 10u);
  for (const auto& c : report.criteria) {
    EXPECT_TRUE(c.pass) << "criterion " << c.id << " failed: " << c.title;
  }
  for (const auto& line : report.checks) {
    EXPECT_TRUE(line.verdict.pass)
        << "[" << line.criterion << "] " << line.verdict.test_name << " stat="
        << line.verdict.statistic << " thr=" << line.verdict.threshold;
  }
}

TEST(Acceptance, ReportIsByteIdenticalOnRepeatAndAcrossThreadCounts) {
  AcceptanceOptions repeat;
  EXPECT_EQ(run_acceptance(repeat).render(), baseline().render());
  AcceptanceOptions threaded;
  threaded.threads = 4;
  EXPECT_EQ(run_acceptance(threaded).render(), baseline().render());
}

bool criterion_passes(const AcceptanceReport& r, int id) {
  for (const auto& c : r.criteria) {
    if (c.id == id) return c.pass;
  }
  ADD_FAILURE() << "no criterion " << id;
  return true;
}

TEST(AcceptanceMutation, BobIgnoringTheMessageIsCaught) {
  AcceptanceOptions o;
  o.protocols.communication = [](const UnitVector3& a, const UnitVector3& b, RngStream& rng) {
    const UnitVector3 l0 = sample_uniform_sphere(rng);
    const UnitVector3 l1 = sample_uniform_sphere(rng);
    const ChoiceResult c = choice_sample(a, l0, l1);
    SpinRun run;
    run.outcome = {to_spin(-sgn(dot(a, c.sample))), to_spin(sgn(dot(b, l0)))};
    run.ledger.bits_a_to_b = 1;
    run.ledger.raw_uniforms = 4;
    return run;
  };
  const AcceptanceReport r = run_acceptance(o);
  EXPECT_FALSE(r.all_pass());
  EXPECT_FALSE(criterion_passes(r, 1));
}

TEST(AcceptanceMutation, WernerAtFullVisibilityIsCaught) {
  AcceptanceOptions o;
  o.protocols.werner = [](const UnitVector3& a, const UnitVector3& b, RngStream& rng) {
    return run_communication(a, b, rng);  // correct singlet, wrong model
  };
  const AcceptanceReport r = run_acceptance(o);
  EXPECT_FALSE(r.all_pass());
  EXPECT_FALSE(criterion_passes(r, 3));
}

TEST(AcceptanceMutation, BoxBobIgnoringBetaIsCaught) {
  AcceptanceOptions o;
  o.protocols.nlbox = [](const UnitVector3& a, const UnitVector3& b, RngStream& rng, NlBox& box) {
    const UnitVector3 l0 = sample_uniform_sphere(rng);
    const UnitVector3 l1 = sample_uniform_sphere(rng);
    const ChoiceResult c = choice_sample(a, l0, l1);
    const BoxOutput out = box.query(c.chosen_index == 1, sgn(dot(b, l0)) != sgn(dot(b, l1)));
    const UnitVector3 lambda_s = out.alpha ? -c.sample : c.sample;
    const FSample f{sgn(dot(a, lambda_s)), sgn(dot(b, l0))};  // beta dropped
    ResourceLedger ledger;
    ledger.nlbit_uses = 1;
    ledger.raw_uniforms = kNlBoxDraws + 1;
    return NlBoxRun{f, fsample_to_epr(f), ledger, lambda_s, l0};
  };
  const AcceptanceReport r = run_acceptance(o);
  EXPECT_FALSE(r.all_pass());
  EXPECT_FALSE(criterion_passes(r, 2));
}

TEST(AcceptanceMutation, PovmTestAcceptingEveryRoundIsCaught) {
  AcceptanceOptions o;
  o.protocols.povm = [](const PovmSpec& pa, const PovmSpec& pb, PovmVariant v, RngStream& rng) {
    PovmRun r = run_povm(pa, pb, v, rng);
    if (v == PovmVariant::communication) {
      // Skip the POVM test: output the first round's elements.
      RngStream fresh(rng.seed(), rng.index());
      const std::size_t i = sample_povm_element(pa, fresh);
      const std::size_t j = sample_povm_element(pb, fresh);
      r.outcome = {i, j};
      r.ledger.rounds = 1;
      r.ledger.bits_a_to_b = 2;
      r.ledger.bits_b_to_a = 1;
    }
    return r;
  };
  const AcceptanceReport r = run_acceptance(o);
  EXPECT_FALSE(r.all_pass());
  EXPECT_FALSE(criterion_passes(r, 8));
}

}  // namespace
}  // namespace distsample
