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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "distsample/samplers.hpp"
#include "distsample/statistics.hpp"
#include "test_support.hpp"

namespace distsample {
namespace {

constexpr int kN = 100'000;

TEST(BiasedDensity, Examples) {
  const UnitVector3 z(0, 0, 1);
  EXPECT_NEAR(biased_density(z, z), 1.0 / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(biased_density(z, z), 0.159155, 1e-6);
  EXPECT_EQ(biased_density(z, UnitVector3(1, 0, 0)), 0.0);
  EXPECT_EQ(biased_density(z, -z), biased_density(z, z));
}

// Monte Carlo quadrature over uniform lambda: 4 pi E[rho_a] = 1.
TEST(BiasedDensity, IntegratesToOne) {
  const UnitVector3 a = UnitVector3::normalized({0.3, 0.4, -0.5});
  RngStream rng(10, 0);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int k = 0; k < n; ++k) sum += biased_density(a, sample_uniform_sphere(rng));
  EXPECT_NEAR(4.0 * std::numbers::pi * sum / n, 1.0, 0.01);
}

TEST(RejectionSample, IterationsGeometricWithMeanTwo) {
  const UnitVector3 a = UnitVector3::normalized({1, 1, 0});
  RngStream rng(11, 0);
  double total = 0.0;
  std::uint64_t first_try = 0;
  for (int k = 0; k < kN; ++k) {
    const std::uint64_t before = rng.draws();
    const RejectionResult r = rejection_sample(a, rng);
    ASSERT_GE(r.iterations, 1u);
    ASSERT_EQ(rng.draws() - before, r.iterations * kRejectionDrawsPerIteration);
    total += static_cast<double>(r.iterations);
    first_try += r.iterations == 1;
  }
  EXPECT_NEAR(total / kN, 2.0, 0.02);
  EXPECT_TRUE(proportion_within("P(first try)", first_try, kN, 0.5).pass);
}

TEST(RejectionSample, ProjectionFollowsBiasedLaw) {
  const UnitVector3 a = UnitVector3::normalized({-0.2, 0.9, 0.1});
  RngStream rng(12, 0);
  std::vector<double> t(kN);
  for (auto& x : t) x = dot(a, rejection_sample(a, rng).sample);
  EXPECT_TRUE(ks_axial_test(t, AxialLaw::biased).pass);
  EXPECT_FALSE(ks_axial_test(t, AxialLaw::uniform).pass);
}

TEST(RejectionSample, AzimuthAboutAxisUniform) {
  const UnitVector3 a = UnitVector3::normalized({0.4, -0.4, 0.8});
  const auto [e1, e2] = orthonormal_frame(a);
  RngStream rng(13, 0);
  std::vector<double> phi(kN);
  for (auto& p : phi) {
    const UnitVector3 s = rejection_sample(a, rng).sample;
    p = std::atan2(dot(s, e2), dot(s, e1));
  }
  const auto counts = histogram(phi, -std::numbers::pi, std::numbers::pi, 16);
  const std::vector<double> expected(16, 1.0 / 16.0);
  const GofVerdict v = chi_square_gof(counts, expected, 1e-3);
  EXPECT_TRUE(v.pass) << v.statistic << " > " << v.threshold;
}

TEST(RejectionSample, CapExhaustionIsDistinct) {
  // z = 2 * 0.75 - 1 = 0.5 = |a.lambda| < u = 0.75 on every iteration.
  testing::ConstantSource stuck{0.75};
  const UnitVector3 a(0, 0, 1);
  try {
    rejection_sample(a, stuck, 1000);
    FAIL() << "expected IterationCapExceeded";
  } catch (const IterationCapExceeded& e) {
    EXPECT_EQ(e.cap(), 1000u);
  }
  EXPECT_THROW(rejection_sample(a, stuck), IterationCapExceeded);
  EXPECT_THROW(steiner_sample(a, stuck, 10), IterationCapExceeded);
}

TEST(ChoiceSample, ForcedExampleAndTie) {
  const UnitVector3 z(0, 0, 1);
  const UnitVector3 x(1, 0, 0);
  const ChoiceResult r = choice_sample(z, z, x);
  EXPECT_EQ(r.chosen_index, 0);
  EXPECT_EQ(r.sample, z);
  EXPECT_EQ(choice_sample(z, x, z).chosen_index, 1);
  // |a.lambda1| = |a.lambda0| resolves to index 0.
  EXPECT_EQ(choice_sample(z, z, -z).chosen_index, 0);
  EXPECT_EQ(choice_sample(z, x, UnitVector3(0, 1, 0)).chosen_index, 0);
}

TEST(ChoiceSample, IndexFairAndLawBiased) {
  const UnitVector3 a = UnitVector3::normalized({1, 2, 2});
  RngStream rng(14, 0);
  std::vector<double> t(kN);
  std::uint64_t zeros = 0;
  for (auto& x : t) {
    const UnitVector3 l0 = sample_uniform_sphere(rng);
    const UnitVector3 l1 = sample_uniform_sphere(rng);
    const ChoiceResult r = choice_sample(a, l0, l1);
    ASSERT_EQ(r.sample, r.chosen_index == 0 ? l0 : l1);
    zeros += r.chosen_index == 0;
    x = dot(a, r.sample);
  }
  EXPECT_TRUE(proportion_within("P(index 0)", zeros, kN, 0.5).pass);
  EXPECT_TRUE(ks_axial_test(t, AxialLaw::biased).pass);
  EXPECT_FALSE(ks_axial_test(t, AxialLaw::uniform).pass);
}

TEST(Samplers, RejectionAndChoiceEquidistributed) {
  const UnitVector3 a = UnitVector3::normalized({0.1, 0.2, 0.3});
  RngStream rj(15, 0);
  RngStream ch(15, 1);
  std::vector<double> t_rej(kN);
  std::vector<double> t_choice(kN);
  for (int k = 0; k < kN; ++k) {
    t_rej[k] = dot(a, rejection_sample(a, rj).sample);
    const UnitVector3 l0 = sample_uniform_sphere(ch);
    const UnitVector3 l1 = sample_uniform_sphere(ch);
    t_choice[k] = dot(a, choice_sample(a, l0, l1).sample);
  }
  const GofVerdict v =
      two_sample_chi_square(histogram(t_rej, -1, 1, 20), histogram(t_choice, -1, 1, 20), 1e-3);
  EXPECT_TRUE(v.pass) << v.statistic << " > " << v.threshold;
}

// R(choice_sample(a)) ~ choice_sample(Ra), compared through the projection
// on a probe direction unrelated to a.
TEST(Samplers, ChoiceRotationEquivariant) {
  const UnitVector3 a = UnitVector3::normalized({0.0, 0.6, 0.8});
  const testing::Rotation R = testing::axis_angle(UnitVector3::normalized({1, -1, 2}).vec(), 1.3);
  const UnitVector3 ra = R.apply(a);
  const UnitVector3 probe = UnitVector3::normalized({1, 0.3, -0.2});
  RngStream r1(16, 0);
  RngStream r2(16, 1);
  std::vector<double> rotated(kN);
  std::vector<double> direct(kN);
  for (int k = 0; k < kN; ++k) {
    {
      const UnitVector3 l0 = sample_uniform_sphere(r1);
      const UnitVector3 l1 = sample_uniform_sphere(r1);
      rotated[k] = dot(probe, R.apply(choice_sample(a, l0, l1).sample));
    }
    const UnitVector3 l0 = sample_uniform_sphere(r2);
    const UnitVector3 l1 = sample_uniform_sphere(r2);
    direct[k] = dot(probe, choice_sample(ra, l0, l1).sample);
  }
  const GofVerdict v =
      two_sample_chi_square(histogram(rotated, -1, 1, 20), histogram(direct, -1, 1, 20), 1e-3);
  EXPECT_TRUE(v.pass) << v.statistic << " > " << v.threshold;
}

TEST(SteinerSample, IndexMeanOneAndLaw) {
  const UnitVector3 a = UnitVector3::normalized({-1, 0, 1});
  RngStream rng(17, 0);
  double sum_k = 0.0;
  std::uint64_t k0 = 0;
  std::vector<double> t(kN);
  for (auto& x : t) {
    const RejectionResult r = steiner_sample(a, rng);
    sum_k += static_cast<double>(r.accepted_index());
    k0 += r.accepted_index() == 0;
    x = dot(a, r.sample);
  }
  EXPECT_NEAR(sum_k / kN, 1.0, 0.02);
  EXPECT_TRUE(proportion_within("P(k=0)", k0, kN, 0.5).pass);
  EXPECT_TRUE(ks_axial_test(t, AxialLaw::biased).pass);
}

}  // namespace
}  // namespace distsample
