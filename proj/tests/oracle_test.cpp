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
#include <sstream>

#include "distsample/oracle.hpp"
#include "test_support.hpp"

namespace distsample {
namespace {

const double kSqrt2 = std::numbers::sqrt2;

TEST(SingletJoint, Examples) {
  const UnitVector3 z(0, 0, 1);
  const UnitVector3 x(1, 0, 0);
  const auto same = singlet_joint(z, z);
  EXPECT_EQ(same(1, 1), 0.0);
  EXPECT_EQ(same(-1, -1), 0.0);
  EXPECT_EQ(same(1, -1), 0.5);
  EXPECT_EQ(same(-1, 1), 0.5);
  for (const double p : singlet_joint(z, x).p) EXPECT_EQ(p, 0.25);
  const auto opposite = singlet_joint(z, -z);
  EXPECT_EQ(opposite(1, 1), 0.5);
  EXPECT_EQ(opposite(-1, -1), 0.5);
  EXPECT_EQ(opposite(1, -1), 0.0);
}

TEST(SingletJoint, NormalizedWithUniformMarginals) {
  RngStream rng(20, 0);
  for (int k = 0; k < 1000; ++k) {
    const auto d = singlet_joint(sample_uniform_sphere(rng), sample_uniform_sphere(rng));
    double sum = 0.0;
    for (const double p : d.p) {
      EXPECT_GE(p, 0.0);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (const int s : {1, -1}) {
      EXPECT_NEAR(d.marginal_alice(s), 0.5, 1e-12);
      EXPECT_NEAR(d.marginal_bob(s), 0.5, 1e-12);
    }
  }
}

TEST(SingletCorrelation, Examples) {
  const UnitVector3 z(0, 0, 1);
  EXPECT_EQ(singlet_correlation(z, z), -1.0);
  EXPECT_EQ(singlet_correlation(z, UnitVector3(1, 0, 0)), 0.0);
  EXPECT_NEAR(singlet_correlation(z, UnitVector3::in_xz_plane(std::numbers::pi / 3)), -0.5, 1e-15);
}

TEST(WernerCorrelation, Examples) {
  const UnitVector3 z(0, 0, 1);
  const UnitVector3 b = UnitVector3::normalized({1, 2, 3});
  EXPECT_EQ(werner_correlation(0.5, z, z), -0.5);
  EXPECT_EQ(werner_correlation(0.0, z, b), 0.0);
  EXPECT_EQ(werner_correlation(1.0, z, b), singlet_correlation(z, b));
  EXPECT_THROW(werner_correlation(1.5, z, b), std::invalid_argument);
  EXPECT_THROW(werner_correlation(-0.1, z, b), std::invalid_argument);
}

TEST(PovmJoint, ProjectiveCaseReproducesSinglet) {
  RngStream rng(21, 0);
  for (int k = 0; k < 100; ++k) {
    const UnitVector3 a = sample_uniform_sphere(rng);
    const UnitVector3 b = sample_uniform_sphere(rng);
    const PovmSpec pa = PovmSpec::projective(a);
    const PovmSpec pb = PovmSpec::projective(b);
    const auto d = singlet_joint(a, b);
    // element 0 is the +1 outcome, element 1 the -1 outcome
    EXPECT_NEAR(povm_joint(pa, pb, 0, 0), d(1, 1), 1e-12);
    EXPECT_NEAR(povm_joint(pa, pb, 0, 1), d(1, -1), 1e-12);
    EXPECT_NEAR(povm_joint(pa, pb, 1, 0), d(-1, 1), 1e-12);
    EXPECT_NEAR(povm_joint(pa, pb, 1, 1), d(-1, -1), 1e-12);
  }
}

TEST(PovmJoint, ParallelHalfNormElementsGiveZero) {
  const PovmSpec p = PovmSpec::from_vectors({{0, 0, 0.5}, {0, 0, -0.5}, {0.5, 0, 0}, {-0.5, 0, 0}});
  EXPECT_EQ(povm_joint(p, p, 0, 0), 0.0);
  EXPECT_THROW(povm_joint(p, p, 4, 0), std::out_of_range);
  EXPECT_THROW(povm_marginal(p, 7), std::out_of_range);
}

// Brute force from the raw tetrahedron, independent of PovmSpec.
TEST(PovmJoint, TetrahedralSicClosure) {
  const double s = 0.5 / std::sqrt(3.0);
  const Vec3 v[4] = {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(norm(v[i]), 0.5, 1e-15);
    for (int j = 0; j < 4; ++j) {
      const double p = (norm(v[i]) * norm(v[j]) - dot(v[i], v[j])) / 4.0;
      total += p;
      EXPECT_NEAR(p, i == j ? 0.0 : 1.0 / 12.0, 1e-15);
      if (i != j) {
        EXPECT_NEAR(dot(v[i], v[j]), -1.0 / 12.0, 1e-15);
      }
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-14);

  const PovmSpec sic = tetrahedral_sic_povm();
  ASSERT_EQ(sic.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(povm_marginal(sic, i), 0.25, 1e-15);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(povm_joint(sic, sic, i, j), i == j ? 0.0 : 1.0 / 12.0, 1e-15);
    }
  }
}

TEST(PovmJoint, RandomPovmsNormalizeAndMarginalize) {
  RngStream rng(22, 0);
  for (std::size_t r : {2u, 3u, 4u, 5u, 6u, 7u, 8u, 10u, 12u, 16u}) {
    const PovmSpec pa = testing::random_povm(r, rng);
    const PovmSpec pb = testing::random_povm(r + 1, rng);
    double total = 0.0;
    double marginal_sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < pb.size(); ++j) row += povm_joint(pa, pb, i, j);
      EXPECT_NEAR(row, povm_marginal(pa, i), 1e-9);
      total += row;
      marginal_sum += povm_marginal(pa, i);
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_NEAR(marginal_sum, 1.0, 1e-9);
  }
}

TEST(PovmSpec, ValidationNamesTheViolatedCondition) {
  auto condition = [](const std::vector<Vec3>& v) {
    try {
      PovmSpec::from_vectors(v);
    } catch (const PovmError& e) {
      return e.condition();
    }
    ADD_FAILURE() << "expected PovmError";
    return PovmCondition::parse;
  };
  EXPECT_EQ(condition({{0, 0, 1}}), PovmCondition::too_few_elements);
  EXPECT_EQ(condition({{0, 0, 1.5}, {0, 0, -0.5}}), PovmCondition::outside_ball);
  EXPECT_EQ(condition({{0, 0, 1}, {0, 0, -1}, {0, 0, 0}}), PovmCondition::zero_element);
  EXPECT_EQ(condition({{0, 0, 0.5}, {0, 0, -0.5}}), PovmCondition::norm_sum);
  EXPECT_EQ(condition({{0, 0, 1}, {1, 0, 0}}), PovmCondition::vector_sum);
}

TEST(PovmSpec, ToleranceIsOneInABillion) {
  EXPECT_NO_THROW(PovmSpec::from_vectors({{0, 0, 1}, {0, 0, -(1 - 5e-10)}}));
  EXPECT_THROW(PovmSpec::from_vectors({{0, 0, 1}, {0, 0, -(1 - 1e-8)}}), PovmError);
}

TEST(PovmSpec, ParsesTextFormat) {
  const PovmSpec p = PovmSpec::parse(
      "# projective along z\n"
      "\n"
      "0 0 1   # up\n"
      "0, 0, -1\n");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.element(1).z(), -1.0);
}

TEST(PovmSpec, ParseErrors) {
  for (const char* text : {"0 0 1\n0 0\n", "0 0 1\n0 0 -1x\n", "0 0 1\n0 0 -1 4\n"}) {
    try {
      PovmSpec::parse(std::string_view(text));
      ADD_FAILURE() << "accepted: " << text;
    } catch (const PovmError& e) {
      EXPECT_EQ(e.condition(), PovmCondition::parse);
    }
  }
  EXPECT_THROW(PovmSpec::load("/nonexistent/povm.txt"), PovmError);
}

TEST(ChshValue, Examples) {
  EXPECT_EQ(chsh_value(-1, -1, -1, -1), -2.0);
  EXPECT_EQ(chsh_value(0, 0, 0, 0), 0.0);
  static_assert(chsh_value(1, 1, 1, -1) == 4.0);
}

TEST(ChshOptimalSettings, ReachTsirelsonBound) {
  EXPECT_NEAR(singlet_chsh(chsh_optimal_settings()), 2.0 * kSqrt2, 1e-9);
  EXPECT_NEAR(2.0 * kSqrt2, 2.828427, 1e-6);
}

// Independent oracle: grid search of coplanar settings with a1 fixed at 0
// (C depends only on angle differences). Optimal angles are multiples of
// 45 degrees, so a 5-degree grid contains them.
TEST(ChshOptimalSettings, MatchNumericalMaximum) {
  auto c = [](double a1, double a2, double b1, double b2) {
    auto e = [](double x, double y) { return -std::cos(x - y); };
    return e(a1, b1) + e(a1, b2) + e(a2, b1) - e(a2, b2);
  };
  constexpr double deg = std::numbers::pi / 180.0;
  double best = -10.0;
  for (int a2 = 0; a2 < 360; a2 += 5) {
    for (int b1 = 0; b1 < 360; b1 += 5) {
      for (int b2 = 0; b2 < 360; b2 += 5) {
        best = std::max(best, c(0.0, a2 * deg, b1 * deg, b2 * deg));
      }
    }
  }
  EXPECT_NEAR(best, 2.0 * kSqrt2, 1e-12);
  EXPECT_NEAR(singlet_chsh(chsh_optimal_settings()), best, 1e-9);
  EXPECT_NEAR(c(0, 90 * deg, 225 * deg, 135 * deg), best, 1e-12);
}

TEST(ChshOptimalSettings, InvariantUnderCommonRotation) {
  const ChshSettings s = chsh_optimal_settings();
  RngStream rng(23, 0);
  for (int k = 0; k < 20; ++k) {
    const testing::Rotation R =
        testing::axis_angle(sample_uniform_sphere(rng).vec(), 6.0 * rng.uniform());
    const ChshSettings r{R.apply(s.a1), R.apply(s.a2), R.apply(s.b1), R.apply(s.b2)};
    EXPECT_NEAR(singlet_chsh(r), singlet_chsh(s), 1e-9);
  }
}

TEST(ChshOptimalSettings, SwappingBobsSettingsLosesTheMaximum) {
  const ChshSettings s = chsh_optimal_settings();
  const ChshSettings swapped{s.a1, s.a2, s.b2, s.b1};
  EXPECT_GT(std::abs(std::abs(singlet_chsh(swapped)) - 2.0 * kSqrt2), 0.1);
}

TEST(Chsh, TsirelsonBoundOverRandomSettings) {
  RngStream rng(24, 0);
  for (int k = 0; k < 10'000; ++k) {
    const ChshSettings s{sample_uniform_sphere(rng), sample_uniform_sphere(rng),
                         sample_uniform_sphere(rng), sample_uniform_sphere(rng)};
    const double c = singlet_chsh(s);
    ASSERT_LE(std::abs(c), 2.0 * kSqrt2 + 1e-12);
    ASSERT_LE(std::abs(c), 4.0);
  }
}

}  // namespace
}  // namespace distsample
