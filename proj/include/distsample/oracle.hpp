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
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "distsample/geometry.hpp"

namespace distsample {

// ---------------------------------------------------------------------------
// Projective measurements on the singlet
// ---------------------------------------------------------------------------

/// p(A,B) for A,B in {+1,-1}.
struct JointSpinDistribution {
  // Cells ordered (+,+), (+,-), (-,+), (-,-).
  std::array<double, 4> p{};

  static constexpr std::size_t cell(int a, int b) {
    return static_cast<std::size_t>((a > 0 ? 0 : 2) + (b > 0 ? 0 : 1));
  }
  double operator()(int a, int b) const { return p[cell(a, b)]; }
  double marginal_alice(int a) const { return (*this)(a, 1) + (*this)(a, -1); }
  double marginal_bob(int b) const { return (*this)(1, b) + (*this)(-1, b); }
};

/// p(A,B) = (1 - AB a.b) / 4.
inline JointSpinDistribution singlet_joint(const UnitVector3& a, const UnitVector3& b) {
  const double ab = dot(a, b);
  JointSpinDistribution d;
  for (const int sa : {1, -1}) {
    for (const int sb : {1, -1}) {
      d.p[JointSpinDistribution::cell(sa, sb)] = (1.0 - sa * sb * ab) / 4.0;
    }
  }
  return d;
}

/// E(AB) = -a.b
inline double singlet_correlation(const UnitVector3& a, const UnitVector3& b) {
  return -dot(a, b);
}

/// E(AB) = -p a.b for the Werner state of visibility p.
inline double werner_correlation(double visibility, const UnitVector3& a, const UnitVector3& b) {
  if (!(visibility >= 0.0 && visibility <= 1.0)) {
    throw std::invalid_argument("werner_correlation: visibility must lie in [0,1]");
  }
  return -visibility * dot(a, b);
}

// ---------------------------------------------------------------------------
// Rank-one qubit POVMs
// ---------------------------------------------------------------------------

enum class PovmCondition {
  parse,
  too_few_elements,
  zero_element,
  outside_ball,
  norm_sum,    // sum_i |a_i| = 2
  vector_sum,  // sum_i a_i = 0
};

inline std::string_view to_string(PovmCondition c) {
  switch (c) {
    case PovmCondition::parse: return "parse";
    case PovmCondition::too_few_elements: return "too_few_elements";
    case PovmCondition::zero_element: return "zero_element";
    case PovmCondition::outside_ball: return "outside_ball";
    case PovmCondition::norm_sum: return "norm_sum";
    case PovmCondition::vector_sum: return "vector_sum";
  }
  return "unknown";
}

class PovmError : public std::invalid_argument {
 public:
  PovmError(PovmCondition condition, double residual, const std::string& what)
      : std::invalid_argument(what), condition_(condition), residual_(residual) {}

  PovmCondition condition() const { return condition_; }
  /// Size of the violation (0 for parse errors).
  double residual() const { return residual_; }

 private:
  PovmCondition condition_;
  double residual_;
};

/// A rank-one qubit POVM as Bloch-ball vectors with sum |a_i| = 2 and
/// sum a_i = 0. Only constructible through validation.
class PovmSpec {
 public:
  static constexpr double kTolerance = 1e-9;

  static PovmSpec from_vectors(const std::vector<Vec3>& elements) {
    if (elements.size() < 2) {
      throw PovmError(PovmCondition::too_few_elements, static_cast<double>(elements.size()),
                      "POVM needs at least 2 elements, got " + std::to_string(elements.size()));
    }
    std::vector<BallVector3> checked;
    checked.reserve(elements.size());
    double norm_sum = 0.0;
    Vec3 vector_sum{};
    for (std::size_t i = 0; i < elements.size(); ++i) {
      const Vec3& v = elements[i];
      const double n = norm(v);
      if (!is_finite(v) || n > 1.0 + BallVector3::kTolerance) {
        throw PovmError(PovmCondition::outside_ball, n - 1.0,
                        "POVM element " + std::to_string(i + 1) +
                            " lies outside the Bloch ball (|a| - 1 = " + format(n - 1.0) + ")");
      }
      if (!(n > 0.0)) {
        throw PovmError(PovmCondition::zero_element, 0.0,
                        "POVM element " + std::to_string(i + 1) + " is the zero vector");
      }
      checked.emplace_back(v);
      norm_sum += n;
      vector_sum = vector_sum + v;
    }
    const double norm_residual = norm_sum - 2.0;
    if (std::abs(norm_residual) > kTolerance) {
      throw PovmError(PovmCondition::norm_sum, norm_residual,
                      "POVM violates sum |a_i| = 2 (residual " + format(norm_residual) + ")");
    }
    const double sum_residual =
        std::max({std::abs(vector_sum.x), std::abs(vector_sum.y), std::abs(vector_sum.z)});
    if (sum_residual > kTolerance) {
      throw PovmError(PovmCondition::vector_sum, sum_residual,
                      "POVM violates sum a_i = 0 (max component residual " +
                          format(sum_residual) + ")");
    }
    return PovmSpec(std::move(checked));
  }

  /// Text format: one element per line as three floats separated by
  /// whitespace or commas; '#' starts a comment; blank lines are skipped.
  static PovmSpec parse(std::istream& in) {
    std::vector<Vec3> elements;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      for (char& c : line) {
        if (c == ',') c = ' ';
      }
      std::istringstream fields(line);
      std::vector<double> values;
      std::string token;
      while (fields >> token) {
        std::size_t used = 0;
        double value = 0.0;
        try {
          value = std::stod(token, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != token.size()) {
          throw PovmError(PovmCondition::parse, 0.0,
                          "line " + std::to_string(line_no) + ": not a number: '" + token + "'");
        }
        values.push_back(value);
      }
      if (values.empty()) continue;
      if (values.size() != 3) {
        throw PovmError(PovmCondition::parse, 0.0,
                        "line " + std::to_string(line_no) + ": expected 3 components, got " +
                            std::to_string(values.size()));
      }
      elements.push_back({values[0], values[1], values[2]});
    }
    return from_vectors(elements);
  }

  static PovmSpec parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse(in);
  }

  static PovmSpec load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw PovmError(PovmCondition::parse, 0.0, "cannot open POVM file '" + path + "'");
    }
    return parse(in);
  }

  /// Projective measurement {a, -a}.
  static PovmSpec projective(const UnitVector3& a) { return from_vectors({a.vec(), -a.vec()}); }

  std::size_t size() const { return elements_.size(); }
  const BallVector3& element(std::size_t i) const { return elements_.at(i); }
  const std::vector<BallVector3>& elements() const { return elements_; }

 private:
  explicit PovmSpec(std::vector<BallVector3> elements) : elements_(std::move(elements)) {}

  static std::string format(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
  }

  std::vector<BallVector3> elements_;
};

/// The tetrahedral SIC POVM: four elements of norm 1/2 at the vertices of a
/// regular tetrahedron.
inline PovmSpec tetrahedral_sic_povm() {
  const double s = 0.5 / std::sqrt(3.0);
  return PovmSpec::from_vectors(
      {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}});
}

/// p(i,j) = (|a_i||b_j| - a_i.b_j) / 4 (indices 0-based).
inline double povm_joint(const PovmSpec& alice, const PovmSpec& bob, std::size_t i,
                         std::size_t j) {
  const BallVector3& ai = alice.element(i);
  const BallVector3& bj = bob.element(j);
  return std::max(0.0, (ai.length() * bj.length() - dot(ai, bj)) / 4.0);
}

/// p(i) = |a_i| / 2 (index 0-based).
inline double povm_marginal(const PovmSpec& povm, std::size_t i) {
  return povm.element(i).length() / 2.0;
}

// ---------------------------------------------------------------------------
// CHSH
// ---------------------------------------------------------------------------

/// C = E11 + E12 + E21 - E22.
constexpr double chsh_value(double e11, double e12, double e21, double e22) {
  return e11 + e12 + e21 - e22;
}

struct ChshSettings {
  UnitVector3 a1;
  UnitVector3 a2;
  UnitVector3 b1;
  UnitVector3 b2;
};

/// Coplanar settings in the x-z plane: a1, a2 at 0 and 90 degrees, b1 and
/// b2 at 225 and 135 degrees. The singlet reaches C = +2 sqrt 2 here.
inline ChshSettings chsh_optimal_settings() {
  constexpr double deg = std::numbers::pi / 180.0;
  return {UnitVector3::in_xz_plane(0.0), UnitVector3::in_xz_plane(90.0 * deg),
          UnitVector3::in_xz_plane(225.0 * deg), UnitVector3::in_xz_plane(135.0 * deg)};
}

/// CHSH value of the singlet at the given settings.
inline double singlet_chsh(const ChshSettings& s) {
  return chsh_value(singlet_correlation(s.a1, s.b1), singlet_correlation(s.a1, s.b2),
                    singlet_correlation(s.a2, s.b1), singlet_correlation(s.a2, s.b2));
}

}  // namespace distsample
