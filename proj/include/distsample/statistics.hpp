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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "distsample/protocols.hpp"

namespace distsample {

/// Outcome of a hypothesis test or tolerance check: pass <=> statistic <= threshold.
struct GofVerdict {
  std::string test_name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;

  static GofVerdict make(std::string name, double statistic, double threshold) {
    return {std::move(name), statistic, threshold, statistic <= threshold};
  }
};

class StatisticsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Row-major table of counts.
struct CountTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint64_t> counts;

  CountTable() = default;
  CountTable(std::size_t r, std::size_t c) : rows(r), cols(c), counts(r * c, 0) {}

  std::uint64_t& at(std::size_t r, std::size_t c) { return counts.at(r * cols + c); }
  std::uint64_t at(std::size_t r, std::size_t c) const { return counts.at(r * cols + c); }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto c : counts) t += c;
    return t;
  }
};

// ---------------------------------------------------------------------------
// Goodness of fit
// ---------------------------------------------------------------------------

/// Upper-tail quantile: P(X > q) = alpha for X ~ chi^2(df).
inline double chi_square_quantile(double df, double alpha) {
  const boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

inline constexpr double kZeroProbability = 1e-12;

/// Pearson chi-square against a fully specified distribution. Cells with
/// expected probability below kZeroProbability (rounding residue of an exact
/// zero) are outside the support: they must be empty and do not count
/// towards the degrees of freedom (support cells - 1).
inline GofVerdict chi_square_gof(std::span<const std::uint64_t> observed,
                                 std::span<const double> expected, double alpha,
                                 std::string name = "chi_square_gof") {
  if (observed.size() != expected.size()) {
    throw StatisticsError("chi_square_gof: observed and expected sizes differ");
  }
  double mass = 0.0;
  std::uint64_t n = 0;
  std::size_t support = 0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (expected[k] < -kZeroProbability) {
      throw StatisticsError("chi_square_gof: negative expected probability");
    }
    mass += expected[k];
    n += observed[k];
    if (expected[k] > kZeroProbability) {
      ++support;
    } else if (observed[k] != 0) {
      throw StatisticsError("chi_square_gof: cell " + std::to_string(k) +
                            " has zero expected probability but " +
                            std::to_string(observed[k]) + " observations");
    }
  }
  if (std::abs(mass - 1.0) > 1e-9) {
    throw StatisticsError("chi_square_gof: expected probabilities do not sum to 1");
  }
  if (support < 2 || n == 0) {
    throw StatisticsError("chi_square_gof: need at least 2 support cells and 1 observation");
  }
  double statistic = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (expected[k] <= kZeroProbability) continue;
    const double e = static_cast<double>(n) * expected[k];
    const double d = static_cast<double>(observed[k]) - e;
    statistic += d * d / e;
  }
  return GofVerdict::make(std::move(name), statistic,
                          chi_square_quantile(static_cast<double>(support - 1), alpha));
}

inline GofVerdict chi_square_gof(const CountTable& observed, std::span<const double> expected,
                                 double alpha, std::string name = "chi_square_gof") {
  return chi_square_gof(std::span<const std::uint64_t>(observed.counts), expected, alpha,
                        std::move(name));
}

/// Two-sample chi-square homogeneity test over shared bins; bins empty in
/// both samples are dropped. df = (non-empty bins - 1).
inline GofVerdict two_sample_chi_square(std::span<const std::uint64_t> first,
                                        std::span<const std::uint64_t> second, double alpha,
                                        std::string name = "two_sample_chi_square") {
  if (first.size() != second.size()) {
    throw StatisticsError("two_sample_chi_square: bin counts differ in length");
  }
  double n1 = 0.0;
  double n2 = 0.0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    n1 += static_cast<double>(first[k]);
    n2 += static_cast<double>(second[k]);
  }
  if (n1 == 0.0 || n2 == 0.0) throw StatisticsError("two_sample_chi_square: empty sample");
  const double k1 = std::sqrt(n2 / n1);
  const double k2 = std::sqrt(n1 / n2);
  double statistic = 0.0;
  std::size_t bins = 0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    const double total = static_cast<double>(first[k] + second[k]);
    if (total == 0.0) continue;
    ++bins;
    const double d = k1 * static_cast<double>(first[k]) - k2 * static_cast<double>(second[k]);
    statistic += d * d / total;
  }
  if (bins < 2) throw StatisticsError("two_sample_chi_square: need at least 2 occupied bins");
  return GofVerdict::make(std::move(name), statistic,
                          chi_square_quantile(static_cast<double>(bins - 1), alpha));
}

/// Equal-width histogram of values on [lo, hi]; the top edge falls in the last bin.
inline std::vector<std::uint64_t> histogram(std::span<const double> values, double lo, double hi,
                                            std::size_t bins) {
  std::vector<std::uint64_t> counts(bins, 0);
  for (const double v : values) {
    auto k = static_cast<std::ptrdiff_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++counts[static_cast<std::size_t>(k)];
  }
  return counts;
}

/// Law of t = a.lambda for lambda on S2.
enum class AxialLaw {
  uniform,  // lambda uniform: F(x) = (x + 1) / 2
  biased,   // lambda ~ rho_a: density |t|, so P(|t| <= x) = x^2
};

inline double axial_cdf(AxialLaw law, double x) {
  x = std::clamp(x, -1.0, 1.0);
  if (law == AxialLaw::uniform) return (x + 1.0) / 2.0;
  return x < 0.0 ? (1.0 - x * x) / 2.0 : (1.0 + x * x) / 2.0;
}

/// Kolmogorov-Smirnov critical constant at alpha ~ 0.01.
inline constexpr double kKsConstant = 1.63;

/// sup_x |F_n(x) - F(x)|.
inline double ks_distance(std::vector<double> samples, AxialLaw law) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = axial_cdf(law, samples[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

/// KS test of t-values against an axial law; threshold 1.63 / sqrt(N).
inline GofVerdict ks_axial_test(std::span<const double> samples, AxialLaw law,
                                std::string name = "ks_axial_test") {
  if (samples.size() < 100) throw StatisticsError("ks_axial_test: need at least 100 samples");
  const double d = ks_distance(std::vector<double>(samples.begin(), samples.end()), law);
  return GofVerdict::make(std::move(name), d,
                          kKsConstant / std::sqrt(static_cast<double>(samples.size())));
}

/// Total-variation distance between the empirical laws of two samples.
template <class T>
double total_variation_distance(std::span<const T> first, std::span<const T> second) {
  std::map<T, std::pair<double, double>> freq;
  for (const T& v : first) freq[v].first += 1.0;
  for (const T& v : second) freq[v].second += 1.0;
  const double n1 = static_cast<double>(first.size());
  const double n2 = static_cast<double>(second.size());
  double tvd = 0.0;
  for (const auto& [value, counts] : freq) {
    tvd += std::abs(counts.first / n1 - counts.second / n2);
  }
  return tvd / 2.0;
}

/// Bob's output law must not depend on Alice's setting: TVD between the two
/// empirical laws against 4 / sqrt(min(N1, N2)).
template <class T>
GofVerdict no_signaling_check(std::span<const T> under_first, std::span<const T> under_second,
                              std::string name = "no_signaling") {
  if (under_first.size() < 1000 || under_second.size() < 1000) {
    throw StatisticsError("no_signaling_check: need at least 1000 runs per setting");
  }
  const double n = static_cast<double>(std::min(under_first.size(), under_second.size()));
  return GofVerdict::make(std::move(name), total_variation_distance(under_first, under_second),
                          4.0 / std::sqrt(n));
}

/// |estimate - expected| against k sigma.
inline GofVerdict mean_within(std::string name, double estimate, double expected, double sigma,
                              double k = 4.0) {
  return GofVerdict::make(std::move(name), std::abs(estimate - expected), k * sigma);
}

/// |estimate - expected| against a fixed tolerance.
inline GofVerdict within_tolerance(std::string name, double estimate, double expected,
                                   double tolerance) {
  return GofVerdict::make(std::move(name), std::abs(estimate - expected), tolerance);
}

/// Observed frequency of `hits` out of `n` against p with k binomial sigmas.
inline GofVerdict proportion_within(std::string name, std::uint64_t hits, std::uint64_t n,
                                    double p, double k = 3.0) {
  const double nn = static_cast<double>(n);
  return GofVerdict::make(std::move(name), std::abs(static_cast<double>(hits) / nn - p),
                          k * std::sqrt(p * (1.0 - p) / nn));
}

/// A hard (non-statistical) property: number of violations must be zero.
inline GofVerdict exact_count(std::string name, std::uint64_t violations) {
  return GofVerdict::make(std::move(name), static_cast<double>(violations), 0.0);
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

struct ResourceMeans {
  double bits_a_to_b = 0.0;
  double bits_b_to_a = 0.0;
  double bits_total = 0.0;
  double nlbit_uses = 0.0;
  double rounds = 0.0;
  double raw_uniforms = 0.0;
  std::uint64_t max_bits_total = 0;
  std::uint64_t max_rounds = 0;
};

inline ResourceMeans summarize_ledgers(std::span<const ResourceLedger> ledgers) {
  ResourceMeans m;
  if (ledgers.empty()) return m;
  for (const auto& l : ledgers) {
    m.bits_a_to_b += static_cast<double>(l.bits_a_to_b);
    m.bits_b_to_a += static_cast<double>(l.bits_b_to_a);
    m.nlbit_uses += static_cast<double>(l.nlbit_uses);
    m.rounds += static_cast<double>(l.rounds);
    m.raw_uniforms += static_cast<double>(l.raw_uniforms);
    m.max_bits_total = std::max(m.max_bits_total, l.total_bits());
    m.max_rounds = std::max(m.max_rounds, l.rounds);
  }
  const double n = static_cast<double>(ledgers.size());
  m.bits_a_to_b /= n;
  m.bits_b_to_a /= n;
  m.nlbit_uses /= n;
  m.rounds /= n;
  m.raw_uniforms /= n;
  m.bits_total = m.bits_a_to_b + m.bits_b_to_a;
  return m;
}

struct TrialStats {
  std::uint64_t n_trials = 0;
  std::uint64_t n_effective = 0;  // runs where neither party aborted
  double mean = 0.0;              // E(AB) over accepted runs
  double std_error = 0.0;         // sample sd / sqrt(n_effective)
  double mean_alice = 0.0;
  double std_error_alice = 0.0;
  double mean_bob = 0.0;
  double std_error_bob = 0.0;
  double abort_rate_alice = 0.0;
  double abort_rate_bob = 0.0;
  double abort_rate_joint = 0.0;
  CountTable joint_counts{2, 2};  // rows A = +1, -1; cols B = +1, -1
  ResourceMeans resources;
};

namespace detail {

struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
  std::pair<double, double> mean_and_error(double n) const {
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {mean, std::sqrt(var / n)};
  }
};

}  // namespace detail

/// E(AB), E(A), E(B) over runs where nobody aborted; abort rates over all runs.
inline TrialStats estimate_correlation(std::span<const SpinOutcome> runs) {
  TrialStats s;
  s.n_trials = runs.size();
  detail::MeanAccumulator ab;
  detail::MeanAccumulator alice;
  detail::MeanAccumulator bob;
  std::uint64_t abort_a = 0;
  std::uint64_t abort_b = 0;
  std::uint64_t abort_both = 0;
  for (const auto& r : runs) {
    abort_a += is_abort(r.alice);
    abort_b += is_abort(r.bob);
    abort_both += is_abort(r.alice) && is_abort(r.bob);
    if (!r.accepted()) continue;
    ++s.n_effective;
    const int va = value(r.alice);
    const int vb = value(r.bob);
    ab.add(va * vb);
    alice.add(va);
    bob.add(vb);
    ++s.joint_counts.at(va > 0 ? 0 : 1, vb > 0 ? 0 : 1);
  }
  if (s.n_effective < 2) {
    throw StatisticsError("estimate_correlation: need at least 2 non-aborted runs");
  }
  const double n = static_cast<double>(s.n_effective);
  std::tie(s.mean, s.std_error) = ab.mean_and_error(n);
  std::tie(s.mean_alice, s.std_error_alice) = alice.mean_and_error(n);
  std::tie(s.mean_bob, s.std_error_bob) = bob.mean_and_error(n);
  const double total = static_cast<double>(s.n_trials);
  s.abort_rate_alice = static_cast<double>(abort_a) / total;
  s.abort_rate_bob = static_cast<double>(abort_b) / total;
  s.abort_rate_joint = static_cast<double>(abort_both) / total;
  return s;
}

/// estimate_correlation plus ledger means.
inline TrialStats summarize_runs(std::span<const SpinRun> runs) {
  std::vector<SpinOutcome> outcomes;
  std::vector<ResourceLedger> ledgers;
  outcomes.reserve(runs.size());
  ledgers.reserve(runs.size());
  for (const auto& r : runs) {
    outcomes.push_back(r.outcome);
    ledgers.push_back(r.ledger);
  }
  TrialStats s = estimate_correlation(outcomes);
  s.resources = summarize_ledgers(ledgers);
  return s;
}

/// sigma of a +-1 mean with true value e over n samples.
inline double spin_sigma(double e, std::uint64_t n) {
  return std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(n));
}

}  // namespace distsample
