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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "distsample/acceptance.hpp"
#include "distsample/experiment.hpp"
#include "distsample/oracle.hpp"
#include "distsample/protocols.hpp"
#include "distsample/records.hpp"
#include "distsample/statistics.hpp"

namespace distsample::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kProtocolError = 3 };

inline constexpr const char* kSeedEnvVar = "DISTSAMPLE_SEED";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string protocol;
  std::optional<double> angle_deg;
  std::optional<Vec3> a;
  std::optional<Vec3> b;
  std::optional<std::string> povm_a;
  std::optional<std::string> povm_b;
  std::string variant = "communication";
  std::string encoding = "unary";
  std::uint64_t trials = 100'000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  OutputFormat format = OutputFormat::json;
  std::optional<std::string> per_trial_path;
  // chsh only; all four or none.
  std::optional<Vec3> a1, a2, b1, b2;
};

/// Decimal or 0x-prefixed hexadecimal 64-bit seed.
inline std::optional<std::uint64_t> parse_seed(std::string_view text) {
  int base = 10;
  if (text.starts_with("0x") || text.starts_with("0X")) {
    text.remove_prefix(2);
    base = 16;
  }
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
  return value;
}

/// Seed from the environment, falling back to the built-in default.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnvVar)) {
    if (const auto s = parse_seed(env)) return *s;
    throw ConfigError(fmt::format("{} is not a valid seed: '{}'", kSeedEnvVar, env));
  }
  return kDefaultSeed;
}

/// "x,y,z" -> Vec3.
inline Vec3 parse_vector(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string field(text.substr(start, comma - start));
    std::size_t used = 0;
    try {
      values.push_back(std::stod(field, &used));
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != field.size()) throw ConfigError(fmt::format("bad vector component '{}'", field));
    start = comma + 1;
  }
  if (values.size() != 3) {
    throw ConfigError(fmt::format("expected a vector 'x,y,z', got '{}'", text));
  }
  return {values[0], values[1], values[2]};
}

/// Explicit vectors are renormalized, with a warning past 1e-6 off unit length.
inline UnitVector3 setting_from_vector(const Vec3& v, std::string_view name, std::ostream& err) {
  const double n = norm(v);
  if (!is_finite(v) || !(n > 0.0)) throw ConfigError(fmt::format("--{} must be a nonzero vector", name));
  if (std::abs(n - 1.0) > 1e-6) {
    err << fmt::format("warning: --{} has norm {:.9g}; renormalizing\n", name, n);
  }
  return UnitVector3::normalized(v);
}

/// --angle-deg theta gives a = +z and b at theta in the x-z plane;
/// otherwise --a and --b are both required.
inline std::pair<UnitVector3, UnitVector3> resolve_settings(const ExperimentConfig& c,
                                                            std::ostream& err) {
  if (c.angle_deg && (c.a || c.b)) throw ConfigError("use either --angle-deg or --a/--b, not both");
  if (c.angle_deg) {
    if (!std::isfinite(*c.angle_deg)) throw ConfigError("--angle-deg must be finite");
    return {UnitVector3(0.0, 0.0, 1.0),
            UnitVector3::in_xz_plane(*c.angle_deg * std::numbers::pi / 180.0)};
  }
  if (c.a && c.b) return {setting_from_vector(*c.a, "a", err), setting_from_vector(*c.b, "b", err)};
  throw ConfigError("measurement settings required: --angle-deg or both --a and --b");
}

inline const std::vector<std::string>& spin_protocol_names() {
  static const std::vector<std::string> names{
      "werner", "postselection", "postselection-sym", "communication", "steiner", "nlbox"};
  return names;
}

inline IndexEncoding parse_encoding(const std::string& s) {
  if (s == "unary") return IndexEncoding::unary;
  if (s == "elias-gamma" || s == "elias_gamma") return IndexEncoding::elias_gamma;
  throw ConfigError(fmt::format("unknown index encoding '{}'", s));
}

inline SpinProtocol spin_protocol(const std::string& name, IndexEncoding encoding) {
  if (name == "werner") return run_werner_lhv;
  if (name == "postselection") return run_postselection;
  if (name == "postselection-sym") return run_postselection_symmetrized;
  if (name == "communication") return run_communication;
  if (name == "nlbox") return run_nlbox_fresh;
  if (name == "steiner") {
    return [encoding](const UnitVector3& a, const UnitVector3& b, RngStream& rng) {
      return run_steiner(a, b, rng, encoding).run;
    };
  }
  throw ConfigError(fmt::format("unknown protocol '{}'", name));
}

/// Oracle value of E(AB) for a spin protocol.
inline double expected_correlation(const std::string& protocol, const UnitVector3& a,
                                   const UnitVector3& b) {
  return protocol == "werner" ? werner_correlation(0.5, a, b) : singlet_correlation(a, b);
}

namespace detail {

inline std::string spin_label(Spin s) {
  return s == Spin::abort ? "abort" : std::to_string(value(s));
}

inline std::string index_label(const std::optional<std::size_t>& i) {
  return i ? std::to_string(*i + 1) : "abort";
}

inline std::ofstream open_per_trial(const ExperimentConfig& c) {
  std::ofstream out(*c.per_trial_path);
  if (!out) throw ConfigError(fmt::format("cannot write per-trial file '{}'", *c.per_trial_path));
  out << "trial,alice,bob,bits_a_to_b,bits_b_to_a,nlbit_uses,rounds,raw_uniforms\n";
  return out;
}

inline void write_ledger(std::ostream& out, const ResourceLedger& l) {
  out << l.bits_a_to_b << ',' << l.bits_b_to_a << ',' << l.nlbit_uses << ',' << l.rounds << ','
      << l.raw_uniforms << '\n';
}

inline std::vector<GofVerdict> spin_verdicts(const ExperimentConfig& c, const UnitVector3& a,
                                             const UnitVector3& b, const TrialStats& st,
                                             const std::vector<SpinRun>& runs) {
  std::vector<GofVerdict> v;
  const double expected = expected_correlation(c.protocol, a, b);
  v.push_back(mean_within("E(AB) within 4 sigma of oracle", st.mean, expected,
                          spin_sigma(expected, st.n_effective)));
  v.push_back(mean_within("E(A) within 4 sigma of 0", st.mean_alice, 0.0,
                          spin_sigma(0.0, st.n_effective)));
  v.push_back(mean_within("E(B) within 4 sigma of 0", st.mean_bob, 0.0,
                          spin_sigma(0.0, st.n_effective)));
  if (c.protocol != "werner") {
    const auto cells = singlet_joint(a, b).p;
    try {
      v.push_back(chi_square_gof(st.joint_counts, cells, 1e-3, "joint vs singlet p(A,B)"));
    } catch (const StatisticsError&) {
      v.push_back(GofVerdict::make("joint vs singlet p(A,B)", std::numeric_limits<double>::infinity(), 0.0));
    }
  }
  const auto n = st.n_trials;
  const auto count = [n](double rate) { return static_cast<std::uint64_t>(std::llround(rate * n)); };
  if (c.protocol == "postselection") {
    v.push_back(proportion_within("P(abort A) = 1/2", count(st.abort_rate_alice), n, 0.5));
    v.push_back(exact_count("Bob never aborts", count(st.abort_rate_bob)));
  } else if (c.protocol == "postselection-sym") {
    v.push_back(proportion_within("P(abort A) = 1/3", count(st.abort_rate_alice), n, 1.0 / 3.0));
    v.push_back(proportion_within("P(abort B) = 1/3", count(st.abort_rate_bob), n, 1.0 / 3.0));
  }
  std::uint64_t bad = 0;
  for (const auto& r : runs) {
    if (c.protocol == "communication") {
      bad += r.ledger.total_bits() != 1 || r.ledger.nlbit_uses != 0;
    } else if (c.protocol == "nlbox") {
      bad += r.ledger.total_bits() != 0 || r.ledger.nlbit_uses != 1;
    } else if (c.protocol != "steiner") {
      bad += r.ledger.total_bits() != 0 || r.ledger.nlbit_uses != 0;
    }
  }
  v.push_back(exact_count("runs deviating from the protocol's resource budget", bad));
  return v;
}

inline int simulate_povm(const ExperimentConfig& c, std::ostream& out) {
  if (!c.povm_a || !c.povm_b) throw ConfigError("povm protocol needs --povm-a and --povm-b");
  const auto variant = parse_povm_variant(c.variant);
  if (!variant) throw ConfigError(fmt::format("unknown POVM variant '{}'", c.variant));
  const PovmSpec pa = PovmSpec::load(*c.povm_a);
  const PovmSpec pb = PovmSpec::load(*c.povm_b);

  const auto runs = run_trials(TrialPlan{c.seed, c.trials, c.threads},
                               [&](RngStream& rng) { return run_povm(pa, pb, *variant, rng); });

  CountTable counts(pa.size(), pb.size());
  std::vector<ResourceLedger> ledgers;
  ledgers.reserve(runs.size());
  std::uint64_t abort_a = 0;
  std::uint64_t abort_b = 0;
  std::optional<std::ofstream> trial_out;
  if (c.per_trial_path) trial_out = open_per_trial(c);
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const PovmRun& r = runs[k];
    ledgers.push_back(r.ledger);
    abort_a += !r.outcome.alice.has_value();
    abort_b += !r.outcome.bob.has_value();
    if (r.outcome.accepted()) ++counts.at(*r.outcome.alice, *r.outcome.bob);
    if (trial_out) {
      *trial_out << k << ',' << index_label(r.outcome.alice) << ','
                 << index_label(r.outcome.bob) << ',';
      write_ledger(*trial_out, r.ledger);
    }
  }
  const ResourceMeans means = summarize_ledgers(ledgers);
  const double n = static_cast<double>(c.trials);
  const std::uint64_t accepted = counts.total();
  const double rate = static_cast<double>(accepted) / n;

  std::vector<double> expected;
  Record oracle_table = Record::array();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    Record row = Record::array();
    for (std::size_t j = 0; j < pb.size(); ++j) {
      expected.push_back(povm_joint(pa, pb, i, j));
      row.push_back(expected.back());
    }
    oracle_table.push_back(row);
  }

  std::vector<GofVerdict> verdicts;
  try {
    verdicts.push_back(chi_square_gof(counts, expected, 1e-3, "conditional (i,j) vs povm_joint"));
  } catch (const StatisticsError&) {
    verdicts.push_back(GofVerdict::make("conditional (i,j) vs povm_joint",
                                        std::numeric_limits<double>::infinity(), 0.0));
  }
  const auto sigma_mean = [n](double var) { return 4.0 * std::sqrt(var / n); };
  switch (*variant) {
    case PovmVariant::postselect:
      verdicts.push_back(proportion_within("P(abort A) = 2/3", abort_a, c.trials, 2.0 / 3.0));
      verdicts.push_back(proportion_within("P(abort B) = 2/3", abort_b, c.trials, 2.0 / 3.0));
      break;
    case PovmVariant::communication:
      // rounds ~ Geometric(1/2): variance 2; 3 bits per round.
      verdicts.push_back(within_tolerance("mean bits = 6", means.bits_total, 6.0, sigma_mean(18.0)));
      verdicts.push_back(within_tolerance("mean rounds = 2", means.rounds, 2.0, sigma_mean(2.0)));
      break;
    case PovmVariant::nlbox_comm:
      verdicts.push_back(within_tolerance("mean nl-bits = 2", means.nlbit_uses, 2.0, sigma_mean(2.0)));
      verdicts.push_back(within_tolerance("mean bits = 4", means.bits_total, 4.0, sigma_mean(8.0)));
      break;
  }

  Record r = record_header("simulate", "povm", c.seed, c.trials);
  r["settings"]["povm_a"] = *c.povm_a;
  r["settings"]["povm_b"] = *c.povm_b;
  r["settings"]["variant"] = std::string(to_string(*variant));
  Record& e = r["estimates"];
  e["n_effective"] = accepted;
  e["acceptance_rate"] = rate;
  e["acceptance_rate_stderr"] = std::sqrt(rate * (1.0 - rate) / n);
  e["abort_rate_alice"] = static_cast<double>(abort_a) / n;
  e["abort_rate_bob"] = static_cast<double>(abort_b) / n;
  Record table = Record::array();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    Record row = Record::array();
    for (std::size_t j = 0; j < pb.size(); ++j) row.push_back(counts.at(i, j));
    table.push_back(row);
  }
  e["joint_counts"] = table;
  r["oracle"]["joint"] = oracle_table;
  r["ledger_means"] = to_record(means);
  r["verdicts"] = verdicts_record(verdicts);
  out << encode(r, c.format);
  return kOk;
}

}  // namespace detail

/// `simulate`: one summary record (and optional per-trial CSV).
inline int cmd_simulate(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.trials < 2) throw ConfigError("--trials must be at least 2");
    if (c.protocol == "povm") return detail::simulate_povm(c, out);
    const IndexEncoding encoding = parse_encoding(c.encoding);
    const SpinProtocol protocol = spin_protocol(c.protocol, encoding);
    const auto [a, b] = resolve_settings(c, err);

    std::vector<SpinRun> runs;
    std::vector<std::uint64_t> indices;
    if (c.protocol == "steiner") {
      const auto steiner = run_trials(TrialPlan{c.seed, c.trials, c.threads}, [&](RngStream& rng) {
        return run_steiner(a, b, rng, encoding);
      });
      for (const auto& s : steiner) {
        runs.push_back(s.run);
        indices.push_back(s.accepted_index);
      }
    } else {
      runs = run_trials(TrialPlan{c.seed, c.trials, c.threads},
                        [&](RngStream& rng) { return protocol(a, b, rng); });
    }
    if (c.per_trial_path) {
      std::ofstream trial_out = detail::open_per_trial(c);
      for (std::size_t k = 0; k < runs.size(); ++k) {
        trial_out << k << ',' << detail::spin_label(runs[k].outcome.alice) << ','
                  << detail::spin_label(runs[k].outcome.bob) << ',';
        detail::write_ledger(trial_out, runs[k].ledger);
      }
    }
    const TrialStats st = summarize_runs(runs);
    auto verdicts = detail::spin_verdicts(c, a, b, st, runs);
    Record r = spin_summary(c.protocol, c.seed, c.trials, a, b, st,
                            expected_correlation(c.protocol, a, b), verdicts);
    if (!indices.empty()) {
      double mean_k = 0.0;
      std::uint64_t max_k = 0;
      for (const auto k : indices) {
        mean_k += static_cast<double>(k);
        max_k = std::max(max_k, k);
      }
      mean_k /= static_cast<double>(indices.size());
      r["estimates"]["k_mean"] = mean_k;
      r["estimates"]["k_mean_stderr"] = std::sqrt(2.0 / static_cast<double>(indices.size()));
      r["estimates"]["k_max"] = max_k;
      r["settings"]["index_encoding"] = c.encoding;
    }
    out << encode(r, c.format);
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const PovmError& e) {
    err << "invalid POVM (" << to_string(e.condition()) << "): " << e.what() << '\n';
    return kConfigError;
  } catch (const GeometryError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IterationCapExceeded& e) {
    err << "protocol error: " << e.what() << '\n';
    return kProtocolError;
  } catch (const RoundCapExceeded& e) {
    err << "protocol error: " << e.what() << '\n';
    return kProtocolError;
  } catch (const StatisticsError& e) {
    err << "protocol error: " << e.what() << '\n';
    return kProtocolError;
  }
}

/// `chsh`: C with its standard error at the optimal or the given settings.
inline int cmd_chsh(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.trials < 1000) throw ConfigError("chsh needs --trials >= 1000 per setting pair");
    const SpinProtocol protocol = spin_protocol(c.protocol, parse_encoding(c.encoding));
    const int given = int{c.a1.has_value()} + c.a2.has_value() + c.b1.has_value() + c.b2.has_value();
    if (given != 0 && given != 4) throw ConfigError("give all of --a1 --a2 --b1 --b2 or none");
    const ChshSettings settings =
        given == 4 ? ChshSettings{setting_from_vector(*c.a1, "a1", err),
                                  setting_from_vector(*c.a2, "a2", err),
                                  setting_from_vector(*c.b1, "b1", err),
                                  setting_from_vector(*c.b2, "b2", err)}
                   : chsh_optimal_settings();
    const ChshEstimate est = chsh_experiment(protocol, settings, c.trials, c.seed, c.threads);
    const double singlet = singlet_chsh(settings);
    const double expected = c.protocol == "werner" ? singlet / 2.0 : singlet;

    Record r = record_header("chsh", c.protocol, c.seed, c.trials);
    r["settings"]["a1"] = to_record(settings.a1.vec());
    r["settings"]["a2"] = to_record(settings.a2.vec());
    r["settings"]["b1"] = to_record(settings.b1.vec());
    r["settings"]["b2"] = to_record(settings.b2.vec());
    Record& e = r["estimates"];
    e["C"] = est.value;
    e["C_stderr"] = est.std_error;
    static constexpr std::array<const char*, 4> kNames{"E11", "E12", "E21", "E22"};
    for (std::size_t k = 0; k < 4; ++k) {
      e[kNames[k]] = est.correlations[k];
      e[std::string(kNames[k]) + "_stderr"] = est.std_errors[k];
    }
    r["oracle"]["C_singlet"] = singlet;
    r["oracle"]["C_expected"] = expected;
    r["ledger_means"] = to_record(est.resources);
    r["verdicts"] = verdicts_record(
        {mean_within("C within 4 sigma of oracle", est.value, expected, est.std_error)});
    out << encode(r, c.format);
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const GeometryError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IterationCapExceeded& e) {
    err << "protocol error: " << e.what() << '\n';
    return kProtocolError;
  } catch (const StatisticsError& e) {
    err << "protocol error: " << e.what() << '\n';
    return kProtocolError;
  }
}

/// `verify`: the full acceptance suite; exit 0 iff every criterion passes.
inline int cmd_verify(std::uint64_t seed, unsigned threads, std::ostream& out,
                      std::uint64_t trials = 100'000) {
  AcceptanceOptions options;
  options.seed = seed;
  options.threads = threads;
  options.trials = trials;
  const AcceptanceReport report = run_acceptance(options);
  out << report.render();
  return report.all_pass() ? kOk : kFailure;
}

/// `povm-check FILE`: validates a POVM file and prints its marginals.
inline int cmd_povm_check(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const PovmSpec povm = PovmSpec::load(path);
    out << fmt::format("{}: valid rank-one POVM with {} elements\n", path, povm.size());
    for (std::size_t i = 0; i < povm.size(); ++i) {
      const BallVector3& e = povm.element(i);
      out << fmt::format("  {:>3}  ({:+.9f}, {:+.9f}, {:+.9f})  |a|={:.9f}  p(i)={:.9f}\n", i + 1,
                         e.x(), e.y(), e.z(), e.length(), povm_marginal(povm, i));
    }
    return kOk;
  } catch (const PovmError& e) {
    err << "invalid POVM (" << to_string(e.condition()) << ", residual " << e.residual()
        << "): " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace distsample::cli
