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
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "distsample/experiment.hpp"
#include "distsample/geometry.hpp"
#include "distsample/nonlocal_box.hpp"
#include "distsample/oracle.hpp"
#include "distsample/protocols.hpp"
#include "distsample/samplers.hpp"
#include "distsample/statistics.hpp"

namespace distsample {

inline constexpr std::uint64_t kDefaultSeed = 20070521;

/// The protocol implementations under test. Replacing one entry lets tests
/// check that the suite detects a broken protocol.
struct ProtocolSet {
  SpinProtocol werner = run_werner_lhv;
  SpinProtocol postselection = run_postselection;
  SpinProtocol postselection_symmetrized = run_postselection_symmetrized;
  SpinProtocol communication = run_communication;
  std::function<NlBoxRun(const UnitVector3&, const UnitVector3&, RngStream&, NlBox&)> nlbox =
      run_nlbox;
  std::function<SteinerRun(const UnitVector3&, const UnitVector3&, RngStream&)> steiner =
      [](const UnitVector3& a, const UnitVector3& b, RngStream& rng) {
        return run_steiner(a, b, rng);
      };
  std::function<PovmRun(const PovmSpec&, const PovmSpec&, PovmVariant, RngStream&)> povm =
      [](const PovmSpec& pa, const PovmSpec& pb, PovmVariant v, RngStream& rng) {
        return run_povm(pa, pb, v, rng);
      };
};

struct AcceptanceOptions {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  std::uint64_t trials = 100'000;
  ProtocolSet protocols;
};

struct CheckLine {
  int criterion;
  GofVerdict verdict;
};

struct InfoLine {
  int criterion;
  std::string text;
};

struct CriterionSummary {
  int id;
  std::string title;
  bool pass;
};

struct AcceptanceReport {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::vector<CheckLine> checks;
  std::vector<InfoLine> info;
  std::vector<CriterionSummary> criteria;

  bool all_pass() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.pass; });
  }

  /// Plain-text table. Contains nothing that depends on thread count or
  /// wall-clock time.
  std::string render() const {
    std::string out = fmt::format("distsample acceptance report  seed={}  trials={}\n\n", seed, trials);
    for (const auto& c : criteria) {
      for (const auto& line : checks) {
        if (line.criterion != c.id) continue;
        out += fmt::format("  [{:>2}] {}  {:<58} stat={:<13.6e} thr={:.6e}\n", c.id,
                           line.verdict.pass ? "pass" : "FAIL", line.verdict.test_name,
                           line.verdict.statistic, line.verdict.threshold);
      }
      for (const auto& line : info) {
        if (line.criterion != c.id) continue;
        out += fmt::format("  [{:>2}] info  {}\n", c.id, line.text);
      }
    }
    out += "\n";
    std::size_t passed = 0;
    for (const auto& c : criteria) {
      out += fmt::format("criterion {:>2}  {}  {}\n", c.id, c.pass ? "PASS" : "FAIL", c.title);
      passed += c.pass;
    }
    out += fmt::format("\noverall: {} ({}/{} criteria)\n", all_pass() ? "PASS" : "FAIL", passed,
                       criteria.size());
    return out;
  }
};

namespace detail {

/// Five settings with a.b in {1, 0.5, 0, -0.5, -1}: a = +z, b in the x-z plane.
inline std::vector<std::pair<UnitVector3, UnitVector3>> dot_ladder() {
  std::vector<std::pair<UnitVector3, UnitVector3>> out;
  for (const double d : {1.0, 0.5, 0.0, -0.5, -1.0}) {
    out.emplace_back(UnitVector3(0.0, 0.0, 1.0), UnitVector3::in_xz_plane(std::acos(d)));
  }
  return out;
}

inline std::string dot_label(const UnitVector3& a, const UnitVector3& b) {
  return fmt::format("a.b={:+.2f}", dot(a, b));
}

inline std::array<double, 4> singlet_cells(const UnitVector3& a, const UnitVector3& b) {
  return singlet_joint(a, b).p;
}

/// chi_square_gof that reports structural failures (e.g. mass on a zero
/// cell) as a failed verdict instead of throwing.
inline GofVerdict guarded_chi_square(std::span<const std::uint64_t> observed,
                                     std::span<const double> expected, double alpha,
                                     std::string name) {
  try {
    return chi_square_gof(observed, expected, alpha, name);
  } catch (const StatisticsError&) {
    return GofVerdict::make(std::move(name), std::numeric_limits<double>::infinity(), 0.0);
  }
}

inline std::vector<double> povm_joint_table(const PovmSpec& pa, const PovmSpec& pb) {
  std::vector<double> table;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pb.size(); ++j) table.push_back(povm_joint(pa, pb, i, j));
  }
  return table;
}

class SuiteBuilder {
 public:
  explicit SuiteBuilder(const AcceptanceOptions& opt) : opt_(opt) {
    report_.seed = opt.seed;
    report_.trials = opt.trials;
  }

  TrialPlan plan(const std::string& tag, std::uint64_t trials = 0) const {
    return {derive_seed(opt_.seed, tag), trials == 0 ? opt_.trials : trials, opt_.threads};
  }

  void check(int criterion, GofVerdict v) { report_.checks.push_back({criterion, std::move(v)}); }
  void info(int criterion, std::string text) { report_.info.push_back({criterion, std::move(text)}); }

  void close(int id, std::string title) {
    bool pass = true;
    for (const auto& c : report_.checks) {
      if (c.criterion == id) pass = pass && c.verdict.pass;
    }
    report_.criteria.push_back({id, std::move(title), pass});
  }

  const AcceptanceOptions& options() const { return opt_; }
  AcceptanceReport take() { return std::move(report_); }

 private:
  const AcceptanceOptions& opt_;
  AcceptanceReport report_;
};

inline void criterion_singlet_communication(SuiteBuilder& s) {
  const auto& p = s.options().protocols;
  for (const auto& [a, b] : dot_ladder()) {
    const std::string label = dot_label(a, b);
    const auto runs = run_trials(s.plan("c1/" + label),
                                 [&](RngStream& rng) { return p.communication(a, b, rng); });
    const TrialStats st = summarize_runs(runs);
    const double expected = singlet_correlation(a, b);
    s.check(1, mean_within("communication E(AB) " + label, st.mean, expected,
                           spin_sigma(expected, st.n_effective)));
    s.check(1, mean_within("communication E(A) " + label, st.mean_alice, 0.0,
                           spin_sigma(0.0, st.n_effective)));
    s.check(1, mean_within("communication E(B) " + label, st.mean_bob, 0.0,
                           spin_sigma(0.0, st.n_effective)));
    const auto cells = singlet_cells(a, b);
    s.check(1, guarded_chi_square(st.joint_counts.counts, cells, 1e-3,
                                  "communication joint vs p(A,B) " + label));
    if (dot(a, b) == 1.0) {
      std::uint64_t violations = 0;
      for (const auto& r : runs) violations += value(r.outcome.alice) != -value(r.outcome.bob);
      s.check(1, exact_count("communication A = -B on every run at a = b", violations));
    }
  }
  s.close(1, "singlet correlations via one bit of communication");
}

inline void criterion_resource_exactness(SuiteBuilder& s) {
  const auto& p = s.options().protocols;
  std::uint64_t comm_bad = 0;
  std::uint64_t box_bad = 0;
  std::uint64_t sign_bad = 0;
  std::uint64_t lhv_bad = 0;
  for (const auto& [a, b] : dot_ladder()) {
    const std::string label = dot_label(a, b);
    const auto comm = run_trials(s.plan("c2/comm/" + label),
                                 [&](RngStream& rng) { return p.communication(a, b, rng); });
    for (const auto& r : comm) {
      comm_bad += r.ledger.bits_a_to_b != 1 || r.ledger.bits_b_to_a != 0 ||
                  r.ledger.nlbit_uses != 0;
    }
    for (const SpinProtocol* lhv : {&p.werner, &p.postselection}) {
      const auto runs = run_trials(s.plan("c2/lhv/" + label, s.options().trials / 10),
                                   [&](RngStream& rng) { return (*lhv)(a, b, rng); });
      for (const auto& r : runs) lhv_bad += r.ledger.total_bits() != 0 || r.ledger.nlbit_uses != 0;
    }
    const auto box_runs = run_trials(s.plan("c2/nlbox/" + label), [&](RngStream& rng) {
      NlBox box(rng.lane(1));
      return p.nlbox(a, b, rng, box);
    });
    std::vector<SpinOutcome> outcomes;
    outcomes.reserve(box_runs.size());
    for (const auto& r : box_runs) {
      box_bad += r.ledger.nlbit_uses != 1 || r.ledger.total_bits() != 0;
      sign_bad += r.sample.s_bob != sgn(dot(b, r.lambda_s));
      outcomes.push_back(r.outcome);
    }
    const TrialStats st = estimate_correlation(outcomes);
    const double expected = singlet_correlation(a, b);
    s.check(2, mean_within("nl-box E(AB) " + label, st.mean, expected,
                           spin_sigma(expected, st.n_effective)));
  }
  s.check(2, exact_count("communication runs with bits != 1 (A->B only)", comm_bad));
  s.check(2, exact_count("nl-box runs with nl-bits != 1 or bits != 0", box_bad));
  s.check(2, exact_count("nl-box runs with s_B != sgn(b.lambda_s)", sign_bad));
  s.check(2, exact_count("werner/post-selection runs using bits or nl-bits", lhv_bad));
  s.close(2, "resource exactness (1 bit; 1 nl-bit and 0 bits)");
}

inline void criterion_werner(SuiteBuilder& s) {
  const auto& p = s.options().protocols;
  for (const auto& [a, b] : dot_ladder()) {
    const std::string label = dot_label(a, b);
    const TrialStats st = simulate_spin(p.werner, a, b, s.plan("c3/" + label));
    const double expected = werner_correlation(0.5, a, b);
    s.check(3, mean_within("werner E(AB) " + label, st.mean, expected,
                           spin_sigma(expected, st.n_effective)));
    s.check(3, mean_within("werner E(A) " + label, st.mean_alice, 0.0,
                           spin_sigma(0.0, st.n_effective)));
    s.check(3, mean_within("werner E(B) " + label, st.mean_bob, 0.0,
                           spin_sigma(0.0, st.n_effective)));
  }
  s.close(3, "Werner LHV model at visibility 1/2");
}

inline void criterion_postselection(SuiteBuilder& s) {
  const auto& p = s.options().protocols;
  for (const auto& [a, b] : dot_ladder()) {
    const std::string label = dot_label(a, b);
    const auto cells = singlet_cells(a, b);

    const auto asym = run_trials(s.plan("c4/asym/" + label),
                                 [&](RngStream& rng) { return p.postselection(a, b, rng); });
    const TrialStats st = summarize_runs(asym);
    const auto n = st.n_trials;
    s.check(4, proportion_within("asymmetric P(abort A) = 1/2 " + label,
                                 static_cast<std::uint64_t>(std::llround(st.abort_rate_alice * n)),
                                 n, 0.5));
    s.check(4, exact_count("asymmetric Bob aborts " + label,
                           static_cast<std::uint64_t>(std::llround(st.abort_rate_bob * n))));
    s.check(4, guarded_chi_square(st.joint_counts.counts, cells, 1e-3,
                                  "asymmetric conditional joint vs p(A,B) " + label));
    const double expected = singlet_correlation(a, b);
    s.check(4, mean_within("asymmetric conditional E(AB) " + label, st.mean, expected,
                           spin_sigma(expected, st.n_effective)));

    const auto sym = run_trials(s.plan("c4/sym/" + label), [&](RngStream& rng) {
      return p.postselection_symmetrized(a, b, rng);
    });
    const TrialStats ss = summarize_runs(sym);
    s.check(4, proportion_within("symmetrized P(abort A) = 1/3 " + label,
                                 static_cast<std::uint64_t>(std::llround(ss.abort_rate_alice * n)),
                                 n, 1.0 / 3.0));
    s.check(4, proportion_within("symmetrized P(abort B) = 1/3 " + label,
                                 static_cast<std::uint64_t>(std::llround(ss.abort_rate_bob * n)),
                                 n, 1.0 / 3.0));
    s.check(4, guarded_chi_square(ss.joint_counts.counts, cells, 1e-3,
                                  "symmetrized conditional joint vs p(A,B) " + label));
    s.check(4, mean_within("symmetrized conditional E(A) " + label, ss.mean_alice, 0.0,
                           spin_sigma(0.0, ss.n_effective)));
    s.check(4, mean_within("symmetrized conditional E(B) " + label, ss.mean_bob, 0.0,
                           spin_sigma(0.0, ss.n_effective)));
    s.info(4, fmt::format("symmetrized joint abort rate {} = {:.5f} (product of marginals {:.5f})",
                          label, ss.abort_rate_joint, ss.abort_rate_alice * ss.abort_rate_bob));
  }
  s.close(4, "post-selection abort rates and conditional correctness");
}

inline void criterion_chsh(SuiteBuilder& s) {
  const auto& p = s.options().protocols;
  const ChshSettings settings = chsh_optimal_settings();
  const auto n = s.options().trials;
  const auto seed = [&](const char* tag) { return derive_seed(s.options().seed, tag); };
  const unsigned threads = s.options().threads;

  s.check(5, within_tolerance("singlet oracle C at optimal settings", singlet_chsh(settings),
                              2.0 * std::numbers::sqrt2, 1e-9));
  const ChshEstimate werner = chsh_experiment(p.werner, settings, n, seed("c5/werner"), threads);
  s.check(5, within_tolerance("werner C = sqrt2", werner.value, std::numbers::sqrt2, 0.02));
  const ChshEstimate comm =
      chsh_experiment(p.communication, settings, n, seed("c5/communication"), threads);
  s.check(5, within_tolerance("communication C = 2 sqrt2", comm.value, 2.0 * std::numbers::sqrt2,
                              0.02));
  const SpinProtocol nlbox = [&](const UnitVector3& a, const UnitVector3& b, RngStream& rng) {
    NlBox box(rng.lane(1));
    const NlBoxRun r = p.nlbox(a, b, rng, box);
    return SpinRun{r.outcome, r.ledger};
  };
  const ChshEstimate box = chsh_experiment(nlbox, settings, n, seed("c5/nlbox"), threads);
  s.check(5, within_tolerance("nl-box C = 2 sqrt2", box.value, 2.0 * std::numbers::sqrt2, 0.02));
  s.info(5, fmt::format("C werner={:.5f}+-{:.5f} communication={:.5f}+-{:.5f} nlbox={:.5f}+-{:.5f}",
                        werner.value, werner.std_error, comm.value, comm.std_error, box.value,
                        box.std_error));
  for (const auto& strategy : builtin_local_strategies()) {
    const double c = chsh_local_strategy(strategy, settings, s.plan("c5/lhv/" + strategy.name));
    s.check(5, GofVerdict::make("deterministic LHV |C| <= 2 (" + strategy.name + ")",
                                std::abs(c), 2.0));
  }
  s.close(5, "CHSH ladder: sqrt2 (LHV), 2 sqrt2 (bit, nl-box), |C| <= 2 (local)");
}

inline void criterion_samplers(SuiteBuilder& s) {
  const UnitVector3 a = UnitVector3::normalized({0.3, -0.5, 0.81});

  const auto choices = run_trials(s.plan("c6/choice"), [&](RngStream& rng) {
    const UnitVector3 l0 = sample_uniform_sphere(rng);
    const UnitVector3 l1 = sample_uniform_sphere(rng);
    const ChoiceResult c = choice_sample(a, l0, l1);
    return std::pair{dot(a, c.sample), c.chosen_index};
  });
  std::vector<double> t_choice;
  std::uint64_t zero = 0;
  for (const auto& [t, idx] : choices) {
    t_choice.push_back(t);
    zero += idx == 0;
  }
  s.check(6, ks_axial_test(t_choice, AxialLaw::biased, "choice method KS vs P(|t|<=x)=x^2"));
  s.check(6, proportion_within("choice index P(0) = 1/2", zero, choices.size(), 0.5));

  const auto rejections = run_trials(s.plan("c6/rejection"), [&](RngStream& rng) {
    const RejectionResult r = rejection_sample(a, rng);
    return std::pair{dot(a, r.sample), r.iterations};
  });
  std::vector<double> t_reject;
  double iterations = 0.0;
  for (const auto& [t, it] : rejections) {
    t_reject.push_back(t);
    iterations += static_cast<double>(it);
  }
  s.check(6, ks_axial_test(t_reject, AxialLaw::biased, "rejection method KS vs P(|t|<=x)=x^2"));
  s.check(6, within_tolerance("rejection E[iterations] = 2",
                              iterations / static_cast<double>(rejections.size()), 2.0, 0.02));
  s.close(6, "sampler laws (choice and rejection)");
}

inline void criterion_pr_box(SuiteBuilder& s) {
  const auto n = s.options().trials;
  std::uint64_t violations = 0;
  std::array<std::vector<int>, 4> alphas;
  std::array<std::vector<int>, 4> betas;
  std::array<double, 4> game{};
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const int k = 2 * x + y;
      const auto outputs = run_trials(s.plan(fmt::format("c7/box/{}{}", x, y)), [&](RngStream& rng) {
        NlBox box(rng);
        return box.query(x == 1, y == 1);
      });
      std::int64_t agree = 0;
      for (const auto& o : outputs) {
        violations += (o.alpha != o.beta) != (x == 1 && y == 1);
        alphas[k].push_back(o.alpha);
        betas[k].push_back(o.beta);
        agree += o.alpha == o.beta ? 1 : -1;
      }
      game[k] = static_cast<double>(agree) / static_cast<double>(n);
      const auto zeros = static_cast<std::uint64_t>(std::count(alphas[k].begin(), alphas[k].end(), 0));
      s.check(7, proportion_within(fmt::format("box P(alpha=0) = 1/2 at (x,y)=({},{})", x, y), zeros,
                                   n, 0.5));
    }
  }
  s.check(7, exact_count("box queries violating alpha xor beta = x and y", violations));
  auto span = [](const std::vector<int>& v) { return std::span<const int>(v); };
  s.check(7, no_signaling_check(span(alphas[0]), span(alphas[1]), "box alpha independent of y (x=0)"));
  s.check(7, no_signaling_check(span(alphas[2]), span(alphas[3]), "box alpha independent of y (x=1)"));
  s.check(7, no_signaling_check(span(betas[0]), span(betas[2]), "box beta independent of x (y=0)"));
  s.check(7, no_signaling_check(span(betas[1]), span(betas[3]), "box beta independent of x (y=1)"));
  s.check(7, within_tolerance("box CHSH game value = 4",
                              chsh_value(game[0], game[1], game[2], game[3]), 4.0, 0.02));

  // Protocol level: Bob's outputs do not depend on Alice's setting.
  const auto& p = s.options().protocols;
  const UnitVector3 b = UnitVector3::normalized({0.2, 0.4, -0.9});
  std::array<std::vector<int>, 2> bob;
  const std::array<UnitVector3, 2> alice_settings{UnitVector3(0.0, 0.0, 1.0),
                                                  UnitVector3(1.0, 0.0, 0.0)};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto runs = run_trials(s.plan(fmt::format("c7/nosig/{}", k)), [&](RngStream& rng) {
      NlBox box(rng.lane(1));
      return value(p.nlbox(alice_settings[k], b, rng, box).outcome.bob);
    });
    bob[k] = runs;
  }
  s.check(7, no_signaling_check(span(bob[0]), span(bob[1]),
                                "nl-box protocol: Bob's output independent of a"));
  s.close(7, "PR box constraint, no-signaling, CHSH value 4");
}

inline void criterion_povm(SuiteBuilder& s) {
  const auto& p = s.options().protocols;
  const PovmSpec sic = tetrahedral_sic_povm();
  const std::vector<double> expected = povm_joint_table(sic, sic);

  // Closed form by brute-force summation before it is used as an oracle.
  double total = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < sic.size(); ++i) {
    for (std::size_t j = 0; j < sic.size(); ++j) {
      const double v = expected[i * sic.size() + j];
      total += v;
      worst = std::max(worst, std::abs(v - (i == j ? 0.0 : 1.0 / 12.0)));
    }
  }
  s.check(8, within_tolerance("SIC povm_joint sums to 1", total, 1.0, 1e-12));
  s.check(8, GofVerdict::make("SIC povm_joint = 0 (i=j), 1/12 (i!=j)", worst, 1e-12));

  auto joint_counts = [&](const std::vector<PovmRun>& runs) {
    std::vector<std::uint64_t> counts(sic.size() * sic.size(), 0);
    for (const auto& r : runs) {
      if (r.outcome.accepted()) ++counts[*r.outcome.alice * sic.size() + *r.outcome.bob];
    }
    return counts;
  };
  auto run_variant = [&](PovmVariant v) {
    return run_trials(s.plan(fmt::format("c8/{}", to_string(v))),
                      [&](RngStream& rng) { return p.povm(sic, sic, v, rng); });
  };
  const auto n = s.options().trials;

  {
    const auto runs = run_variant(PovmVariant::postselect);
    std::uint64_t abort_a = 0;
    std::uint64_t abort_b = 0;
    for (const auto& r : runs) {
      abort_a += !r.outcome.alice.has_value();
      abort_b += !r.outcome.bob.has_value();
    }
    s.check(8, proportion_within("(a) post-selection P(abort A) = 2/3", abort_a, n, 2.0 / 3.0));
    s.check(8, proportion_within("(a) post-selection P(abort B) = 2/3", abort_b, n, 2.0 / 3.0));
    s.check(8, guarded_chi_square(joint_counts(runs), expected, 1e-3,
                                  "(a) conditional (i,j) vs povm_joint"));
  }
  {
    const auto runs = run_variant(PovmVariant::communication);
    std::vector<ResourceLedger> ledgers;
    std::uint64_t bad_rounds = 0;
    for (const auto& r : runs) {
      ledgers.push_back(r.ledger);
      bad_rounds += r.ledger.total_bits() != 3 * r.ledger.rounds || r.ledger.nlbit_uses != 0;
    }
    const ResourceMeans m = summarize_ledgers(ledgers);
    s.check(8, within_tolerance("(b) communication mean bits = 6", m.bits_total, 6.0, 0.05));
    s.check(8, within_tolerance("(b) communication mean rounds = 2", m.rounds, 2.0, 0.02));
    s.check(8, exact_count("(b) runs where bits != 3 per round", bad_rounds));
    s.check(8, guarded_chi_square(joint_counts(runs), expected, 1e-3,
                                  "(b) conditional (i,j) vs povm_joint"));
    s.info(8, fmt::format("(b) max rounds observed {}", m.max_rounds));
  }
  {
    const auto runs = run_variant(PovmVariant::nlbox_comm);
    std::vector<ResourceLedger> ledgers;
    std::uint64_t bad_rounds = 0;
    for (const auto& r : runs) {
      ledgers.push_back(r.ledger);
      bad_rounds += r.ledger.nlbit_uses != r.ledger.rounds ||
                    r.ledger.total_bits() != 2 * r.ledger.rounds;
    }
    const ResourceMeans m = summarize_ledgers(ledgers);
    s.check(8, within_tolerance("(c) nl-box mean nl-bits = 2", m.nlbit_uses, 2.0, 0.03));
    s.check(8, within_tolerance("(c) nl-box mean bits = 4", m.bits_total, 4.0, 0.05));
    s.check(8, exact_count("(c) runs where nl-bits != rounds or bits != 2 per round", bad_rounds));
    s.check(8, guarded_chi_square(joint_counts(runs), expected, 1e-3,
                                  "(c) conditional (i,j) vs povm_joint"));
  }
  s.close(8, "POVM protocols with the tetrahedral SIC POVM");
}

inline void criterion_steiner(SuiteBuilder& s) {
  const auto& p = s.options().protocols;
  std::vector<std::uint64_t> indices;
  for (const auto& [a, b] : dot_ladder()) {
    const std::string label = dot_label(a, b);
    const auto runs = run_trials(s.plan("c9/" + label),
                                 [&](RngStream& rng) { return p.steiner(a, b, rng); });
    std::vector<SpinOutcome> outcomes;
    std::uint64_t bad_bits = 0;
    for (const auto& r : runs) {
      outcomes.push_back(r.run.outcome);
      bad_bits += r.run.ledger.bits_a_to_b != r.accepted_index + 1;
    }
    const TrialStats st = estimate_correlation(outcomes);
    const double expected = singlet_correlation(a, b);
    s.check(9, mean_within("steiner E(AB) " + label, st.mean, expected,
                           spin_sigma(expected, st.n_effective)));
    s.check(9, exact_count("steiner unary index cost != k+1 bits " + label, bad_bits));
    if (indices.empty()) {
      for (const auto& r : runs) indices.push_back(r.accepted_index);
    }
  }
  double mean_k = 0.0;
  for (const auto k : indices) mean_k += static_cast<double>(k);
  mean_k /= static_cast<double>(indices.size());
  s.check(9, within_tolerance("steiner E[k] = 1", mean_k, 1.0, 0.02));
  std::string growth = "max k over first N runs:";
  for (std::uint64_t n = 1000; n <= indices.size(); n *= 10) {
    growth += fmt::format(" N={} -> {}", n,
                          *std::max_element(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(n)));
  }
  s.info(9, growth);
  s.close(9, "Steiner index protocol");
}

inline void criterion_determinism(SuiteBuilder& s) {
  const auto& p = s.options().protocols;
  const UnitVector3 a(0.0, 0.0, 1.0);
  const UnitVector3 b = UnitVector3::in_xz_plane(1.0);
  const PovmSpec sic = tetrahedral_sic_povm();
  const std::uint64_t n = std::max<std::uint64_t>(1000, s.options().trials / 5);
  const unsigned many = std::max(2u, s.options().threads);

  auto spin_runs = [&](unsigned threads) {
    TrialPlan plan = s.plan("c10/spin", n);
    plan.threads = threads;
    return run_trials(plan, [&](RngStream& rng) { return p.communication(a, b, rng); });
  };
  auto povm_runs = [&](unsigned threads) {
    TrialPlan plan = s.plan("c10/povm", n);
    plan.threads = threads;
    return run_trials(plan, [&](RngStream& rng) {
      const PovmRun r = p.povm(sic, sic, PovmVariant::nlbox_comm, rng);
      return std::pair{r.outcome, r.ledger};
    });
  };
  auto mismatches = [](const auto& x, const auto& y) {
    std::uint64_t bad = x.size() == y.size() ? 0 : 1;
    for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) bad += !(x[k] == y[k]);
    return bad;
  };
  const auto spin_once = spin_runs(1);
  s.check(10, exact_count("communication runs differ on repeat", mismatches(spin_once, spin_runs(1))));
  s.check(10, exact_count("communication runs differ across thread counts",
                          mismatches(spin_once, spin_runs(many))));
  const auto povm_once = povm_runs(1);
  s.check(10, exact_count("POVM nl-box runs differ on repeat", mismatches(povm_once, povm_runs(1))));
  s.check(10, exact_count("POVM nl-box runs differ across thread counts",
                          mismatches(povm_once, povm_runs(many))));
  s.close(10, "determinism across repeats and thread counts");
}

}  // namespace detail

/// Runs every acceptance criterion and collects one verdict per check.
inline AcceptanceReport run_acceptance(const AcceptanceOptions& options = {}) {
  detail::SuiteBuilder s(options);
  detail::criterion_singlet_communication(s);
  detail::criterion_resource_exactness(s);
  detail::criterion_werner(s);
  detail::criterion_postselection(s);
  detail::criterion_chsh(s);
  detail::criterion_samplers(s);
  detail::criterion_pr_box(s);
  detail::criterion_povm(s);
  detail::criterion_steiner(s);
  detail::criterion_determinism(s);
  return s.take();
}

}  // namespace distsample
