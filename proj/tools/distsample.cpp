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

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "distsample/cli.hpp"

namespace {

using distsample::Vec3;
using distsample::cli::ConfigError;
using distsample::cli::ExperimentConfig;

struct SeedOption {
  std::string text;
  std::uint64_t resolve() const {
    if (text.empty()) return distsample::cli::default_seed();
    if (const auto s = distsample::cli::parse_seed(text)) return *s;
    throw ConfigError("--seed must be a decimal or 0x-prefixed hex integer, got '" + text + "'");
  }
};

struct VectorOption {
  std::string text;
  std::optional<Vec3> resolve() const {
    if (text.empty()) return std::nullopt;
    return distsample::cli::parse_vector(text);
  }
};

void add_common(CLI::App* cmd, ExperimentConfig& c, SeedOption& seed) {
  cmd->add_option("--trials", c.trials, "Number of trials (per setting pair for chsh)");
  cmd->add_option("--seed", seed.text, "Master seed (decimal or 0x hex); default from DISTSAMPLE_SEED");
  cmd->add_option("--threads", c.threads, "Worker threads (results do not depend on this)")
      ->check(CLI::Range(1u, 1024u));
  cmd->add_option("--format", c.format, "Output format")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, distsample::OutputFormat>{{"json", distsample::OutputFormat::json},
                                                          {"csv", distsample::OutputFormat::csv}}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical simulation of singlet correlations with metered resources"};
  app.require_subcommand(1);

  ExperimentConfig config;
  SeedOption seed;
  VectorOption a, b, a1, a2, b1, b2;
  std::string povm_file;

  auto* simulate = app.add_subcommand("simulate", "Run one protocol at fixed settings");
  simulate->add_option("--protocol", config.protocol, "Protocol to run")
      ->required()
      ->check(CLI::IsMember({"werner", "postselection", "postselection-sym", "communication",
                             "steiner", "nlbox", "povm"}));
  simulate->add_option("--angle-deg", config.angle_deg, "a = +z, b at this angle in the x-z plane");
  simulate->add_option("--a", a.text, "Alice's setting x,y,z");
  simulate->add_option("--b", b.text, "Bob's setting x,y,z");
  simulate->add_option("--povm-a", config.povm_a, "Alice's POVM file")->check(CLI::ExistingFile);
  simulate->add_option("--povm-b", config.povm_b, "Bob's POVM file")->check(CLI::ExistingFile);
  simulate->add_option("--variant", config.variant,
                       "POVM variant: postselect, communication, nlbox_comm");
  simulate->add_option("--encoding", config.encoding, "Steiner index encoding: unary, elias-gamma");
  simulate->add_option("--per-trial", config.per_trial_path, "Write per-trial CSV to this file");
  add_common(simulate, config, seed);

  auto* chsh = app.add_subcommand("chsh", "Estimate the CHSH value of a protocol");
  chsh->add_option("--protocol", config.protocol, "Protocol to run")
      ->required()
      ->check(CLI::IsMember({"werner", "postselection", "postselection-sym", "communication",
                             "steiner", "nlbox"}));
  chsh->add_option("--a1", a1.text, "x,y,z");
  chsh->add_option("--a2", a2.text, "x,y,z");
  chsh->add_option("--b1", b1.text, "x,y,z");
  chsh->add_option("--b2", b2.text, "x,y,z");
  chsh->add_option("--encoding", config.encoding, "Steiner index encoding: unary, elias-gamma");
  add_common(chsh, config, seed);

  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--trials", config.trials, "Trials per statistical check");
  verify->add_option("--seed", seed.text, "Master seed (decimal or 0x hex)");
  verify->add_option("--threads", config.threads, "Worker threads")->check(CLI::Range(1u, 1024u));

  auto* povm_check = app.add_subcommand("povm-check", "Validate a POVM file");
  povm_check->add_option("file", povm_file, "POVM file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : distsample::cli::kConfigError;
  }

  try {
    config.seed = seed.resolve();
    if (*simulate) {
      config.a = a.resolve();
      config.b = b.resolve();
      return distsample::cli::cmd_simulate(config, std::cout, std::cerr);
    }
    if (*chsh) {
      config.a1 = a1.resolve();
      config.a2 = a2.resolve();
      config.b1 = b1.resolve();
      config.b2 = b2.resolve();
      return distsample::cli::cmd_chsh(config, std::cout, std::cerr);
    }
    if (*verify) {
      if (verify->count("--trials") == 0) config.trials = 100'000;
      return distsample::cli::cmd_verify(config.seed, config.threads, std::cout, config.trials);
    }
    return distsample::cli::cmd_povm_check(povm_file, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return distsample::cli::kConfigError;
  }
}
