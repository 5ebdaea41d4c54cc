// Copyright 2026 The sgkl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sgkl/error.hpp"
#include "sgkl/harness/bounds_report.hpp"
#include "sgkl/harness/config.hpp"
#include "sgkl/harness/experiments.hpp"
#include "sgkl/harness/output.hpp"
#include "sgkl/harness/verify.hpp"

namespace {

namespace h = sgkl::harness;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  bool allow_out_of_regime = false;
};

h::Config resolve(const GlobalFlags& flags) {
  h::Config config =
      flags.config_path.empty() ? h::Config{} : h::load_config(flags.config_path);
  if (flags.seed) config.run.seed = *flags.seed;
  if (flags.threads) config.run.threads = *flags.threads;
  if (flags.out_dir) config.run.out_dir = *flags.out_dir;
  if (flags.allow_out_of_regime) config.run.allow_out_of_regime = true;
  h::validate(config);
  return config;
}

void write_outputs(const std::string& subcommand, const h::Config& config,
                   const std::vector<h::ResultRow>& rows, double seconds) {
  const std::filesystem::path dir(config.run.out_dir);
  h::write_csv((dir / (subcommand + ".csv")).string(), rows);
  h::write_text_file((dir / "manifest.json").string(),
                     h::manifest_json(subcommand, h::to_json(config), seconds,
                                      rows.size()));
}

void print_notes(const std::vector<std::string>& notes) {
  for (const auto& n : notes) std::cerr << n << "\n";
}

int run(const std::string& subcommand, const h::Config& config,
        const std::string& bounds_format) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  };
  if (subcommand == "sweep" || subcommand == "spike" || subcommand == "blr") {
    const h::ExperimentOutput out = subcommand == "sweep" ? h::run_bias_sweep(config)
                                    : subcommand == "spike"
                                        ? h::run_spike_table(config)
                                        : h::run_blr(config);
    print_notes(out.notes);
    write_outputs(subcommand, config, out.rows, elapsed());
    std::cout << fmt::format("{}: {} rows written to {}\n", subcommand,
                             out.rows.size(), config.run.out_dir);
    return kExitOk;
  }
  if (subcommand == "bounds") {
    const h::BoundsReport report = h::bounds_report(config);
    const std::string format =
        bounds_format.empty() ? config.bounds.format : bounds_format;
    std::cout << (format == "json" ? report.json : report.text);
    write_outputs(subcommand, config, report.rows, elapsed());
    h::write_text_file(
        (std::filesystem::path(config.run.out_dir) / "bounds.json").string(),
        report.json);
    return kExitOk;
  }
  const h::VerifyReport report = h::run_verify(config);
  std::vector<h::ResultRow> rows;
  for (const auto& c : report.checks) {
    std::cout << fmt::format("{:<28} {}  {}\n", c.name, c.passed ? "PASS" : "FAIL",
                             c.detail);
    rows.push_back({"verify", "check", std::nullopt, std::nullopt, c.name,
                    c.passed ? 1.0 : 0.0, std::nullopt, 1, config.run.seed});
  }
  write_outputs(subcommand, config, rows, elapsed());
  h::write_text_file(
      (std::filesystem::path(config.run.out_dir) / "verify.json").string(),
      report.to_json());
  std::cout << fmt::format("verify: {}/{} checks passed\n",
                           report.checks.size() - report.failures(),
                           report.checks.size());
  return report.passed() ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-gradient kinetic Langevin samplers and bounds"};
  app.set_version_flag("--version", sgkl::harness::version_string());
  app.require_subcommand(1, 1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "TOML configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", flags.seed, "Master seed");
  app.add_option("--threads", flags.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", flags.out_dir, "Output directory");
  app.add_flag("--allow-out-of-regime", flags.allow_out_of_regime,
               "Run and tag step sizes outside the analysed regime");

  std::string bounds_format;
  std::string inject_fault;
  app.add_subcommand("sweep", "Bias against step size on the toy target");
  app.add_subcommand("spike", "Spike-noise bias table");
  app.add_subcommand("blr", "Bayesian logistic regression run");
  auto* bounds = app.add_subcommand("bounds", "Report of every closed-form bound");
  bounds->add_option("--format", bounds_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  auto* verify = app.add_subcommand("verify", "Run the verification checks");
  verify->add_option("--inject-fault", inject_fault, "Deliberate fault to inject")
      ->check(CLI::IsMember({"sigma2_sign"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  try {
    h::Config config = resolve(flags);
    if (!inject_fault.empty()) config.verify.inject_fault = inject_fault;
    return run(subcommand, config, bounds_format);
  } catch (const sgkl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sgkl::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sgkl::InvariantError& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return kExitVerify;
  } catch (const sgkl::Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
