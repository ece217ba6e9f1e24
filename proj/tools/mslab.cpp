// Copyright (C) 2026 The mslab Authors
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

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mslab/config.hpp"
#include "mslab/io.hpp"
#include "mslab/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct RunFlags {
  std::string config;
  std::string out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("mslab");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  const char* env = std::getenv("MSLAB_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

mslab::ScenarioConfig resolve_config(mslab::PipelineKind kind, const RunFlags& flags) {
  mslab::ScenarioConfig c = flags.config.empty() ? mslab::default_config(kind) : mslab::load_config(flags.config);
  if (c.pipeline != kind)
    throw mslab::ConfigError("pipeline", "config names '" + mslab::pipeline_name(c.pipeline) +
                                             "' but the subcommand runs '" + mslab::pipeline_name(kind) + "'");
  if (!flags.out.empty()) c.output_dir = flags.out;
  if (flags.threads) c.threads = *flags.threads;
  if (flags.seed) c.seed = *flags.seed;
  if (flags.grid) c.grid = *flags.grid;
  mslab::validate(c);
  return c;
}

int run(mslab::PipelineKind kind, const RunFlags& flags) {
  const mslab::ScenarioConfig c = resolve_config(kind, flags);
  spdlog::info("running {} on scenario '{}' (grid {}, out {})", mslab::pipeline_name(kind), c.name, c.grid,
               c.output_dir);
  const mslab::RunReport r = mslab::run_pipeline(c);
  for (const auto& s : r.steps) spdlog::debug("step '{}' took {:.3f} s", s.name, s.wall_seconds);
  for (const auto& k : r.checks)
    std::printf("%s  %s: %s %s %s\n", k.passed ? "PASS" : "FAIL", k.name.c_str(), mslab::format_real(k.value).c_str(),
                k.relation.c_str(), mslab::format_real(k.threshold).c_str());
  for (const auto& k : r.rerun_checks)
    if (!k.passed) std::printf("FAIL  %s\n", k.name.c_str());
  std::printf("%zu artifacts, report %s/report.json, %.1f s\n", r.artifacts.size(), c.output_dir.c_str(),
              r.wall_seconds);
  if (!r.passed()) {
    spdlog::error("{} check(s) failed", std::count_if(r.checks.begin(), r.checks.end(), [](const auto& k) { return !k.passed; }) +
                                            std::count_if(r.rerun_checks.begin(), r.rerun_checks.end(),
                                                          [](const auto& k) { return !k.passed; }));
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Magnetic Schrodinger inverse-problem lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mslab 0.1.0");

  RunFlags flags;
  std::optional<mslab::PipelineKind> kind;
  const std::pair<const char*, const char*> commands[] = {
      {"forward", "Cauchy data maps of both sides"},
      {"cgo", "CGO construction and Carleman diagnostics"},
      {"recover-curl", "curl of A1 - A2 from scattering samples"},
      {"recover-q", "q1 - q2 from scattering samples"},
      {"boundary", "tangential A1 - A2 at a boundary point"},
      {"verify", "seeded property suites"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "scenario JSON file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--threads", flags.threads, "worker threads");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--grid", flags.grid, "grid nodes per axis");
    sub->callback([&kind, n = std::string(name)] { kind = mslab::parse_pipeline(n); });
  }
  std::string diff_a, diff_b;
  CLI::App* diff = app.add_subcommand("diff", "relative Frobenius difference of two Cauchy map files");
  diff->add_option("a", diff_a, "first map")->required()->check(CLI::ExistingFile);
  diff->add_option("b", diff_b, "second map (reference)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (diff->parsed()) {
      std::printf("%s\n", mslab::format_real(mslab::diff_cauchy_maps(diff_a, diff_b)).c_str());
      return kExitOk;
    }
    return run(*kind, flags);
  } catch (const mslab::InvalidArgument& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const mslab::IoError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const mslab::NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitNumeric;
  }
}
