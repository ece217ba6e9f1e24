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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mslab/config.hpp"

namespace mslab {

struct StepReport {
  std::string name;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, double>> diagnostics;
};

/// `value relation threshold`, relation one of "<=", "<", ">".
struct CheckResult {
  std::string name;
  double value = 0.0;
  std::string relation = "<=";
  double threshold = 0.0;
  bool passed = false;
};

struct ArtifactEntry {
  /// Relative to the output directory.
  std::string path;
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct RunReport {
  std::string pipeline;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  std::string config_sha256;
  std::vector<StepReport> steps;
  /// Property checks, also written to checks.csv.
  std::vector<CheckResult> checks;
  /// Comparison of this run's files against the manifest of a previous run
  /// with the same config in the same directory; not part of checks.csv.
  std::vector<CheckResult> rerun_checks;
  std::vector<ArtifactEntry> artifacts;
  double wall_seconds = 0.0;

  bool passed() const;
};

/// Validates the config, runs the pipeline into config.output_dir and writes
/// report.json there. Throws ConfigError on invalid configs and
/// NumericalError on numerical failures; failed checks are reported, not thrown.
RunReport run_pipeline(const ScenarioConfig& config);

std::string report_to_json(const RunReport& report);
RunReport read_report(const std::string& path);

/// Paths listed in a report whose file is missing or whose hash changed.
std::vector<std::string> verify_manifest(const std::string& report_path);

}  // namespace mslab
