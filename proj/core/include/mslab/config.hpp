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
#include <vector>

#include "mslab/potentials.hpp"
#include "mslab/types.hpp"

namespace mslab {

enum class PipelineKind { Forward, CgoDiagnostics, RecoverCurl, RecoverQ, Boundary, Verify };

PipelineKind parse_pipeline(const std::string& name);
std::string pipeline_name(PipelineKind kind);

/// A rejected configuration. `field` is a dotted path such as
/// "potentials.side1.A[0].width"; line and column are 1-based, 0 if unknown.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(std::string field, const std::string& message, int line = 0, int column = 0);

  const std::string& field() const { return field_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  std::string field_;
  int line_ = 0;
  int column_ = 0;
};

struct Tolerances {
  double gauge_frobenius = 5e-2;
  double dbar_residual = 1e-2;
  double carleman_growth = 1.5;
  double eskin_ralston = 2e-2;
  double exact_identity = 1e-12;
  double curl_l2 = 0.1;
  double q_l2 = 0.15;
  double boundary = 0.1;
  double normalization = 0.05;
  double solve_residual = 1e-8;

  bool operator==(const Tolerances&) const = default;
};

/// Everything a run needs. Documented ranges are enforced by validate().
struct ScenarioConfig {
  std::string name = "default";
  PipelineKind pipeline = PipelineKind::Verify;

  double radius = 1.0;
  std::size_t grid = 32;

  /// Side 1 is (A1, q1), side 2 is (A2, q2).
  PotentialModel side1;
  PotentialModel side2;

  std::vector<double> h_sweep{0.4, 0.2, 0.1, 0.05};
  double sigma = 0.25;
  double epsilon = 0.25;
  double xi_max = 2.0;
  std::vector<double> m_sweep{8.0, 16.0, 32.0};
  int max_degree = 3;
  std::string scheme = "expansion";
  Vec3 xi{0.0, 0.0, 1.0};
  Vec3 x0{0.0, 0.0, 1.0};
  Vec3 tau{1.0, 0.0, 0.0};
  Tolerances tolerances;

  std::string output_dir = "mslab-out";
  /// Required by pipelines with randomized families (verify, cgo-diagnostics).
  std::optional<std::uint64_t> seed;
  int threads = 1;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& config);

/// Parses and validates JSON text; unknown keys are errors.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
/// Canonical JSON; parse_config(to_json(c)) == c.
std::string to_json(const ScenarioConfig& config);

/// Built-in scenario for each pipeline.
ScenarioConfig default_config(PipelineKind kind);

}  // namespace mslab
