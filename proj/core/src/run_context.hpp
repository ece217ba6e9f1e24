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

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mslab/config.hpp"
#include "mslab/io.hpp"
#include "mslab/pipeline.hpp"

namespace mslab::detail {

class RunContext {
 public:
  RunContext(const ScenarioConfig& config, RunReport& report) : config_(config), report_(report) {}

  const ScenarioConfig& config() const { return config_; }

  /// Runs `fn(step)` and records its wall time.
  template <typename F>
  void step(const std::string& name, F&& fn) {
    StepReport s;
    s.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    fn(s);
    s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report_.steps.push_back(std::move(s));
  }

  void check(const std::string& name, double value, const std::string& relation, double threshold) {
    bool ok = false;
    if (relation == "<=") ok = value <= threshold;
    else if (relation == "<") ok = value < threshold;
    else if (relation == ">") ok = value > threshold;
    report_.checks.push_back({name, value, relation, threshold, ok});
  }

  std::string path(const std::string& file) {
    if (std::find(files_.begin(), files_.end(), file) == files_.end()) files_.push_back(file);
    return (std::filesystem::path(config_.output_dir) / file).string();
  }

  void write(const std::string& file, const CsvTable& table) { table.write(path(file)); }
  void write(const std::string& file, const GridFile& grid) { write_grid_file(path(file), grid); }

  const std::vector<std::string>& files() const { return files_; }

 private:
  const ScenarioConfig& config_;
  RunReport& report_;
  std::vector<std::string> files_;
};

void run_verify(RunContext& run);

}  // namespace mslab::detail
