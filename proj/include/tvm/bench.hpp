/*
 * Copyright 2026 The tvm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tvm/runtime.hpp"
#include "tvm/workload.hpp"

namespace tvm {

/// Something to benchmark: a suite manifest or a single program file.
struct BenchSource {
  enum class Kind { Suite, Program };
  Kind kind = Kind::Suite;
  std::string name;
  std::string path;
};

struct BenchConfig {
  std::vector<BenchSource> sources;
  std::vector<ExecMode> modes;
  std::size_t iterations = 20;
  Thresholds thresholds;
  bool inline_cache = true;
};

/// Reads the bench configuration document:
///   {"suites": [manifest paths], "suite_dir": dir of variant_*.json,
///    "programs": [.tvm paths], "modes": [...], "iterations": N,
///    "t1_threshold": N, "t2_threshold": N, "inline_cache": bool}
/// Relative paths resolve against `base_dir`.
BenchConfig bench_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

struct SeriesStats {
  double median = 0;
  double mean = 0;
  /// Sample variance (n - 1 denominator); 0 for a single value.
  double variance = 0;
  std::size_t n = 0;
};

SeriesStats summarize(std::vector<double> values);

/// Number of trailing iterations averaged for the peak figure.
inline std::size_t peak_window(std::size_t iterations) { return (iterations + 1) / 2; }

/// Runs every (source, mode) cell with a fresh VM and returns the results
/// document (schema in README). Cells that fail are recorded and skipped.
nlohmann::json bench(const BenchConfig& config);

/// Aggregates recomputed from the cells of a results document.
nlohmann::json aggregate(const nlohmann::json& cells);

/// Ratios of `candidate` over `baseline` per source, with geometric means.
nlohmann::json compare(const nlohmann::json& results, ExecMode baseline, ExecMode candidate);

/// Achieved ratios next to the published ones.
nlohmann::json directionality(const nlohmann::json& results);

}  // namespace tvm
