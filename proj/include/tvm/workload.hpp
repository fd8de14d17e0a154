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
#include <functional>
#include <map>
#include <random>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tvm/bytecode.hpp"

namespace tvm {

struct SuiteEntry {
  /// Path of a `.tvm` file whose entry method takes no arguments.
  std::string file;
  std::uint64_t iterations = 1;

  friend bool operator==(const SuiteEntry&, const SuiteEntry&) = default;
};

struct SuiteSpec {
  std::vector<SuiteEntry> subprograms;
  std::uint64_t variant_seed = 0;

  friend bool operator==(const SuiteSpec&, const SuiteSpec&) = default;
};

inline constexpr const char* kSuiteDriver = "__suite_main";

/// Combines the subprograms into one program. Methods are renamed
/// `<file stem>.<name>`; a driver method calls each subprogram's entry
/// `iterations` times in suite order and returns 0.
Program build_suite_program(const SuiteSpec& suite);

/// Method name -> invocation count.
using MethodProfile = std::map<std::string, std::uint64_t>;

/// Invocation counts from an interpreter-only run of the suite. Methods that
/// never run and the driver are left out.
MethodProfile profile_suite(const SuiteSpec& suite);

struct FitPoint {
  std::size_t rank = 0;
  std::uint64_t count = 0;
  std::string name;
};

struct RegressionFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t n = 0;
  /// Counts had zero variance in log space; r2 is reported as 0.
  bool degenerate = false;
  std::vector<FitPoint> points;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least squares of ln(count) on ln(rank), rank 1 being the most invoked
/// method. Ties rank by name. Points with count < min_count are dropped
/// before ranking.
RegressionFit fit_loglog(const MethodProfile& profile, std::uint64_t min_count = 0);

struct TuneReport {
  SuiteSpec suite;
  RegressionFit fit;
  std::size_t rounds = 0;
  bool target_met = false;
  /// Best r2 after each completed round (index 0 is the starting suite).
  std::vector<double> history;
};

struct TuneOptions {
  double target_r2 = 0.98;
  std::size_t max_rounds = 50;
  std::uint64_t min_count = 0;
  std::uint64_t max_iterations = 1u << 20;
};

/// Coordinate search over per-subprogram iteration counts: each round tries
/// halving and doubling every count and keeps the single change that brings
/// r2 closest to the target. Stops when r2 >= target, when no change helps,
/// or after max_rounds.
TuneReport tune_iterations(const SuiteSpec& suite, const TuneOptions& options);

/// Profile source for tuning; the default runs profile_suite on one
/// subprogram at a time and caches by (file, iterations).
using SubprogramProfiler = std::function<MethodProfile(const SuiteEntry&)>;
TuneReport tune_iterations(const SuiteSpec& suite, const TuneOptions& options,
                           const SubprogramProfiler& profiler);

/// Variant 1 is `suite` itself; the others are seeded shuffles of it.
std::vector<SuiteSpec> make_variants(const SuiteSpec& suite, std::size_t n, std::uint64_t seed);

/// Uniform integer in [0, bound) from a 64-bit Mersenne Twister, identical
/// on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

nlohmann::json to_json(const SuiteSpec& suite);
SuiteSpec suite_from_json(const nlohmann::json& j);
/// Text of the manifest written for variant `number` (1-based).
std::string variant_document(const SuiteSpec& suite, std::size_t number);
/// `variant_NN.json`.
std::string variant_file_name(std::size_t number);
nlohmann::json to_json(const RegressionFit& fit);

/// Reads every `*.tvm` in `dir`, sorted by file name, each with one iteration.
SuiteSpec suite_from_directory(const std::string& dir);

}  // namespace tvm
