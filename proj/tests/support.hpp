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
#include <string>
#include <vector>

#include "tvm/bytecode.hpp"
#include "tvm/runtime.hpp"
#include "tvm/vm.hpp"

namespace tvm::testing {

std::string source_path(const std::string& rel);
std::string read_file(const std::string& path);
Program load_program(const std::string& rel);
Program parse(const std::string& text);

/// `.tvm` files under a source-relative directory, sorted.
std::vector<std::string> program_files(const std::string& rel_dir);

VmOptions options_for(ExecMode mode, std::uint64_t t1 = 10, std::uint64_t t2 = 1000);
RunResult run_mode(const Program& p, ExecMode mode, std::uint64_t t1 = 10, std::uint64_t t2 = 1000);

/// Observable outcome of a run: value or error, output, final heap.
struct Observation {
  std::string value;
  bool halted = false;
  std::string error;
  std::string output;
  std::vector<std::vector<std::int64_t>> heap;
  friend bool operator==(const Observation&, const Observation&) = default;
};
Observation observe(const RunResult& r, const Program& p);
std::string describe(const Observation& o);

/// Random terminating, error-free program. Methods take (array, a, b); all
/// integer results stay in [0, 1000003). With `side_effects`, helpers also
/// write to, fill and clear the shared array.
std::string random_program(std::uint64_t seed, bool side_effects = true);

}  // namespace tvm::testing
