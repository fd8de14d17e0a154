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

namespace tvm {

struct RunError {
  ErrorKind kind = ErrorKind::TypeError;
  std::string message;
  std::string method;
  std::size_t pc = 0;
  Tier tier = Tier::Interpreter;

  /// Kind, message and location; the tier is deliberately left out so errors
  /// compare equal across modes.
  friend bool operator==(const RunError& a, const RunError& b) {
    return a.kind == b.kind && a.message == b.message && a.method == b.method && a.pc == b.pc;
  }
  std::string describe() const;
};

struct RunResult {
  Value value;
  bool halted = false;
  std::optional<RunError> error;
  std::string output;
  std::vector<std::vector<std::int64_t>> heap;
  /// Counter deltas for this run.
  StepCounters counters;
  std::uint64_t total_ns = 0;
};

/// A validated program plus one runtime. Repeated run() calls share compiled
/// code and profiles, as iterations of a benchmark would.
class Vm {
 public:
  Vm(Program program, VmOptions options);
  Vm(const Vm&) = delete;
  Vm& operator=(const Vm&) = delete;

  RunResult run();

  const Program& program() const { return program_; }
  Runtime& runtime() { return *runtime_; }
  const Runtime& runtime() const { return *runtime_; }

 private:
  Program program_;
  std::unique_ptr<Runtime> runtime_;
};

/// Stats document written by `tvm run --stats-json`.
nlohmann::json stats_json(const RunResult& result, const Runtime& rt,
                          std::optional<std::uint64_t> first_iteration_ns = std::nullopt);

/// Printable return value; method values use the method name.
std::string format_value(const Value& v, const Program& program);

}  // namespace tvm
