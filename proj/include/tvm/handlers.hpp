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

#include <array>
#include <cstddef>

#include "tvm/bytecode.hpp"
#include "tvm/frame.hpp"

namespace tvm {

class Runtime;

/// Result of running one handler. Handlers never fetch, decode, or advance
/// the pc; the caller does, which is what lets threaded code replay them
/// without a dispatch loop.
struct HandlerOutcome {
  enum class Kind { Continue, Jump, Return };
  Kind kind = Kind::Continue;
  std::size_t target = 0;
  Value value;

  static HandlerOutcome proceed() { return {}; }
  static HandlerOutcome jump(std::size_t t) { return {Kind::Jump, t, {}}; }
  static HandlerOutcome ret(Value v) { return {Kind::Return, 0, v}; }
};

using Handler = HandlerOutcome (*)(Frame&, const Instruction&, Runtime&);

/// One handler per opcode, indexed by Opcode.
const std::array<Handler, kOpcodeCount>& handler_table();

inline Handler handler_for(Opcode op) { return handler_table()[static_cast<std::size_t>(op)]; }

// Value semantics shared by handlers and trace execution.
bool truthy(const Value& v);
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_sub(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
/// Floored modulo: the result takes the sign of the divisor.
std::int64_t floored_mod(std::int64_t a, std::int64_t b);
std::int64_t expect_int(const Value& v, const char* what);
/// 1-based index check; returns the 0-based position.
std::size_t checked_index(const std::vector<std::int64_t>& arr, std::int64_t index);

}  // namespace tvm
