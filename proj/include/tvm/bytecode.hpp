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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tvm/value.hpp"

namespace tvm {

enum class Opcode : std::uint8_t {
  ConstInt,
  LoadLocal,
  StoreLocal,
  Dup,
  Pop,
  Add,
  Sub,
  Mul,
  Mod,
  Le,
  Lt,
  Eq,
  Jump,
  JumpIfTrue,
  JumpIfFalse,
  JumpBackward,
  Call,
  Ret,
  ArrayNew,
  ArrayAt,
  ArrayAtPut,
  ArrayLen,
  ArrayFill,
  ArrayClear,
  Print,
  Halt,
  ConstMethod,
  CallValue,
};

inline constexpr std::size_t kOpcodeCount = static_cast<std::size_t>(Opcode::CallValue) + 1;

std::string_view opcode_name(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view name);

bool is_jump(Opcode op);
bool is_conditional_jump(Opcode op);
/// Opcodes that only transfer control. Everything else runs through a
/// data-path handler and appears as a handler call in tier-1 traces.
bool is_control(Opcode op);
bool is_call(Opcode op);

struct Instruction {
  Opcode op = Opcode::Halt;
  /// CONST_INT / ARRAY_FILL value, local slot, or jump target.
  std::int64_t operand = 0;
  /// Argument count for CALL and CALL_VALUE.
  std::uint32_t argc = 0;
  /// Callee name for CALL and CONST_METHOD.
  std::string name;
  /// Resolved callee, filled in by Program::link. Not part of the structural
  /// identity of an instruction.
  MethodId callee = kNoMethod;

  std::size_t target() const { return static_cast<std::size_t>(operand); }

  friend bool operator==(const Instruction& a, const Instruction& b) {
    return a.op == b.op && a.operand == b.operand && a.argc == b.argc && a.name == b.name;
  }
};

struct Method {
  std::string name;
  std::uint32_t arg_count = 0;
  std::uint32_t num_locals = 0;
  std::vector<Instruction> code;

  // Filled by the validator.
  std::uint32_t max_stack = 0;
  /// Operand-stack depth on entry to each instruction; -1 when unreachable.
  std::vector<std::int32_t> stack_depth;

  friend bool operator==(const Method& a, const Method& b) {
    return a.name == b.name && a.arg_count == b.arg_count && a.num_locals == b.num_locals &&
           a.code == b.code;
  }
};

class Program {
 public:
  std::vector<Method> methods;
  std::string entry = "main";

  MethodId add_method(Method m);
  std::optional<MethodId> find(std::string_view name) const;
  const Method& method(MethodId id) const { return methods[id]; }
  MethodId entry_id() const;

  /// Resolves CALL / CONST_METHOD names. Unknown names stay kNoMethod and are
  /// reported by the validator.
  void link();

  friend bool operator==(const Program& a, const Program& b) {
    return a.entry == b.entry && a.methods == b.methods;
  }

 private:
  std::unordered_map<std::string, MethodId> index_;
};

}  // namespace tvm
