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

#include "tvm/bytecode.hpp"

#include <array>

namespace tvm {
namespace {

constexpr std::array<std::string_view, kOpcodeCount> kNames = {
    "CONST_INT",    "LOAD_LOCAL",   "STORE_LOCAL", "DUP",        "POP",          "ADD",
    "SUB",          "MUL",          "MOD",         "LE",         "LT",           "EQ",
    "JUMP",         "JUMP_IF_TRUE", "JUMP_IF_FALSE", "JUMP_BACKWARD", "CALL",     "RET",
    "ARRAY_NEW",    "ARRAY_AT",     "ARRAY_AT_PUT", "ARRAY_LEN", "ARRAY_FILL",   "ARRAY_CLEAR",
    "PRINT",        "HALT",         "CONST_METHOD", "CALL_VALUE",
};

}  // namespace

std::string_view opcode_name(Opcode op) { return kNames[static_cast<std::size_t>(op)]; }

std::optional<Opcode> opcode_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Opcode>(i);
  }
  return std::nullopt;
}

bool is_jump(Opcode op) {
  return op == Opcode::Jump || op == Opcode::JumpIfTrue || op == Opcode::JumpIfFalse ||
         op == Opcode::JumpBackward;
}

bool is_conditional_jump(Opcode op) {
  return op == Opcode::JumpIfTrue || op == Opcode::JumpIfFalse;
}

bool is_control(Opcode op) { return is_jump(op) || op == Opcode::Ret; }

bool is_call(Opcode op) { return op == Opcode::Call || op == Opcode::CallValue; }

MethodId Program::add_method(Method m) {
  auto id = static_cast<MethodId>(methods.size());
  index_.emplace(m.name, id);
  methods.push_back(std::move(m));
  return id;
}

std::optional<MethodId> Program::find(std::string_view name) const {
  if (index_.size() != methods.size()) {
    // Methods were pushed directly; fall back to a scan.
    for (std::size_t i = 0; i < methods.size(); ++i) {
      if (methods[i].name == name) return static_cast<MethodId>(i);
    }
    return std::nullopt;
  }
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

MethodId Program::entry_id() const {
  auto id = find(entry);
  return id ? *id : kNoMethod;
}

void Program::link() {
  index_.clear();
  for (std::size_t i = 0; i < methods.size(); ++i) {
    index_.emplace(methods[i].name, static_cast<MethodId>(i));
  }
  for (auto& m : methods) {
    for (auto& inst : m.code) {
      if (inst.op == Opcode::Call || inst.op == Opcode::ConstMethod) {
        auto id = find(inst.name);
        inst.callee = id ? *id : kNoMethod;
      }
    }
  }
}

}  // namespace tvm
