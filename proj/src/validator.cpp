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

#include "tvm/validator.hpp"

#include <algorithm>
#include <deque>

#include "tvm/errors.hpp"

namespace tvm {
namespace {

[[noreturn]] void fail(const Method& m, std::size_t pc, const std::string& msg) {
  throw ValidationError(m.name + "@" + std::to_string(pc) + ": " + msg);
}

bool falls_through(Opcode op) {
  return !(op == Opcode::Jump || op == Opcode::JumpBackward || op == Opcode::Ret ||
           op == Opcode::Halt);
}

void check_static(const Program& program, const Method& m) {
  for (std::size_t pc = 0; pc < m.code.size(); ++pc) {
    const auto& inst = m.code[pc];
    switch (inst.op) {
      case Opcode::LoadLocal:
      case Opcode::StoreLocal:
        if (inst.operand < 0 || static_cast<std::uint64_t>(inst.operand) >= m.num_locals) {
          fail(m, pc, "local index " + std::to_string(inst.operand) + " out of range");
        }
        break;
      case Opcode::Jump:
      case Opcode::JumpIfTrue:
      case Opcode::JumpIfFalse:
      case Opcode::JumpBackward: {
        if (inst.operand < 0 || static_cast<std::uint64_t>(inst.operand) >= m.code.size()) {
          fail(m, pc, "jump out of range");
        }
        bool backward = inst.target() < pc;
        if (inst.op == Opcode::JumpBackward && !backward) {
          fail(m, pc, "JUMP_BACKWARD must target an earlier instruction");
        }
        if (inst.op != Opcode::JumpBackward && inst.target() <= pc) {
          fail(m, pc, "forward jump targets an earlier instruction");
        }
        break;
      }
      case Opcode::Call:
      case Opcode::ConstMethod: {
        if (inst.callee == kNoMethod) fail(m, pc, "CALL to missing method '" + inst.name + "'");
        if (inst.op == Opcode::Call && program.method(inst.callee).arg_count != inst.argc) {
          fail(m, pc, "argument count mismatch calling '" + inst.name + "'");
        }
        break;
      }
      default:
        break;
    }
  }
}

MethodReport check_stack(Method& m) {
  std::vector<std::int32_t> depth(m.code.size(), -1);
  std::uint32_t max_stack = 0;
  std::deque<std::size_t> work;
  if (m.code.empty()) fail(m, 0, "fall off end");
  depth[0] = 0;
  work.push_back(0);

  auto flow = [&](std::size_t from, std::size_t to, std::int32_t d) {
    if (to >= m.code.size()) fail(m, from, "fall off end");
    if (depth[to] == -1) {
      depth[to] = d;
      work.push_back(to);
    } else if (depth[to] != d) {
      fail(m, to, "unbalanced stack: depth " + std::to_string(depth[to]) + " vs " +
                      std::to_string(d));
    }
  };

  while (!work.empty()) {
    std::size_t pc = work.front();
    work.pop_front();
    const auto& inst = m.code[pc];
    auto [pops, pushes] = stack_effect(inst);
    std::int32_t d = depth[pc];
    if (static_cast<std::uint32_t>(d) < pops) fail(m, pc, "stack underflow");
    std::int32_t after = d - static_cast<std::int32_t>(pops) + static_cast<std::int32_t>(pushes);
    max_stack = std::max(max_stack, static_cast<std::uint32_t>(std::max(d, after)));
    if (is_jump(inst.op)) flow(pc, inst.target(), after);
    if (falls_through(inst.op)) flow(pc, pc + 1, after);
  }

  m.max_stack = max_stack;
  m.stack_depth = depth;
  return MethodReport{m.name, max_stack, std::move(depth)};
}

}  // namespace

std::pair<std::uint32_t, std::uint32_t> stack_effect(const Instruction& inst) {
  switch (inst.op) {
    case Opcode::ConstInt:
    case Opcode::LoadLocal:
    case Opcode::ConstMethod:
      return {0, 1};
    case Opcode::StoreLocal:
    case Opcode::Pop:
    case Opcode::JumpIfTrue:
    case Opcode::JumpIfFalse:
    case Opcode::ArrayClear:
    case Opcode::Print:
      return {1, 0};
    case Opcode::Dup:
      return {1, 2};
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::Mul:
    case Opcode::Mod:
    case Opcode::Le:
    case Opcode::Lt:
    case Opcode::Eq:
    case Opcode::ArrayAt:
      return {2, 1};
    case Opcode::Jump:
    case Opcode::JumpBackward:
    case Opcode::Halt:
      return {0, 0};
    case Opcode::Call:
      return {inst.argc, 1};
    case Opcode::CallValue:
      return {inst.argc + 1, 1};
    case Opcode::Ret:
      return {1, 0};
    case Opcode::ArrayNew:
    case Opcode::ArrayLen:
    case Opcode::ArrayFill:
      return {1, 1};
    case Opcode::ArrayAtPut:
      return {3, 0};
  }
  return {0, 0};
}

ValidationReport validate(Program& program) {
  program.link();
  if (program.methods.empty()) throw ValidationError("program has no methods");
  auto entry = program.find(program.entry);
  if (!entry) throw ValidationError("entry method '" + program.entry + "' not found");
  if (program.method(*entry).arg_count != 0) {
    throw ValidationError("entry method '" + program.entry + "' must take zero arguments");
  }
  ValidationReport report;
  for (auto& m : program.methods) {
    check_static(program, m);
    report.methods.push_back(check_stack(m));
  }
  return report;
}

}  // namespace tvm
