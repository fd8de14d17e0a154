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

#include "tvm/threaded_code.hpp"

#include <sstream>

#include "tvm/errors.hpp"

namespace tvm {

std::size_t ThreadedCode::entry_count() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.size();
  return n;
}

ThreadedCode compile_threaded(const SegmentedTrace& trace, const Program& program,
                              InlineCacheStore& caches) {
  ThreadedCode code;
  code.method = trace.origin;
  code.trace_ops = trace.op_count();
  const Method& method = program.method(trace.origin);

  std::vector<std::int64_t> segment_of(trace.label_names.size(), -1);
  for (std::size_t i = 0; i < trace.segments.size(); ++i) {
    segment_of[trace.segments[i].label] = static_cast<std::int64_t>(i);
    if (trace.segments[i].label == trace.entry) code.entry = static_cast<std::uint32_t>(i);
    code.segment_names.push_back(trace.label_names[trace.segments[i].label]);
  }
  auto segment = [&](LabelId label) {
    if (label >= segment_of.size() || segment_of[label] < 0) {
      throw InternalError("threaded code references unknown label");
    }
    return static_cast<std::uint32_t>(segment_of[label]);
  };

  for (const auto& seg : trace.segments) {
    std::vector<ThreadedEntry> entries;
    for (const auto& op : seg.ops) {
      if (op.kind == TraceOpKind::HandlerCall && op.stub) {
        throw InternalError("compile_threaded requires stub-free traces");
      }
      // Operands live in the program, not in the trace, so entries outlive it.
      const Instruction* inst = op.kind == TraceOpKind::Label || op.kind == TraceOpKind::Finish
                                    ? nullptr
                                    : &method.code[op.pc];
      switch (op.kind) {
        case TraceOpKind::Label:
        case TraceOpKind::CutHere:
          break;
        case TraceOpKind::HandlerCall:
          if (is_call(op.inst.op)) {
            InlineCacheSlot* slot = &caches.slot(CallSite{code.method, op.pc});
            code.cache_sites.emplace_back(op.pc, slot);
            entries.push_back({EntryKind::CachedCall, handler_for(op.inst.op), inst, op.pc, 0, slot});
          } else {
            entries.push_back({EntryKind::Invoke, handler_for(op.inst.op), inst, op.pc, 0, nullptr});
          }
          break;
        case TraceOpKind::GuardFalse:
        case TraceOpKind::GuardTrue:
          // The conditional-jump handler decides; its Jump outcome means the
          // guard failed and control bridges to the other arm.
          entries.push_back({EntryKind::Branch, handler_for(op.inst.op), inst, op.pc, segment(op.label), nullptr});
          break;
        case TraceOpKind::JumpTo:
          if (op.back_edge) {
            entries.push_back({EntryKind::BackEdgeProbe, nullptr, inst, op.pc, 0, nullptr});
          }
          entries.push_back({EntryKind::Goto, nullptr, inst, op.pc, segment(op.label), nullptr});
          break;
        case TraceOpKind::Finish:
          entries.push_back({EntryKind::Return, nullptr, nullptr, 0, 0, nullptr});
          break;
      }
    }
    code.segments.push_back(std::move(entries));
  }
  return code;
}

std::string dump(const ThreadedCode& code) {
  std::ostringstream out;
  for (std::size_t s = 0; s < code.segments.size(); ++s) {
    out << code.segment_names[s] << ":\n";
    for (const auto& e : code.segments[s]) {
      out << "  ";
      switch (e.kind) {
        case EntryKind::Invoke:
          out << "call " << opcode_name(e.inst->op);
          if (e.inst->op == Opcode::ConstInt || e.inst->op == Opcode::LoadLocal ||
              e.inst->op == Opcode::StoreLocal || e.inst->op == Opcode::ArrayFill) {
            out << ' ' << e.inst->operand;
          } else if (e.inst->op == Opcode::ConstMethod) {
            out << ' ' << e.inst->name;
          }
          break;
        case EntryKind::CachedCall:
          out << "call_cached " << (e.inst->op == Opcode::Call ? e.inst->name : "<value>") << ' '
              << e.inst->argc << " [site " << e.pc << "]";
          break;
        case EntryKind::Branch:
          // JUMP_IF_TRUE leaves on a non-zero condition, JUMP_IF_FALSE on zero.
          out << (e.inst->op == Opcode::JumpIfTrue ? "jnz " : "jz ") << code.segment_names[e.target];
          break;
        case EntryKind::Goto:
          out << "jmp " << code.segment_names[e.target];
          break;
        case EntryKind::BackEdgeProbe:
          out << "probe_backedge " << e.pc;
          break;
        case EntryKind::Return:
          out << "ret";
          break;
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace tvm
