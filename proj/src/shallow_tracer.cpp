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

#include "tvm/shallow_tracer.hpp"

#include <deque>
#include <sstream>

#include "tvm/errors.hpp"

namespace tvm {
namespace {

class ShallowTracer {
 public:
  ShallowTracer(const Method& method, MethodId id, std::size_t limit)
      : method_(method), limit_(limit), leader_(method.code.size() + 1, false),
        label_of_(method.code.size() + 1, -1), scheduled_(method.code.size() + 1, false) {
    trace_.origin = id;
    leader_[0] = true;
    for (const auto& inst : method.code) {
      if (is_jump(inst.op) && inst.target() < leader_.size()) leader_[inst.target()] = true;
    }
  }

  TemporalTrace run() {
    LabelId entry = label(0);
    emit(TraceOp{.kind = TraceOpKind::Label, .label = entry});
    schedule(0);
    while (!pending_.empty()) {
      std::size_t start = pending_.front();
      pending_.pop_front();
      trace_.arm_labels.push_back(label(start));
      CutReason reason = trace_arm(start);
      if (!pending_.empty()) {
        emit(TraceOp{.kind = TraceOpKind::CutHere, .reason = reason});
      } else {
        emit(TraceOp{.kind = TraceOpKind::Finish});
      }
    }
    return std::move(trace_);
  }

 private:
  LabelId label(std::size_t pc) {
    if (label_of_[pc] >= 0) return static_cast<LabelId>(label_of_[pc]);
    auto id = static_cast<LabelId>(trace_.label_names.size());
    label_of_[pc] = static_cast<std::int64_t>(id);
    trace_.label_names.push_back(id == 0 ? method_.name : "L" + std::to_string(id));
    trace_.label_pcs.push_back(pc);
    return id;
  }

  void schedule(std::size_t pc) {
    if (scheduled_[pc]) return;
    scheduled_[pc] = true;
    pending_.push_back(pc);
  }

  void emit(TraceOp op) {
    if (trace_.ops.size() >= limit_) {
      throw TraceTooLong("tier-1 trace of " + method_.name + " exceeds " +
                         std::to_string(limit_) + " ops");
    }
    trace_.ops.push_back(std::move(op));
  }

  CutReason trace_arm(std::size_t start) {
    std::int32_t last_call = -1;
    std::size_t pc = start;
    for (;;) {
      if (pc >= method_.code.size()) throw InternalError("shallow trace fell off " + method_.name);
      if (pc != start && leader_[pc]) {
        // Control reaches a block that is (or will be) its own segment.
        emit(TraceOp{.kind = TraceOpKind::JumpTo, .pc = pc, .label = label(pc)});
        schedule(pc);
        return CutReason::Branch;
      }
      const Instruction& inst = method_.code[pc];
      switch (inst.op) {
        case Opcode::JumpIfTrue:
        case Opcode::JumpIfFalse: {
          // Record the fall-through arm now; the guard bridges to the other.
          auto kind = inst.op == Opcode::JumpIfTrue ? TraceOpKind::GuardFalse : TraceOpKind::GuardTrue;
          emit(TraceOp{.kind = kind, .inst = inst, .pc = pc, .label = label(inst.target()),
                       .value_id = last_call});
          schedule(inst.target());
          last_call = -1;
          ++pc;
          break;
        }
        case Opcode::Jump:
          emit(TraceOp{.kind = TraceOpKind::JumpTo, .inst = inst, .pc = pc, .label = label(inst.target())});
          schedule(inst.target());
          return CutReason::Branch;
        case Opcode::JumpBackward:
          emit(TraceOp{.kind = TraceOpKind::JumpTo, .inst = inst, .pc = pc,
                       .label = label(inst.target()), .back_edge = true});
          schedule(inst.target());
          return CutReason::Branch;
        case Opcode::Ret:
          return CutReason::Return;
        default: {
          last_call = next_call_++;
          emit(TraceOp{.kind = TraceOpKind::HandlerCall, .inst = inst, .pc = pc, .stub = true,
                       .value_id = last_call});
          if (inst.op == Opcode::Halt) return CutReason::Return;
          ++pc;
          break;
        }
      }
    }
  }

  const Method& method_;
  std::size_t limit_;
  std::vector<bool> leader_;
  std::vector<std::int64_t> label_of_;
  std::vector<bool> scheduled_;
  std::deque<std::size_t> pending_;
  std::int32_t next_call_ = 0;
  TemporalTrace trace_;
};

std::string call_text(const TraceOp& op) {
  std::ostringstream out;
  out << "call(" << (op.stub ? "stub_" : "") << opcode_name(op.inst.op) << ", p0";
  switch (op.inst.op) {
    case Opcode::ConstInt:
    case Opcode::ArrayFill:
    case Opcode::LoadLocal:
    case Opcode::StoreLocal:
      out << ", " << op.inst.operand;
      break;
    case Opcode::Call:
      out << ", \"" << op.inst.name << "\", " << op.inst.argc;
      break;
    case Opcode::ConstMethod:
      out << ", \"" << op.inst.name << "\"";
      break;
    case Opcode::CallValue:
      out << ", " << op.inst.argc;
      break;
    default:
      break;
  }
  if (op.stub) out << ", True";
  out << ")";
  return out.str();
}

/// Calls whose result feeds a guard get an `iN = ` prefix so the guard can
/// name it.
std::vector<bool> tested_values(const std::vector<TraceOp>& ops) {
  std::int32_t max_id = 0;
  for (const auto& op : ops) max_id = std::max(max_id, op.value_id + 1);
  std::vector<bool> tested(static_cast<std::size_t>(max_id), false);
  for (const auto& op : ops) {
    if ((op.kind == TraceOpKind::GuardFalse || op.kind == TraceOpKind::GuardTrue) && op.value_id >= 0) {
      tested[static_cast<std::size_t>(op.value_id)] = true;
    }
  }
  return tested;
}

void dump_op(std::ostream& out, const TraceOp& op, const std::vector<std::string>& names,
             const std::vector<bool>& tested, bool segmented) {
  switch (op.kind) {
    case TraceOpKind::Label:
      out << "label(" << names[op.label] << ")\n";
      break;
    case TraceOpKind::HandlerCall:
      if (op.value_id >= 0 && static_cast<std::size_t>(op.value_id) < tested.size() &&
          tested[static_cast<std::size_t>(op.value_id)]) {
        out << "i" << op.value_id << " = ";
      }
      out << call_text(op) << "\n";
      break;
    case TraceOpKind::GuardFalse:
    case TraceOpKind::GuardTrue:
      out << (op.kind == TraceOpKind::GuardFalse ? "guard_false(" : "guard_true(");
      if (op.value_id >= 0) out << "i" << op.value_id; else out << "top";
      out << ") [" << names[op.label] << "]\n";
      break;
    case TraceOpKind::CutHere:
      out << "cut_here(" << (op.reason == CutReason::Return ? "return" : "branch") << ")\n";
      break;
    case TraceOpKind::JumpTo:
      out << "jump(" << names[op.label] << ")\n";
      break;
    case TraceOpKind::Finish:
      out << (segmented ? "finish()\n" : "finish(p0)\n");
      break;
  }
}

std::string segment_title(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  return std::to_string(i);
}

}  // namespace

const Segment* SegmentedTrace::find(LabelId label) const {
  for (const auto& s : segments) {
    if (s.label == label) return &s;
  }
  return nullptr;
}

std::size_t SegmentedTrace::op_count() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.ops.size();
  return n;
}

TemporalTrace shallow_trace(const Method& method, MethodId id, std::size_t limit) {
  return ShallowTracer(method, id, limit).run();
}

SegmentedTrace split_and_stitch(const TemporalTrace& trace) {
  SegmentedTrace out;
  out.origin = trace.origin;
  out.label_names = trace.label_names;
  out.label_pcs = trace.label_pcs;
  if (trace.arm_labels.empty()) return out;
  out.entry = trace.arm_labels.front();

  std::size_t arm = 0;
  Segment current{trace.arm_labels[0], {}};
  auto close = [&]() {
    out.segments.push_back(std::move(current));
    ++arm;
    if (arm < trace.arm_labels.size()) {
      current = Segment{trace.arm_labels[arm], {}};
      current.ops.push_back(TraceOp{.kind = TraceOpKind::Label, .label = trace.arm_labels[arm]});
    }
  };

  for (const auto& op : trace.ops) {
    switch (op.kind) {
      case TraceOpKind::CutHere:
        if (op.reason == CutReason::Return) current.ops.push_back(TraceOp{.kind = TraceOpKind::Finish});
        close();
        break;
      case TraceOpKind::Finish:
        if (current.ops.empty() || current.ops.back().kind != TraceOpKind::JumpTo) {
          current.ops.push_back(op);
        }
        close();
        break;
      default:
        current.ops.push_back(op);
        break;
    }
  }
  if (arm != trace.arm_labels.size()) throw InternalError("temporal trace partitions do not match arms");

  for (const auto& seg : out.segments) {
    for (const auto& op : seg.ops) {
      bool links = op.kind == TraceOpKind::GuardFalse || op.kind == TraceOpKind::GuardTrue ||
                   op.kind == TraceOpKind::JumpTo;
      if (links && !out.find(op.label)) {
        throw InternalError("dangling bridge label " + out.label_names.at(op.label));
      }
    }
  }
  return out;
}

SegmentedTrace replace_stubs(SegmentedTrace trace) {
  for (auto& seg : trace.segments) {
    for (auto& op : seg.ops) {
      if (op.kind == TraceOpKind::HandlerCall) op.stub = false;
    }
  }
  return trace;
}

std::string dump(const TemporalTrace& trace) {
  std::ostringstream out;
  auto tested = tested_values(trace.ops);
  for (const auto& op : trace.ops) dump_op(out, op, trace.label_names, tested, false);
  return out.str();
}

std::string dump(const SegmentedTrace& trace) {
  std::ostringstream out;
  std::vector<TraceOp> all;
  for (const auto& seg : trace.segments) all.insert(all.end(), seg.ops.begin(), seg.ops.end());
  auto tested = tested_values(all);
  for (std::size_t i = 0; i < trace.segments.size(); ++i) {
    if (i) out << "\n";
    out << "# Trace " << segment_title(i) << "\n";
    for (const auto& op : trace.segments[i].ops) dump_op(out, op, trace.label_names, tested, true);
  }
  return out.str();
}

}  // namespace tvm
