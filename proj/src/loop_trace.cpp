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

#include "tvm/loop_trace.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "tvm/handlers.hpp"
#include "tvm/runtime.hpp"

namespace tvm {

const char* prim_name(PrimKind kind) {
  switch (kind) {
    case PrimKind::IntAdd: return "int_add";
    case PrimKind::IntSub: return "int_sub";
    case PrimKind::IntMul: return "int_mul";
    case PrimKind::IntMod: return "int_mod";
    case PrimKind::IntLe: return "int_le";
    case PrimKind::IntLt: return "int_lt";
    case PrimKind::IntEq: return "int_eq";
    case PrimKind::Const: return "const";
    case PrimKind::GetLocal: return "getlocal";
    case PrimKind::SetLocal: return "setlocal";
    case PrimKind::ArrGet: return "getarrayitem";
    case PrimKind::ArrSet: return "setarrayitem";
    case PrimKind::ArrLen: return "arraylen";
    case PrimKind::ArrNew: return "new_array";
    case PrimKind::ArrFill: return "array_fill";
    case PrimKind::ArrClear: return "array_clear";
    case PrimKind::Print: return "print";
    case PrimKind::GuardTrue: return "guard_true";
    case PrimKind::GuardFalse: return "guard_false";
    case PrimKind::GuardMethod: return "guard_method";
    case PrimKind::Call: return "call";
    case PrimKind::JumpLoop: return "jump";
  }
  return "?";
}

namespace {

bool defines_reg(PrimKind k) {
  switch (k) {
    case PrimKind::IntAdd:
    case PrimKind::IntSub:
    case PrimKind::IntMul:
    case PrimKind::IntMod:
    case PrimKind::IntLe:
    case PrimKind::IntLt:
    case PrimKind::IntEq:
    case PrimKind::Const:
    case PrimKind::GetLocal:
    case PrimKind::ArrGet:
    case PrimKind::ArrLen:
    case PrimKind::ArrNew:
    case PrimKind::Call:
      return true;
    default:
      return false;
  }
}

bool is_binary(PrimKind k) {
  return k == PrimKind::IntAdd || k == PrimKind::IntSub || k == PrimKind::IntMul ||
         k == PrimKind::IntMod || k == PrimKind::IntLe || k == PrimKind::IntLt || k == PrimKind::IntEq;
}

bool is_guard(PrimKind k) {
  return k == PrimKind::GuardTrue || k == PrimKind::GuardFalse || k == PrimKind::GuardMethod;
}

/// Result of a binary primitive, or nullopt when the bytecode instruction it
/// came from would raise an error.
std::optional<Value> eval_binary(PrimKind k, const Value& x, const Value& y) {
  if (k == PrimKind::IntEq) return Value::boolean(x == y);
  if (!x.is_int() || !y.is_int()) return std::nullopt;
  const std::int64_t a = x.as_int();
  const std::int64_t b = y.as_int();
  std::int64_t r = 0;
  switch (k) {
    case PrimKind::IntAdd:
      if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
      return Value::integer(r);
    case PrimKind::IntSub:
      if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
      return Value::integer(r);
    case PrimKind::IntMul:
      if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
      return Value::integer(r);
    case PrimKind::IntMod:
      if (b == 0) return std::nullopt;
      return Value::integer(floored_mod(a, b));
    case PrimKind::IntLe:
      return Value::boolean(a <= b);
    case PrimKind::IntLt:
      return Value::boolean(a < b);
    default:
      return std::nullopt;
  }
}

/// 1 when `v` is truthy, 0 when falsy, -1 when it is not a condition value.
int condition_of(const Value& v) {
  switch (v.tag()) {
    case ValueTag::Int:
    case ValueTag::Bool:
      return v.as_int() != 0 ? 1 : 0;
    case ValueTag::Nil:
      return 0;
    default:
      return -1;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Recorder

struct Recorder::Sym {
  /// kNoReg: the header frame slot `slot`, not loaded yet.
  Reg reg = kNoReg;
  std::uint32_t slot = 0;
};

struct Recorder::SymFrame {
  const Frame* frame = nullptr;
  MethodId method = kNoMethod;
  std::vector<Sym> locals;
  std::vector<Sym> stack;
};

Recorder::Recorder(const Program& program, const Frame& anchor, std::size_t limit,
                   std::size_t inline_depth)
    : program_(program), limit_(limit), inline_depth_(inline_depth) {
  code_.method = anchor.method_id;
  code_.header_pc = anchor.pc;
  code_.num_locals = static_cast<std::uint32_t>(anchor.locals.size());
  code_.header_depth = static_cast<std::uint32_t>(anchor.stack.size());
  auto f = std::make_unique<SymFrame>();
  f->frame = &anchor;
  f->method = anchor.method_id;
  const std::uint32_t n = code_.num_locals;
  for (std::uint32_t i = 0; i < n; ++i) f->locals.push_back({kNoReg, i});
  for (std::uint32_t k = 0; k < code_.header_depth; ++k) f->stack.push_back({kNoReg, n + k});
  slot_regs_.assign(n + code_.header_depth, kNoReg);
  frames_.push_back(std::move(f));
}

Recorder::~Recorder() = default;

bool Recorder::tracks(const Frame& frame) const {
  return status_ == Status::Recording && frames_.back()->frame == &frame;
}

void Recorder::abort(std::string reason) {
  if (status_ != Status::Recording) return;
  status_ = Status::Aborted;
  abort_reason_ = std::move(reason);
}

Reg Recorder::fresh() { return code_.num_regs++; }

Reg Recorder::emit(PrimOp op) {
  const SymFrame& f = *frames_.back();
  op.method = f.method;
  op.pc = f.frame->pc;
  if (defines_reg(op.kind)) op.dst = fresh();
  code_.ops.push_back(op);
  return op.dst;
}

Reg Recorder::materialize(Sym s) {
  if (s.reg != kNoReg) return s.reg;
  Reg& cached = slot_regs_[s.slot];
  if (cached == kNoReg) {
    PrimOp op{.kind = PrimKind::GetLocal, .slot = s.slot};
    cached = emit(op);
    code_.loop_inputs.push_back({cached, s.slot});
  }
  return cached;
}

Reg Recorder::pop_reg(SymFrame& f) {
  const Sym s = f.stack.back();
  f.stack.pop_back();
  return materialize(s);
}

void Recorder::push(Reg r) { frames_.back()->stack.push_back({r, 0}); }

std::int32_t Recorder::snapshot() {
  ExitDescriptor ex;
  auto source = [](const Sym& s) { return SlotSource{s.reg, s.slot}; };
  for (const auto& f : frames_) {
    FrameSnapshot fs;
    fs.method = f->method;
    fs.pc = f->frame->pc;
    for (const Sym& s : f->locals) fs.locals.push_back(source(s));
    for (const Sym& s : f->stack) fs.stack.push_back(source(s));
    ex.frames.push_back(std::move(fs));
  }
  if (!code_.exits.empty() && code_.exits.back() == ex) {
    return static_cast<std::int32_t>(code_.exits.size() - 1);
  }
  code_.exits.push_back(std::move(ex));
  return static_cast<std::int32_t>(code_.exits.size() - 1);
}

Reg Recorder::binary(PrimKind kind, bool fallible) {
  SymFrame& f = *frames_.back();
  PrimOp op{.kind = kind};
  op.exit = fallible ? snapshot() : -1;
  op.b = pop_reg(f);
  op.a = pop_reg(f);
  return emit(op);
}

void Recorder::before(const Frame& frame) {
  if (!tracks(frame)) return;
  SymFrame& f = *frames_.back();
  const Instruction& inst = frame.instruction();
  switch (inst.op) {
    case Opcode::ConstInt:
      push(emit({.kind = PrimKind::Const, .imm = Value::integer(inst.operand)}));
      break;
    case Opcode::ConstMethod:
      push(emit({.kind = PrimKind::Const, .imm = Value::method(inst.callee)}));
      break;
    case Opcode::LoadLocal: {
      Sym& s = f.locals[inst.target()];
      s.reg = materialize(s);
      push(s.reg);
      break;
    }
    case Opcode::StoreLocal:
      f.locals[inst.target()] = {pop_reg(f), 0};
      break;
    case Opcode::Dup: {
      const Reg r = pop_reg(f);
      push(r);
      push(r);
      break;
    }
    case Opcode::Pop:
      f.stack.pop_back();
      break;
    case Opcode::Add: push(binary(PrimKind::IntAdd, true)); break;
    case Opcode::Sub: push(binary(PrimKind::IntSub, true)); break;
    case Opcode::Mul: push(binary(PrimKind::IntMul, true)); break;
    case Opcode::Mod: push(binary(PrimKind::IntMod, true)); break;
    case Opcode::Le: push(binary(PrimKind::IntLe, true)); break;
    case Opcode::Lt: push(binary(PrimKind::IntLt, true)); break;
    case Opcode::Eq: push(binary(PrimKind::IntEq, false)); break;
    case Opcode::Jump:
      break;
    case Opcode::JumpIfTrue:
    case Opcode::JumpIfFalse: {
      const int c = condition_of(frame.stack.back());
      if (c < 0) {
        abort("non-condition value at branch");
        return;
      }
      PrimOp op{.kind = c ? PrimKind::GuardTrue : PrimKind::GuardFalse};
      op.exit = snapshot();
      op.a = pop_reg(f);
      emit(op);
      break;
    }
    case Opcode::JumpBackward:
      if (frames_.size() == 1 && inst.target() == code_.header_pc) {
        close_loop();
      } else {
        abort("inner loop");
      }
      return;
    case Opcode::Call:
    case Opcode::CallValue: {
      const std::uint32_t argc = inst.argc;
      MethodId callee = inst.callee;
      if (inst.op == Opcode::CallValue) {
        const Value& mv = frame.stack[frame.stack.size() - argc - 1];
        if (!mv.is_method() || program_.method(mv.as_method()).arg_count != argc) {
          abort("bad dynamic call");
          return;
        }
        callee = mv.as_method();
      }
      PrimOp guard{.kind = PrimKind::GuardMethod, .callee = callee};
      guard.exit = snapshot();
      std::vector<Reg> args(argc);
      for (std::uint32_t k = argc; k-- > 0;) args[k] = pop_reg(f);
      if (inst.op == Opcode::CallValue) guard.a = pop_reg(f);
      emit(guard);
      pending_callee_ = callee;
      if (frames_.size() - 1 < inline_depth_) {
        pending_call_ = CallMode::Inline;
        pending_args_ = std::move(args);
      } else {
        pending_call_ = CallMode::Opaque;
        PrimOp op{.kind = PrimKind::Call, .callee = callee};
        op.args_begin = static_cast<std::uint32_t>(code_.call_args.size());
        op.args_count = argc;
        code_.call_args.insert(code_.call_args.end(), args.begin(), args.end());
        push(emit(op));
      }
      break;
    }
    case Opcode::Ret:
      if (frames_.size() == 1) {
        abort("return from anchor");
        return;
      }
      pending_return_ = pop_reg(f);
      frames_.pop_back();
      break;
    case Opcode::ArrayNew: {
      PrimOp op{.kind = PrimKind::ArrNew};
      op.exit = snapshot();
      op.a = pop_reg(f);
      push(emit(op));
      break;
    }
    case Opcode::ArrayAt: {
      PrimOp op{.kind = PrimKind::ArrGet};
      op.exit = snapshot();
      op.b = pop_reg(f);
      op.a = pop_reg(f);
      push(emit(op));
      break;
    }
    case Opcode::ArrayAtPut: {
      PrimOp op{.kind = PrimKind::ArrSet};
      op.exit = snapshot();
      op.c = pop_reg(f);
      op.b = pop_reg(f);
      op.a = pop_reg(f);
      emit(op);
      break;
    }
    case Opcode::ArrayLen: {
      PrimOp op{.kind = PrimKind::ArrLen};
      op.exit = snapshot();
      op.a = pop_reg(f);
      push(emit(op));
      break;
    }
    case Opcode::ArrayFill: {
      PrimOp op{.kind = PrimKind::ArrFill, .imm = Value::integer(inst.operand)};
      op.exit = snapshot();
      op.a = pop_reg(f);
      emit(op);
      push(op.a);
      break;
    }
    case Opcode::ArrayClear: {
      PrimOp op{.kind = PrimKind::ArrClear};
      op.exit = snapshot();
      op.a = pop_reg(f);
      emit(op);
      break;
    }
    case Opcode::Print: {
      PrimOp op{.kind = PrimKind::Print};
      op.a = pop_reg(f);
      emit(op);
      break;
    }
    case Opcode::Halt:
      abort("halt");
      return;
  }
  if (code_.ops.size() > limit_) abort("trace too long");
}

void Recorder::enter(const Frame& callee) {
  if (status_ != Status::Recording) return;
  auto f = std::make_unique<SymFrame>();
  f->frame = &callee;
  f->method = pending_callee_;
  for (Reg r : pending_args_) f->locals.push_back({r, 0});
  pending_args_.clear();
  frames_.push_back(std::move(f));
  const std::size_t n = program_.method(pending_callee_).num_locals;
  while (frames_.back()->locals.size() < n) {
    const Reg nil = emit({.kind = PrimKind::Const, .imm = Value::nil()});
    frames_.back()->locals.push_back({nil, 0});
  }
}

void Recorder::leave() {
  if (status_ != Status::Recording) return;
  push(pending_return_);
  pending_return_ = kNoReg;
}

void Recorder::close_loop() {
  SymFrame& f = *frames_.front();
  const std::uint32_t n = code_.num_locals;
  for (std::uint32_t k = 0; k < f.stack.size(); ++k) {
    Sym& s = f.stack[k];
    if (s.reg == kNoReg && s.slot != n + k) s.reg = materialize(s);
  }
  auto store = [&](const Sym& s, std::uint32_t slot) {
    if (s.reg == kNoReg || s.reg == slot_regs_[slot]) return;
    PrimOp op{.kind = PrimKind::SetLocal, .a = s.reg, .slot = slot};
    emit(op);
  };
  for (std::uint32_t i = 0; i < n; ++i) store(f.locals[i], i);
  for (std::uint32_t k = 0; k < f.stack.size(); ++k) store(f.stack[k], n + k);
  emit({.kind = PrimKind::JumpLoop});
  status_ = Status::Done;
}

LoopCode Recorder::take() { return std::move(code_); }

// ---------------------------------------------------------------------------
// Optimizer

namespace {

void for_each_use(const LoopCode& code, const PrimOp& op, auto&& fn) {
  if (op.a != kNoReg) fn(op.a);
  if (op.b != kNoReg) fn(op.b);
  if (op.c != kNoReg) fn(op.c);
  if (op.kind == PrimKind::Call) {
    for (std::uint32_t k = 0; k < op.args_count; ++k) fn(code.call_args[op.args_begin + k]);
  }
  if (op.exit >= 0) {
    for (const FrameSnapshot& fs : code.exits[op.exit].frames) {
      for (const SlotSource& s : fs.locals) {
        if (s.reg != kNoReg) fn(s.reg);
      }
      for (const SlotSource& s : fs.stack) {
        if (s.reg != kNoReg) fn(s.reg);
      }
    }
  }
}

bool fold_constants(LoopCode& code) {
  bool changed = false;
  std::vector<std::optional<Value>> known(code.num_regs);
  std::vector<PrimOp> out;
  out.reserve(code.ops.size());
  for (PrimOp op : code.ops) {
    if (is_binary(op.kind) && known[op.a] && known[op.b]) {
      if (auto r = eval_binary(op.kind, *known[op.a], *known[op.b])) {
        op = PrimOp{.kind = PrimKind::Const, .dst = op.dst, .imm = *r, .method = op.method, .pc = op.pc};
        changed = true;
      }
    }
    if ((op.kind == PrimKind::GuardTrue || op.kind == PrimKind::GuardFalse) && known[op.a]) {
      const int c = condition_of(*known[op.a]);
      if (c >= 0 && (c == 1) == (op.kind == PrimKind::GuardTrue)) {
        changed = true;
        continue;
      }
    }
    if (op.kind == PrimKind::GuardMethod && op.a != kNoReg && known[op.a] &&
        *known[op.a] == Value::method(op.callee)) {
      changed = true;
      continue;
    }
    if (op.kind == PrimKind::Const) known[op.dst] = op.imm;
    out.push_back(op);
  }
  code.ops = std::move(out);
  return changed;
}

bool remove_duplicate_guards(LoopCode& code) {
  bool changed = false;
  std::set<std::tuple<PrimKind, Reg, MethodId>> seen;
  std::vector<PrimOp> out;
  out.reserve(code.ops.size());
  for (const PrimOp& op : code.ops) {
    if (is_guard(op.kind) && !seen.insert({op.kind, op.a, op.callee}).second) {
      // A static GuardMethod (a == kNoReg) always passes; the first copy is
      // kept only as a marker of the call site.
      changed = true;
      continue;
    }
    out.push_back(op);
  }
  code.ops = std::move(out);
  return changed;
}

bool remove_dead_ops(LoopCode& code) {
  // Forward pass: which ops can fail, given registers known to hold ints.
  std::vector<bool> is_int(code.num_regs, false);
  std::vector<std::optional<Value>> known(code.num_regs);
  std::vector<bool> fallible(code.ops.size(), false);
  for (std::size_t i = 0; i < code.ops.size(); ++i) {
    const PrimOp& op = code.ops[i];
    switch (op.kind) {
      case PrimKind::Const:
        known[op.dst] = op.imm;
        is_int[op.dst] = op.imm.is_int();
        break;
      case PrimKind::IntLe:
      case PrimKind::IntLt:
        fallible[i] = !(is_int[op.a] && is_int[op.b]);
        is_int[op.a] = is_int[op.b] = true;
        break;
      case PrimKind::IntMod: {
        const bool safe_divisor = known[op.b] && known[op.b]->is_int() && known[op.b]->as_int() != 0;
        fallible[i] = !(is_int[op.a] && safe_divisor);
        is_int[op.a] = is_int[op.b] = is_int[op.dst] = true;
        break;
      }
      case PrimKind::IntAdd:
      case PrimKind::IntSub:
      case PrimKind::IntMul:
        fallible[i] = true;
        is_int[op.a] = is_int[op.b] = is_int[op.dst] = true;
        break;
      case PrimKind::ArrGet:
      case PrimKind::ArrLen:
        fallible[i] = true;
        is_int[op.dst] = true;
        break;
      case PrimKind::IntEq:
      case PrimKind::GetLocal:
        break;
      default:
        fallible[i] = true;
        break;
    }
  }
  std::vector<bool> live(code.num_regs, false);
  std::vector<bool> keep(code.ops.size(), false);
  for (std::size_t i = code.ops.size(); i-- > 0;) {
    const PrimOp& op = code.ops[i];
    const bool used = op.dst != kNoReg && live[op.dst];
    if (!(fallible[i] || used)) continue;
    keep[i] = true;
    for_each_use(code, op, [&](Reg r) { live[r] = true; });
  }
  bool changed = false;
  std::vector<PrimOp> out;
  out.reserve(code.ops.size());
  for (std::size_t i = 0; i < code.ops.size(); ++i) {
    if (keep[i]) {
      out.push_back(code.ops[i]);
    } else {
      changed = true;
    }
  }
  code.ops = std::move(out);
  std::erase_if(code.loop_inputs, [&](const LoopInput& in) { return !live[in.reg]; });
  return changed;
}

}  // namespace

LoopCode optimize_trace(LoopCode code) {
  for (;;) {
    bool changed = fold_constants(code);
    changed |= remove_duplicate_guards(code);
    changed |= remove_dead_ops(code);
    if (!changed) return code;
  }
}

// ---------------------------------------------------------------------------
// Execution

LoopExit execute_loop(const LoopCode& code, Frame& frame, Runtime& rt, std::uint64_t max_iterations) {
  if (frame.method_id != code.method || frame.pc != code.header_pc) {
    throw InternalError("loop code entered away from its header");
  }
  std::vector<Value> regs(static_cast<std::size_t>(code.num_regs));
  const std::uint32_t nl = code.num_locals;
  Heap& heap = rt.heap;
  LoopExit result;

  auto slot = [&](std::uint32_t s) -> Value& {
    return s < nl ? frame.locals[s] : frame.stack[s - nl];
  };

  auto take_exit = [&](std::int32_t index) {
    const ExitDescriptor& ex = code.exits[static_cast<std::size_t>(index)];
    ++ex.exit_count;
    const std::vector<Value> old_locals = frame.locals;
    const std::vector<Value> old_stack = frame.stack;
    auto value_of = [&](const SlotSource& s) {
      if (s.reg != kNoReg) return regs[s.reg];
      return s.frame_slot < nl ? old_locals[s.frame_slot] : old_stack[s.frame_slot - nl];
    };
    const FrameSnapshot& anchor = ex.frames.front();
    for (std::size_t i = 0; i < anchor.locals.size(); ++i) frame.locals[i] = value_of(anchor.locals[i]);
    frame.stack.clear();
    for (const SlotSource& s : anchor.stack) frame.stack.push_back(value_of(s));
    frame.pc = anchor.pc;
    for (std::size_t k = 1; k < ex.frames.size(); ++k) {
      const FrameSnapshot& fs = ex.frames[k];
      Frame f(rt.program().method(fs.method), fs.method);
      f.heavy = true;
      f.pc = fs.pc;
      for (std::size_t i = 0; i < fs.locals.size(); ++i) f.locals[i] = value_of(fs.locals[i]);
      for (const SlotSource& s : fs.stack) f.stack.push_back(value_of(s));
      result.inlined.push_back(std::move(f));
    }
    result.kind = LoopExit::Kind::Guard;
    result.exit = index;
  };

  if (max_iterations == 0) {
    result.kind = LoopExit::Kind::IterationLimit;
    return result;
  }

  const PrimOp* ops = code.ops.data();
  std::size_t i = 0;
  for (;;) {
    const PrimOp& op = ops[i++];
    switch (op.kind) {
      case PrimKind::IntAdd:
      case PrimKind::IntSub:
      case PrimKind::IntMul:
      case PrimKind::IntMod:
      case PrimKind::IntLe:
      case PrimKind::IntLt:
      case PrimKind::IntEq: {
        auto r = eval_binary(op.kind, regs[op.a], regs[op.b]);
        if (!r) {
          take_exit(op.exit);
          return result;
        }
        regs[op.dst] = *r;
        break;
      }
      case PrimKind::Const:
        regs[op.dst] = op.imm;
        break;
      case PrimKind::GetLocal:
        regs[op.dst] = slot(op.slot);
        break;
      case PrimKind::SetLocal:
        slot(op.slot) = regs[op.a];
        break;
      case PrimKind::ArrGet: {
        const Value& arr = regs[op.a];
        const Value& idx = regs[op.b];
        if (!arr.is_array() || !idx.is_int()) {
          take_exit(op.exit);
          return result;
        }
        const auto& data = heap.at(arr.as_array());
        const std::int64_t k = idx.as_int();
        if (k < 1 || static_cast<std::uint64_t>(k) > data.size()) {
          take_exit(op.exit);
          return result;
        }
        regs[op.dst] = Value::integer(data[static_cast<std::size_t>(k - 1)]);
        break;
      }
      case PrimKind::ArrSet: {
        const Value& arr = regs[op.a];
        const Value& idx = regs[op.b];
        const Value& v = regs[op.c];
        if (!arr.is_array() || !idx.is_int() || !v.is_int()) {
          take_exit(op.exit);
          return result;
        }
        auto& data = heap.at(arr.as_array());
        const std::int64_t k = idx.as_int();
        if (k < 1 || static_cast<std::uint64_t>(k) > data.size()) {
          take_exit(op.exit);
          return result;
        }
        data[static_cast<std::size_t>(k - 1)] = v.as_int();
        break;
      }
      case PrimKind::ArrLen:
        if (!regs[op.a].is_array()) {
          take_exit(op.exit);
          return result;
        }
        regs[op.dst] = Value::integer(static_cast<std::int64_t>(heap.at(regs[op.a].as_array()).size()));
        break;
      case PrimKind::ArrNew:
        if (!regs[op.a].is_int() || regs[op.a].as_int() < 0) {
          take_exit(op.exit);
          return result;
        }
        regs[op.dst] = Value::array(heap.allocate(static_cast<std::size_t>(regs[op.a].as_int())));
        break;
      case PrimKind::ArrFill:
      case PrimKind::ArrClear: {
        if (!regs[op.a].is_array()) {
          take_exit(op.exit);
          return result;
        }
        auto& data = heap.at(regs[op.a].as_array());
        std::fill(data.begin(), data.end(), op.kind == PrimKind::ArrFill ? op.imm.as_int() : 0);
        break;
      }
      case PrimKind::Print:
        rt.output += to_string(regs[op.a]);
        rt.output += '\n';
        break;
      case PrimKind::GuardTrue:
      case PrimKind::GuardFalse: {
        const int c = condition_of(regs[op.a]);
        if (c < 0 || (c == 1) != (op.kind == PrimKind::GuardTrue)) {
          take_exit(op.exit);
          return result;
        }
        break;
      }
      case PrimKind::GuardMethod:
        if (op.a != kNoReg && regs[op.a] != Value::method(op.callee)) {
          take_exit(op.exit);
          return result;
        }
        break;
      case PrimKind::Call: {
        std::vector<Value> args;
        args.reserve(op.args_count);
        for (std::uint32_t k = 0; k < op.args_count; ++k) {
          args.push_back(regs[code.call_args[op.args_begin + k]]);
        }
        regs[op.dst] = rt.call_from_trace(op.method, op.pc, op.callee, std::move(args));
        break;
      }
      case PrimKind::JumpLoop:
        ++result.iterations;
        if (result.iterations >= max_iterations) {
          result.kind = LoopExit::Kind::IterationLimit;
          return result;
        }
        i = 0;
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// Dump

std::string dump(const LoopCode& code, const Program& program) {
  std::vector<const PrimOp*> def(code.num_regs, nullptr);
  for (const PrimOp& op : code.ops) {
    if (op.dst != kNoReg) def[op.dst] = &op;
  }
  auto constant = [&](const Value& v) -> std::string {
    if (v.is_method()) return program.method(v.as_method()).name;
    if (v.is_bool()) return v.as_bool() ? "true" : "false";
    return to_string(v);
  };
  auto reg = [&](Reg r) -> std::string {
    if (def[r] && def[r]->kind == PrimKind::Const) return constant(def[r]->imm);
    return "i" + std::to_string(r);
  };
  std::ostringstream out;
  const Method& m = program.method(code.method);
  out << "# loop " << m.name << "@" << code.header_pc << "\n";
  out << "label(loop)\n";
  for (const PrimOp& op : code.ops) {
    const std::string name = prim_name(op.kind);
    switch (op.kind) {
      case PrimKind::Const:
        continue;
      case PrimKind::GetLocal:
        out << "i" << op.dst << " = getlocal(p0, " << op.slot << ")\n";
        break;
      case PrimKind::SetLocal:
        out << "setlocal(p0, " << op.slot << ", " << reg(op.a) << ")\n";
        break;
      case PrimKind::ArrSet:
        out << name << "(" << reg(op.a) << ", " << reg(op.b) << ", " << reg(op.c) << ")\n";
        break;
      case PrimKind::ArrFill:
        out << name << "(" << reg(op.a) << ", " << op.imm.as_int() << ")\n";
        break;
      case PrimKind::ArrClear:
      case PrimKind::Print:
      case PrimKind::GuardTrue:
      case PrimKind::GuardFalse:
        out << name << "(" << reg(op.a) << ")\n";
        break;
      case PrimKind::GuardMethod:
        out << name << "(" << (op.a == kNoReg ? std::string("static") : reg(op.a)) << ", "
            << program.method(op.callee).name << ")\n";
        break;
      case PrimKind::Call:
        out << "i" << op.dst << " = " << name << "(" << program.method(op.callee).name;
        for (std::uint32_t k = 0; k < op.args_count; ++k) out << ", " << reg(code.call_args[op.args_begin + k]);
        out << ")\n";
        break;
      case PrimKind::JumpLoop:
        out << "jump(loop)\n";
        break;
      case PrimKind::ArrLen:
      case PrimKind::ArrNew:
        out << "i" << op.dst << " = " << name << "(" << reg(op.a) << ")\n";
        break;
      default:
        out << "i" << op.dst << " = " << name << "(" << reg(op.a) << ", " << reg(op.b) << ")\n";
        break;
    }
  }
  return out.str();
}

}  // namespace tvm
