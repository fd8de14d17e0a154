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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tvm/bytecode.hpp"
#include "tvm/frame.hpp"
#include "tvm/value.hpp"

namespace tvm {

class Runtime;

enum class PrimKind {
  IntAdd,
  IntSub,
  IntMul,
  IntMod,
  IntLe,
  IntLt,
  IntEq,
  Const,
  GetLocal,
  SetLocal,
  ArrGet,
  ArrSet,
  ArrLen,
  ArrNew,
  ArrFill,
  ArrClear,
  Print,
  GuardTrue,
  GuardFalse,
  GuardMethod,
  Call,
  JumpLoop,
};

const char* prim_name(PrimKind kind);

/// Virtual register index; registers are assigned once (SSA).
using Reg = std::int32_t;
inline constexpr Reg kNoReg = -1;

/// A primitive operation of a tier-2 loop trace. Field use depends on kind:
///   binary ops       dst = a <op> b
///   Const            dst = imm
///   GetLocal         dst = frame slot `slot`
///   SetLocal         frame slot `slot` = a
///   ArrGet           dst = a[b]          ArrSet  a[b] = c
///   ArrLen / ArrNew  dst = f(a)          ArrFill a filled with imm, ArrClear a
///   Print            print a
///   Guard*           test a (GuardMethod: a must be `callee`, or a == kNoReg
///                    for a statically bound CALL)
///   Call             dst = callee(args)
/// Frame slots number locals first, then operand-stack entries as they stand
/// at the loop header.
struct PrimOp {
  PrimKind kind = PrimKind::JumpLoop;
  Reg dst = kNoReg;
  Reg a = kNoReg;
  Reg b = kNoReg;
  Reg c = kNoReg;
  Value imm;
  std::uint32_t slot = 0;
  MethodId callee = kNoMethod;
  std::uint32_t args_begin = 0;
  std::uint32_t args_count = 0;
  /// Exit taken when the op cannot complete (failed guard, type mismatch,
  /// overflow, bounds); -1 for ops that cannot fail.
  std::int32_t exit = -1;
  /// Bytecode position the op came from.
  MethodId method = kNoMethod;
  std::size_t pc = 0;

  friend bool operator==(const PrimOp&, const PrimOp&) = default;
};

/// Where a frame slot's value lives when an exit is taken.
struct SlotSource {
  /// Register holding the value, or kNoReg when the slot still holds what the
  /// frame held at the start of the iteration.
  Reg reg = kNoReg;
  /// Header frame slot to copy when reg == kNoReg.
  std::uint32_t frame_slot = 0;

  friend bool operator==(const SlotSource&, const SlotSource&) = default;
};

struct FrameSnapshot {
  MethodId method = kNoMethod;
  std::size_t pc = 0;
  std::vector<SlotSource> locals;
  std::vector<SlotSource> stack;

  friend bool operator==(const FrameSnapshot&, const FrameSnapshot&) = default;
};

/// Interpreter state to rebuild when leaving a trace: the anchor frame first,
/// then one frame per inlined call still active. Every frame but the last is
/// paused at the call instruction awaiting its callee's result. Resuming
/// re-executes the instruction at the innermost pc.
struct ExitDescriptor {
  std::vector<FrameSnapshot> frames;
  mutable std::uint64_t exit_count = 0;

  std::size_t resume_pc() const { return frames.back().pc; }
  friend bool operator==(const ExitDescriptor& a, const ExitDescriptor& b) {
    return a.frames == b.frames;
  }
};

struct LoopInput {
  Reg reg = kNoReg;
  std::uint32_t slot = 0;
};

struct LoopCode {
  MethodId method = kNoMethod;
  std::size_t header_pc = 0;
  std::uint32_t num_locals = 0;
  std::uint32_t header_depth = 0;
  std::vector<PrimOp> ops;
  std::vector<ExitDescriptor> exits;
  std::vector<Reg> call_args;
  std::vector<LoopInput> loop_inputs;
  Reg num_regs = 0;

  std::size_t op_count() const { return ops.size(); }
};

inline constexpr std::size_t kDefaultTier2TraceLimit = 2000;
inline constexpr std::size_t kDefaultInlineDepth = 8;

/// Records one concrete loop iteration executed by the heavyweight
/// interpreter. The interpreter calls the hooks below before each
/// instruction; the recorder never alters execution.
class Recorder {
 public:
  Recorder(const Program& program, const Frame& anchor, std::size_t limit, std::size_t inline_depth);
  ~Recorder();

  enum class Status { Recording, Aborted, Done };
  Status status() const { return status_; }
  const std::string& abort_reason() const { return abort_reason_; }

  /// True when `frame` is the frame the recorder expects to see next.
  bool tracks(const Frame& frame) const;

  /// Hook run before `frame` executes its current instruction. After the
  /// anchor's closing back edge, status() becomes Done.
  void before(const Frame& frame);

  /// How the pending CALL observed by before() should be executed.
  enum class CallMode { Inline, Opaque };
  CallMode pending_call() const { return pending_call_; }
  /// An inlined callee frame starts; must follow before() on a CALL.
  void enter(const Frame& callee);
  /// The inlined callee returned; pairs with enter().
  void leave();
  void abort(std::string reason);

  LoopCode take();

 private:
  struct SymFrame;
  struct Sym;

  Reg fresh();
  Reg emit(PrimOp op);
  Reg pop_reg(SymFrame& f);
  Reg materialize(Sym s);
  void push(Reg r);
  std::int32_t snapshot();
  Reg binary(PrimKind kind, bool fallible);
  void close_loop();

  const Program& program_;
  std::size_t limit_;
  std::size_t inline_depth_;
  LoopCode code_;
  std::vector<std::unique_ptr<SymFrame>> frames_;
  /// Register loaded from each header frame slot, if any.
  std::vector<Reg> slot_regs_;
  Status status_ = Status::Recording;
  std::string abort_reason_;
  CallMode pending_call_ = CallMode::Inline;
  Reg pending_return_ = kNoReg;
  std::vector<Reg> pending_args_;
  MethodId pending_callee_ = kNoMethod;
};

/// Semantics-preserving cleanup: constant folding, duplicate-guard removal,
/// dead-op removal, repeated to a fixed point.
LoopCode optimize_trace(LoopCode code);

struct LoopExit {
  enum class Kind { Guard, IterationLimit };
  Kind kind = Kind::Guard;
  std::int32_t exit = -1;
  std::uint64_t iterations = 0;
  /// Inlined frames to finish before the anchor continues (outermost first).
  std::vector<Frame> inlined;
};

/// Runs the loop from the header state in `frame` until a guard fails (or
/// `max_iterations` complete). On a guard exit the anchor frame and any
/// inlined frames are rebuilt from the exit descriptor.
LoopExit execute_loop(const LoopCode& code, Frame& frame, Runtime& rt,
                      std::uint64_t max_iterations = UINT64_MAX);

std::string dump(const LoopCode& code, const Program& program);

}  // namespace tvm
