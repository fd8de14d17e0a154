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
#include <stdexcept>
#include <string>
#include <vector>

#include "tvm/bytecode.hpp"

namespace tvm {

using LabelId = std::uint32_t;

enum class TraceOpKind { Label, HandlerCall, GuardFalse, GuardTrue, CutHere, JumpTo, Finish };

enum class CutReason { Return, Branch };

/// One operation of a tier-1 (handler-call) trace.
struct TraceOp {
  TraceOpKind kind = TraceOpKind::Finish;
  /// Source instruction. For HandlerCall this is the call's opcode and
  /// operands; for guards and JumpTo it is the branch that produced them.
  Instruction inst;
  std::size_t pc = 0;
  /// HandlerCall: still the dummy-flagged stub recorded while tracing.
  bool stub = false;
  /// Label, guard bridge, or jump destination.
  LabelId label = 0;
  /// HandlerCall: index among calls in the temporal trace. Guard: the call
  /// whose result is tested, or -1 when the condition comes from a
  /// predecessor segment.
  std::int32_t value_id = -1;
  CutReason reason = CutReason::Return;
  /// JumpTo closing an intra-method loop.
  bool back_edge = false;

  friend bool operator==(const TraceOp&, const TraceOp&) = default;
};

/// Linear recording of every branch arm in a row, delimited by CutHere.
struct TemporalTrace {
  MethodId origin = kNoMethod;
  std::vector<TraceOp> ops;
  /// Entry label of each CutHere-delimited partition, in order.
  std::vector<LabelId> arm_labels;
  std::vector<std::string> label_names;
  /// Bytecode pc each label marks.
  std::vector<std::size_t> label_pcs;
};

struct Segment {
  LabelId label = 0;
  std::vector<TraceOp> ops;
};

struct SegmentedTrace {
  MethodId origin = kNoMethod;
  LabelId entry = 0;
  std::vector<Segment> segments;
  std::vector<std::string> label_names;
  std::vector<std::size_t> label_pcs;

  const Segment* find(LabelId label) const;
  std::size_t op_count() const;
};

class TraceTooLong : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultTier1TraceLimit = 5000;

/// Symbolically walks `method` and records handler calls for every reachable
/// instruction without executing any of them. Both arms of each branch are
/// recorded, fall-through first. Throws TraceTooLong past `limit` ops.
TemporalTrace shallow_trace(const Method& method, MethodId id,
                            std::size_t limit = kDefaultTier1TraceLimit);

/// Cuts the temporal trace at each CutHere and links the resulting segments
/// through the labels their guards and jumps reference.
SegmentedTrace split_and_stitch(const TemporalTrace& trace);

/// Swaps every stub handler call for the real handler.
SegmentedTrace replace_stubs(SegmentedTrace trace);

std::string dump(const TemporalTrace& trace);
std::string dump(const SegmentedTrace& trace);

}  // namespace tvm
