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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tvm/bytecode.hpp"
#include "tvm/errors.hpp"
#include "tvm/frame.hpp"
#include "tvm/inline_cache.hpp"
#include "tvm/loop_trace.hpp"
#include "tvm/shallow_tracer.hpp"
#include "tvm/threaded_code.hpp"

namespace tvm {

enum class ExecMode { InterpOnly, Tier1Only, Tier2Only, Tier2HighThreshold, TwoLevel };

inline constexpr ExecMode kAllModes[] = {ExecMode::InterpOnly, ExecMode::Tier1Only, ExecMode::Tier2Only,
                                         ExecMode::Tier2HighThreshold, ExecMode::TwoLevel};

/// CLI spelling: interp, tier1, tier2, tier2-hi, two-level.
std::string_view mode_name(ExecMode mode);
std::optional<ExecMode> mode_from_name(std::string_view name);
bool has_tier1(ExecMode mode);
bool has_tier2(ExecMode mode);

struct Thresholds {
  std::uint64_t t1_method_threshold = 10;
  std::uint64_t t2_backedge_threshold = 1000;
  std::uint64_t high_threshold_factor = 3;

  /// Back-edge count that makes a loop hot in `mode`.
  std::uint64_t active_t2(ExecMode mode) const;
  void check() const;
};

struct StepCounters {
  /// Fetch/decode iterations of an interpreter dispatch loop.
  std::uint64_t dispatches = 0;
  /// Data-path handler executions (pure jumps and RET are not handlers).
  std::uint64_t handler_calls = 0;
  /// Calls resolved through the slow path.
  std::uint64_t indirect_calls = 0;
  /// Inline-cache hits that called compiled code directly.
  std::uint64_t direct_calls = 0;

  friend bool operator==(const StepCounters&, const StepCounters&) = default;
  friend StepCounters operator-(const StepCounters& a, const StepCounters& b) {
    return {a.dispatches - b.dispatches, a.handler_calls - b.handler_calls,
            a.indirect_calls - b.indirect_calls, a.direct_calls - b.direct_calls};
  }
};

struct TraceStats {
  std::uint64_t tier1_count = 0;
  std::uint64_t tier1_ops = 0;
  std::uint64_t tier2_count = 0;
  std::uint64_t tier2_ops = 0;
  std::uint64_t tier1_failures = 0;
  std::uint64_t tier2_aborts = 0;
};

using CodeKey = std::pair<MethodId, std::size_t>;

/// Program-lifetime profiling counters.
struct ProfileStore {
  std::vector<std::uint64_t> method_entry_counts;
  /// Indexed [method][pc]; only JUMP_BACKWARD pcs are ever non-zero.
  std::vector<std::vector<std::uint64_t>> backedge_counts;
  std::set<CodeKey> transitions_fired;

  void reset(const Program& program);
  std::uint64_t backedge_count(MethodId m, std::size_t pc) const { return backedge_counts[m][pc]; }
};

struct CodeCache {
  std::vector<std::unique_ptr<ThreadedCode>> threaded;
  std::vector<bool> tier1_failed;
  /// Keyed by (method, loop-header pc).
  std::map<CodeKey, std::unique_ptr<LoopCode>> loops;
  /// Anchor -> back-edge count at which tracing may be retried.
  std::map<CodeKey, std::uint64_t> blacklist;

  void reset(const Program& program);
  const ThreadedCode* threaded_for(MethodId m) const { return threaded[m].get(); }
  const LoopCode* loop_at(MethodId m, std::size_t pc) const;
  std::size_t threaded_count() const;
};

/// Raised by a back-edge probe in the lightweight tier when a loop turns hot.
/// Carries the live frames from the probing frame outwards; every frame after
/// the first is paused at a call awaiting its callee's result.
class TierTransition {
 public:
  explicit TierTransition(Frame hot) { frames.push_back(std::move(hot)); }
  std::vector<Frame> frames;
};

/// Raised by HALT; unwinds every tier.
struct ProgramHalt {};

struct VmOptions {
  ExecMode mode = ExecMode::InterpOnly;
  Thresholds thresholds;
  bool inline_cache = true;
  bool optimize_loops = true;
  std::size_t tier1_trace_limit = kDefaultTier1TraceLimit;
  std::size_t tier2_trace_limit = kDefaultTier2TraceLimit;
  std::size_t inline_depth = kDefaultInlineDepth;
  std::size_t max_call_depth = 2000;
  /// Test mode: re-resolve every fast-path call through the slow path and
  /// fail loudly on disagreement.
  bool shadow_check = false;
  /// Test mode: keep copies of frames at each tier transition.
  bool record_transitions = false;
};

struct TransitionRecord {
  CodeKey anchor;
  std::uint64_t count = 0;
  Frame raised;
  Frame resumed;
};

/// All mutable state of one VM instance, plus the execution engines. Not
/// thread-safe; separate instances share nothing mutable.
class Runtime {
 public:
  Runtime(const Program& program, VmOptions options);

  const Program& program() const { return program_; }
  const VmOptions& options() const { return options_; }

  /// Runs the entry method through the tier switcher. Throws VmError or
  /// ProgramHalt.
  Value run_entry();
  /// Clears per-run state (heap, output). Compiled code and profiles persist.
  void begin_run();

  // Engines.
  Value interpret_light(Frame& frame);
  Value interpret_heavy(Frame& frame, bool resume_at_backedge = false);
  Value execute_threaded(const ThreadedCode& code, Frame& frame);
  /// Performs CALL / CALL_VALUE for `caller` and pushes the result.
  void call(Frame& caller, const Instruction& inst, InlineCacheSlot* slot = nullptr);
  /// Call issued by a tier-2 trace that did not inline its callee.
  Value call_from_trace(MethodId caller, std::size_t pc, MethodId callee, std::vector<Value> args);
  /// Back-edge profiling hook of the lightweight tier; may throw
  /// TierTransition.
  void probe_backedge(Frame& frame, std::size_t pc);
  /// Continues a chain of frames (innermost first) in the heavyweight tier.
  Value resume_chain(std::vector<Frame> frames, bool at_backedge);
  /// Shallow-traces and compiles a method; null when it cannot be compiled.
  const ThreadedCode* compile_tier1(MethodId method);

  Heap heap;
  std::string output;
  StepCounters counters;
  ProfileStore profile;
  CodeCache cache;
  InlineCacheStore inline_caches;
  TraceStats trace_stats;
  std::vector<TransitionRecord> transitions;
  /// Tier currently executing, for error provenance.
  Tier tier = Tier::Interpreter;
  /// Set once the switcher has moved to the heavyweight tier; never cleared.
  bool heavy_phase = false;

 private:
  friend class TierScope;
  Value dispatch(const Instruction& inst, MethodId callee, Frame& frame, bool caller_heavy,
                 InlineCacheSlot* slot);
  Value enter_method(Frame& frame, bool caller_heavy);
  /// Tier-1 code for a method, compiling it once its entry count is due.
  const ThreadedCode* tier1_code(MethodId id);
  void at_loop_header(Frame& frame, std::uint64_t count, std::unique_ptr<Recorder>& own);
  void finish_recording(std::unique_ptr<Recorder>& own, std::uint64_t count);
  void run_loop(const LoopCode& loop, Frame& frame);
  Frame make_frame(MethodId callee) const;

  const Program& program_;
  VmOptions options_;
  std::uint64_t active_t2_;
  bool tier1_ = false;
  bool tier2_ = false;
  bool probes_ = false;
  bool ic_ = false;
  std::size_t depth_ = 0;
  Recorder* recorder_ = nullptr;
  std::uint64_t recording_count_ = 0;
};

}  // namespace tvm
