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

#include "tvm/runtime.hpp"

#include <stdexcept>

#include "tvm/handlers.hpp"

namespace tvm {

std::string_view mode_name(ExecMode mode) {
  switch (mode) {
    case ExecMode::InterpOnly: return "interp";
    case ExecMode::Tier1Only: return "tier1";
    case ExecMode::Tier2Only: return "tier2";
    case ExecMode::Tier2HighThreshold: return "tier2-hi";
    case ExecMode::TwoLevel: return "two-level";
  }
  return "?";
}

std::optional<ExecMode> mode_from_name(std::string_view name) {
  for (ExecMode m : kAllModes) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

bool has_tier1(ExecMode mode) { return mode == ExecMode::Tier1Only || mode == ExecMode::TwoLevel; }

bool has_tier2(ExecMode mode) {
  return mode == ExecMode::Tier2Only || mode == ExecMode::Tier2HighThreshold || mode == ExecMode::TwoLevel;
}

std::uint64_t Thresholds::active_t2(ExecMode mode) const {
  return mode == ExecMode::Tier2HighThreshold ? t2_backedge_threshold * high_threshold_factor
                                              : t2_backedge_threshold;
}

void Thresholds::check() const {
  if (t1_method_threshold == 0 || t2_backedge_threshold == 0 || high_threshold_factor == 0) {
    throw std::invalid_argument("thresholds must be positive");
  }
}

void ProfileStore::reset(const Program& program) {
  method_entry_counts.assign(program.methods.size(), 0);
  backedge_counts.clear();
  for (const Method& m : program.methods) backedge_counts.emplace_back(m.code.size(), 0);
  transitions_fired.clear();
}

void CodeCache::reset(const Program& program) {
  threaded.clear();
  threaded.resize(program.methods.size());
  tier1_failed.assign(program.methods.size(), false);
  loops.clear();
  blacklist.clear();
}

const LoopCode* CodeCache::loop_at(MethodId m, std::size_t pc) const {
  auto it = loops.find({m, pc});
  return it == loops.end() ? nullptr : it->second.get();
}

std::size_t CodeCache::threaded_count() const {
  std::size_t n = 0;
  for (const auto& t : threaded) n += t != nullptr;
  return n;
}

/// Marks the engine that is running for error provenance.
class TierScope {
 public:
  TierScope(Runtime& rt, Tier t) : rt_(rt), saved_(rt.tier) { rt.tier = t; }
  ~TierScope() { rt_.tier = saved_; }
  TierScope(const TierScope&) = delete;
  TierScope& operator=(const TierScope&) = delete;

 private:
  Runtime& rt_;
  Tier saved_;
};

namespace {

class DepthGuard {
 public:
  DepthGuard(std::size_t& depth, std::size_t limit) : depth_(depth) {
    if (++depth_ > limit) {
      --depth_;
      throw VmError(ErrorKind::StackOverflow, "call depth exceeds " + std::to_string(limit));
    }
  }
  ~DepthGuard() { --depth_; }
  DepthGuard(const DepthGuard&) = delete;
  DepthGuard& operator=(const DepthGuard&) = delete;

 private:
  std::size_t& depth_;
};

}  // namespace

Runtime::Runtime(const Program& program, VmOptions options)
    : program_(program), options_(options) {
  options_.thresholds.check();
  active_t2_ = options_.thresholds.active_t2(options_.mode);
  tier1_ = has_tier1(options_.mode);
  tier2_ = has_tier2(options_.mode);
  probes_ = options_.mode == ExecMode::TwoLevel;
  ic_ = tier1_ && options_.inline_cache;
  heavy_phase = options_.mode == ExecMode::Tier2Only || options_.mode == ExecMode::Tier2HighThreshold;
  profile.reset(program_);
  cache.reset(program_);
}

void Runtime::begin_run() {
  heap.clear();
  output.clear();
}

Frame Runtime::make_frame(MethodId callee) const {
  return Frame(program_.method(callee), callee);
}

Value Runtime::run_entry() {
  const MethodId entry = program_.entry_id();
  Frame frame = make_frame(entry);
  try {
    return dispatch(Instruction{}, entry, frame, heavy_phase, nullptr);
  } catch (TierTransition& t) {
    return resume_chain(std::move(t.frames), true);
  }
}

// ---------------------------------------------------------------------------
// Calls

void Runtime::call(Frame& caller, const Instruction& inst, InlineCacheSlot* slot) {
  const std::uint32_t argc = inst.argc;
  std::vector<Value>& st = caller.stack;
  MethodId callee = inst.callee;
  const bool dynamic = inst.op == Opcode::CallValue;
  if (dynamic) {
    const Value& mv = st[st.size() - argc - 1];
    if (!mv.is_method()) {
      throw VmError(ErrorKind::TypeError, std::string("CALL_VALUE: unexpected ") + tag_name(mv.tag()));
    }
    callee = mv.as_method();
    const Method& m = program_.method(callee);
    if (m.arg_count != argc) {
      throw VmError(ErrorKind::InvalidArgument, "CALL_VALUE: " + m.name + " takes " +
                                                    std::to_string(m.arg_count) + " arguments, got " +
                                                    std::to_string(argc));
    }
  }
  Frame frame = make_frame(callee);
  std::copy(st.end() - argc, st.end(), frame.locals.begin());
  st.resize(st.size() - argc - (dynamic ? 1 : 0));

  Value result;
  Recorder* rec = recorder_;
  if (rec && rec->tracks(caller) && rec->pending_call() == Recorder::CallMode::Inline) {
    DepthGuard depth(depth_, options_.max_call_depth);
    ++profile.method_entry_counts[callee];
    ++counters.indirect_calls;
    frame.heavy = true;
    rec->enter(frame);
    result = interpret_heavy(frame);
    rec->leave();
    caller.push(result);
    return;
  }
  if (ic_ && !slot) slot = &inline_caches.slot({caller.method_id, caller.pc});
  try {
    result = dispatch(inst, callee, frame, caller.heavy, slot);
  } catch (TierTransition& t) {
    if (!caller.heavy) {
      t.frames.push_back(std::move(caller));
      throw;
    }
    result = resume_chain(std::move(t.frames), true);
  }
  caller.push(result);
}

Value Runtime::call_from_trace(MethodId caller, std::size_t pc, MethodId callee, std::vector<Value> args) {
  Frame frame = make_frame(callee);
  std::copy(args.begin(), args.end(), frame.locals.begin());
  InlineCacheSlot* slot = ic_ ? &inline_caches.slot({caller, pc}) : nullptr;
  try {
    return dispatch(program_.method(caller).code[pc], callee, frame, true, slot);
  } catch (TierTransition& t) {
    return resume_chain(std::move(t.frames), true);
  }
}

Value Runtime::dispatch(const Instruction& inst, MethodId callee, Frame& frame, bool caller_heavy,
                        InlineCacheSlot* slot) {
  DepthGuard depth(depth_, options_.max_call_depth);
  ++profile.method_entry_counts[callee];
  if (slot) {
    if (check_type(*slot, callee) && slot->target) {
      ++slot->hits;
      ++counters.direct_calls;
      if (options_.shadow_check) {
        const MethodId resolved = inst.op == Opcode::Call ? *program_.find(inst.name) : callee;
        if (resolved != slot->expected || cache.threaded_for(resolved) != slot->target) {
          throw InternalError("inline cache disagrees with slow-path lookup at " +
                              program_.method(slot->site.method).name + "@" +
                              std::to_string(slot->site.pc));
        }
      }
      return execute_threaded(*slot->target, frame);
    }
    ++counters.indirect_calls;
    ++slot->slow_calls;
    const MethodId resolved = inst.op == Opcode::Call ? *program_.find(inst.name) : callee;
    // Record before entering so recursive calls through this site already
    // see the cached callee.
    if (!caller_heavy && !heavy_phase) tier1_code(resolved);
    record_type(*slot, resolved, cache.threaded_for(resolved));
    return enter_method(frame, caller_heavy);
  }
  if (inst.op == Opcode::Call || inst.op == Opcode::CallValue) ++counters.indirect_calls;
  return enter_method(frame, caller_heavy);
}

Value Runtime::enter_method(Frame& frame, bool caller_heavy) {
  if (caller_heavy || heavy_phase) {
    frame.heavy = true;
    return interpret_heavy(frame);
  }
  if (const ThreadedCode* code = tier1_code(frame.method_id)) return execute_threaded(*code, frame);
  return interpret_light(frame);
}

const ThreadedCode* Runtime::tier1_code(MethodId id) {
  if (!tier1_) return nullptr;
  const ThreadedCode* code = cache.threaded_for(id);
  if (!code && !cache.tier1_failed[id] &&
      profile.method_entry_counts[id] >= options_.thresholds.t1_method_threshold) {
    code = compile_tier1(id);
  }
  return code;
}

const ThreadedCode* Runtime::compile_tier1(MethodId id) {
  if (auto* existing = cache.threaded_for(id)) return existing;
  if (cache.tier1_failed[id]) return nullptr;
  try {
    const TemporalTrace trace = shallow_trace(program_.method(id), id, options_.tier1_trace_limit);
    const SegmentedTrace stitched = replace_stubs(split_and_stitch(trace));
    auto code = std::make_unique<ThreadedCode>(compile_threaded(stitched, program_, inline_caches));
    ++trace_stats.tier1_count;
    trace_stats.tier1_ops += code->trace_ops;
    cache.threaded[id] = std::move(code);
    return cache.threaded[id].get();
  } catch (const TraceTooLong&) {
    cache.tier1_failed[id] = true;
    ++trace_stats.tier1_failures;
    return nullptr;
  }
}

// ---------------------------------------------------------------------------
// Engines

Value Runtime::interpret_light(Frame& f) {
  TierScope scope(*this, Tier::Interpreter);
  const auto& handlers = handler_table();
  const std::vector<Instruction>& code = f.method->code;
  try {
    for (;;) {
      const Instruction& inst = code[f.pc];
      ++counters.dispatches;
      switch (inst.op) {
        case Opcode::JumpBackward:
          if (probes_) probe_backedge(f, f.pc);
          f.pc = inst.target();
          break;
        case Opcode::Jump:
          f.pc = inst.target();
          break;
        case Opcode::Ret:
          return f.pop();
        default: {
          ++counters.handler_calls;
          const HandlerOutcome out = handlers[static_cast<std::size_t>(inst.op)](f, inst, *this);
          f.pc = out.kind == HandlerOutcome::Kind::Jump ? out.target : f.pc + 1;
        }
      }
    }
  } catch (VmError& e) {
    e.locate(f.method->name, f.pc, Tier::Interpreter);
    throw;
  }
}

Value Runtime::interpret_heavy(Frame& f, bool resume_at_backedge) {
  TierScope scope(*this, Tier::Heavy);
  const auto& handlers = handler_table();
  const std::vector<Instruction>& code = f.method->code;
  std::unique_ptr<Recorder> own;
  struct Release {
    Runtime& rt;
    std::unique_ptr<Recorder>& own;
    ~Release() {
      if (own && rt.recorder_ == own.get()) rt.recorder_ = nullptr;
    }
  } release{*this, own};
  try {
    for (;;) {
      const Instruction& inst = code[f.pc];
      ++counters.dispatches;
      if (recorder_) {
        recorder_->before(f);
        if (own && own->status() != Recorder::Status::Recording) {
          finish_recording(own, recording_count_);
        }
      }
      switch (inst.op) {
        case Opcode::JumpBackward: {
          std::uint64_t& count = profile.backedge_counts[f.method_id][f.pc];
          if (resume_at_backedge) {
            resume_at_backedge = false;
          } else {
            ++count;
          }
          const std::uint64_t seen = count;
          f.pc = inst.target();
          if (tier2_) at_loop_header(f, seen, own);
          break;
        }
        case Opcode::Jump:
          f.pc = inst.target();
          break;
        case Opcode::Ret:
          return f.pop();
        default: {
          ++counters.handler_calls;
          const HandlerOutcome out = handlers[static_cast<std::size_t>(inst.op)](f, inst, *this);
          f.pc = out.kind == HandlerOutcome::Kind::Jump ? out.target : f.pc + 1;
        }
      }
    }
  } catch (VmError& e) {
    e.locate(f.method->name, f.pc, Tier::Heavy);
    throw;
  }
}

void Runtime::at_loop_header(Frame& f, std::uint64_t count, std::unique_ptr<Recorder>& own) {
  if (const LoopCode* loop = cache.loop_at(f.method_id, f.pc)) {
    run_loop(*loop, f);
    return;
  }
  if (recorder_ || count < active_t2_) return;
  const CodeKey anchor{f.method_id, f.pc};
  if (auto it = cache.blacklist.find(anchor); it != cache.blacklist.end() && count < it->second) return;
  own = std::make_unique<Recorder>(program_, f, options_.tier2_trace_limit, options_.inline_depth);
  recorder_ = own.get();
  recording_count_ = count;
}

void Runtime::finish_recording(std::unique_ptr<Recorder>& own, std::uint64_t count) {
  if (own->status() == Recorder::Status::Done) {
    LoopCode loop = own->take();
    if (options_.optimize_loops) loop = optimize_trace(std::move(loop));
    ++trace_stats.tier2_count;
    trace_stats.tier2_ops += loop.op_count();
    const CodeKey anchor{loop.method, loop.header_pc};
    cache.loops[anchor] = std::make_unique<LoopCode>(std::move(loop));
  } else {
    ++trace_stats.tier2_aborts;
    LoopCode partial = own->take();
    cache.blacklist[{partial.method, partial.header_pc}] = count + 2 * active_t2_;
  }
  recorder_ = nullptr;
  own.reset();
}

void Runtime::run_loop(const LoopCode& loop, Frame& f) {
  LoopExit exit;
  {
    TierScope scope(*this, Tier::Trace);
    try {
      exit = execute_loop(loop, f, *this);
    } catch (VmError& e) {
      e.locate(f.method->name, f.pc, Tier::Trace);
      throw;
    }
  }
  if (exit.inlined.empty()) return;
  // Finish the inlined calls the trace was in the middle of, innermost first.
  Value v = interpret_heavy(exit.inlined.back());
  for (std::size_t k = exit.inlined.size() - 1; k-- > 0;) {
    Frame& outer = exit.inlined[k];
    outer.push(v);
    ++outer.pc;
    v = interpret_heavy(outer);
  }
  f.push(v);
  ++f.pc;
}

Value Runtime::execute_threaded(const ThreadedCode& code, Frame& f) {
  TierScope scope(*this, Tier::Threaded);
  const std::vector<ThreadedEntry>* seg = &code.segments[code.entry];
  std::size_t i = 0;
  try {
    for (;;) {
      const ThreadedEntry& e = (*seg)[i];
      switch (e.kind) {
        case EntryKind::Invoke:
          f.pc = e.pc;
          ++counters.handler_calls;
          e.handler(f, *e.inst, *this);
          ++i;
          break;
        case EntryKind::CachedCall:
          f.pc = e.pc;
          ++counters.handler_calls;
          call(f, *e.inst, ic_ ? e.cache : nullptr);
          ++i;
          break;
        case EntryKind::Branch:
          f.pc = e.pc;
          ++counters.handler_calls;
          if (e.handler(f, *e.inst, *this).kind == HandlerOutcome::Kind::Jump) {
            seg = &code.segments[e.target];
            i = 0;
          } else {
            ++i;
          }
          break;
        case EntryKind::Goto:
          seg = &code.segments[e.target];
          i = 0;
          break;
        case EntryKind::BackEdgeProbe:
          f.pc = e.pc;
          if (probes_) probe_backedge(f, e.pc);
          ++i;
          break;
        case EntryKind::Return:
          return f.pop();
      }
    }
  } catch (VmError& e) {
    e.locate(f.method->name, f.pc, Tier::Threaded);
    throw;
  }
}

// ---------------------------------------------------------------------------
// Tier coordination

void Runtime::probe_backedge(Frame& f, std::size_t pc) {
  const std::uint64_t count = ++profile.backedge_counts[f.method_id][pc];
  if (count != active_t2_) return;
  const CodeKey key{f.method_id, pc};
  if (profile.transitions_fired.count(key)) return;
  const CodeKey anchor{f.method_id, f.method->code[pc].target()};
  if (auto it = cache.blacklist.find(anchor); it != cache.blacklist.end() && count < it->second) return;
  profile.transitions_fired.insert(key);
  f.pc = pc;
  if (options_.record_transitions) transitions.push_back({key, count, f, Frame{}});
  throw TierTransition(std::move(f));
}

Value Runtime::resume_chain(std::vector<Frame> frames, bool at_backedge) {
  heavy_phase = true;
  for (Frame& fr : frames) fr.heavy = true;
  if (options_.record_transitions && !transitions.empty() && transitions.back().resumed.method == nullptr) {
    transitions.back().resumed = frames.front();
  }
  Value v = interpret_heavy(frames.front(), at_backedge);
  for (std::size_t k = 1; k < frames.size(); ++k) {
    frames[k].push(v);
    ++frames[k].pc;
    v = interpret_heavy(frames[k]);
  }
  return v;
}

}  // namespace tvm
