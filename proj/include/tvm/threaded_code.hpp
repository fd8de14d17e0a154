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
#include <string>
#include <vector>

#include "tvm/bytecode.hpp"
#include "tvm/handlers.hpp"
#include "tvm/inline_cache.hpp"
#include "tvm/shallow_tracer.hpp"

namespace tvm {

enum class EntryKind { Invoke, Branch, Goto, CachedCall, BackEdgeProbe, Return };

/// One step of subroutine-threaded code. Handler references are resolved at
/// compile time, so running an entry involves no opcode fetch or decode.
struct ThreadedEntry {
  EntryKind kind = EntryKind::Return;
  Handler handler = nullptr;
  /// Source instruction (operands for Invoke, the conditional jump for
  /// Branch, the call for CachedCall). Points into the program's code.
  const Instruction* inst = nullptr;
  std::size_t pc = 0;
  /// Segment index for Branch / Goto.
  std::uint32_t target = 0;
  /// Inline cache for CachedCall.
  InlineCacheSlot* cache = nullptr;
};

struct ThreadedCode {
  MethodId method = kNoMethod;
  std::vector<std::vector<ThreadedEntry>> segments;
  std::vector<std::string> segment_names;
  std::uint32_t entry = 0;
  /// CALL pc -> its slot.
  std::vector<std::pair<std::size_t, InlineCacheSlot*>> cache_sites;
  /// Size of the trace this was compiled from.
  std::size_t trace_ops = 0;

  std::size_t entry_count() const;
};

/// Lowers a stub-free segmented trace to threaded code. Call sites get their
/// slots from `caches` (created empty on first use).
ThreadedCode compile_threaded(const SegmentedTrace& trace, const Program& program,
                              InlineCacheStore& caches);

std::string dump(const ThreadedCode& code);

}  // namespace tvm
