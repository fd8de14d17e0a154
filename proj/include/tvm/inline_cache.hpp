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
#include <functional>
#include <unordered_map>
#include <vector>

#include "tvm/value.hpp"

namespace tvm {

struct ThreadedCode;

struct CallSite {
  MethodId method = kNoMethod;
  std::size_t pc = 0;
  friend bool operator==(const CallSite&, const CallSite&) = default;
};

struct CallSiteHash {
  std::size_t operator()(const CallSite& s) const {
    return std::hash<std::uint64_t>()((static_cast<std::uint64_t>(s.method) << 32) ^ s.pc);
  }
};

/// Monomorphic inline cache for one call site. The expected callee never
/// changes once cached; misses leave the entry in place.
struct InlineCacheSlot {
  enum class State { Empty, Cached };

  CallSite site;
  State state = State::Empty;
  MethodId expected = kNoMethod;
  /// Compiled code of `expected`; null until it exists ("deferred").
  const ThreadedCode* target = nullptr;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  /// Calls at this site that went through the slow (indirect) path.
  std::uint64_t slow_calls = 0;
};

/// True iff the slot is cached on exactly `callee`.
bool check_type(const InlineCacheSlot& slot, MethodId callee);

/// Slow-path bookkeeping: fills an empty slot, otherwise counts a hit or a
/// miss. `compiled` is the callee's current tier-1 code, if any.
void record_type(InlineCacheSlot& slot, MethodId callee, const ThreadedCode* compiled);

class InlineCacheStore {
 public:
  /// Returns the slot for a site, creating an empty one on first use. Slot
  /// addresses are stable for the lifetime of the store.
  InlineCacheSlot& slot(const CallSite& site);
  const InlineCacheSlot* find(const CallSite& site) const;

  /// All slots ordered by (method, pc).
  std::vector<const InlineCacheSlot*> sorted() const;
  std::size_t size() const { return slots_.size(); }

 private:
  std::unordered_map<CallSite, InlineCacheSlot, CallSiteHash> slots_;
};

}  // namespace tvm
