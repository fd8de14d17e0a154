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

#include "tvm/inline_cache.hpp"

#include <algorithm>

namespace tvm {

bool check_type(const InlineCacheSlot& slot, MethodId callee) {
  return slot.state == InlineCacheSlot::State::Cached && slot.expected == callee;
}

void record_type(InlineCacheSlot& slot, MethodId callee, const ThreadedCode* compiled) {
  if (slot.state == InlineCacheSlot::State::Empty) {
    slot.state = InlineCacheSlot::State::Cached;
    slot.expected = callee;
    slot.target = compiled;
    return;
  }
  if (slot.expected == callee) {
    ++slot.hits;
    if (!slot.target) slot.target = compiled;
  } else {
    ++slot.misses;
  }
}

InlineCacheSlot& InlineCacheStore::slot(const CallSite& site) {
  auto [it, inserted] = slots_.try_emplace(site);
  if (inserted) it->second.site = site;
  return it->second;
}

const InlineCacheSlot* InlineCacheStore::find(const CallSite& site) const {
  auto it = slots_.find(site);
  return it == slots_.end() ? nullptr : &it->second;
}

std::vector<const InlineCacheSlot*> InlineCacheStore::sorted() const {
  std::vector<const InlineCacheSlot*> out;
  out.reserve(slots_.size());
  for (const auto& [site, slot] : slots_) out.push_back(&slot);
  std::sort(out.begin(), out.end(), [](const InlineCacheSlot* a, const InlineCacheSlot* b) {
    if (a->site.method != b->site.method) return a->site.method < b->site.method;
    return a->site.pc < b->site.pc;
  });
  return out;
}

}  // namespace tvm
