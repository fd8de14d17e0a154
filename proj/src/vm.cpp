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

#include "tvm/vm.hpp"

#include <chrono>

#include "tvm/validator.hpp"

namespace tvm {

std::string RunError::describe() const {
  return std::string(error_kind_name(kind)) + " in " + method + " at pc " + std::to_string(pc) + " (" +
         tier_name(tier) + "): " + message;
}

Vm::Vm(Program program, VmOptions options) : program_(std::move(program)) {
  validate(program_);
  runtime_ = std::make_unique<Runtime>(program_, options);
}

RunResult Vm::run() {
  Runtime& rt = *runtime_;
  rt.begin_run();
  RunResult r;
  const StepCounters before = rt.counters;
  const auto start = std::chrono::steady_clock::now();
  try {
    r.value = rt.run_entry();
  } catch (const ProgramHalt&) {
    r.halted = true;
  } catch (const VmError& e) {
    r.error = RunError{e.kind(), e.what(), e.method(), e.pc(), e.tier()};
  }
  const auto stop = std::chrono::steady_clock::now();
  r.total_ns = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
  r.counters = rt.counters - before;
  r.output = rt.output;
  r.heap = rt.heap.arrays();
  return r;
}

std::string format_value(const Value& v, const Program& program) {
  if (v.is_method()) return program.method(v.as_method()).name;
  return to_string(v);
}

nlohmann::json stats_json(const RunResult& result, const Runtime& rt,
                          std::optional<std::uint64_t> first_iteration_ns) {
  using nlohmann::json;
  json j;
  if (result.error) {
    j["result"] = nullptr;
    j["error"] = result.error->describe();
  } else if (result.halted) {
    j["result"] = nullptr;
    j["halted"] = true;
  } else if (result.value.is_int()) {
    j["result"] = result.value.as_int();
  } else {
    j["result"] = format_value(result.value, rt.program());
  }
  j["timings"] = {{"total_ns", result.total_ns}};
  if (first_iteration_ns) j["timings"]["first_iteration_ns"] = *first_iteration_ns;
  j["counters"] = {{"dispatches", result.counters.dispatches},
                   {"handler_calls", result.counters.handler_calls},
                   {"direct_calls", result.counters.direct_calls},
                   {"indirect_calls", result.counters.indirect_calls}};
  j["traces"] = {{"tier1", {{"count", rt.trace_stats.tier1_count}, {"total_ops", rt.trace_stats.tier1_ops}}},
                 {"tier2", {{"count", rt.trace_stats.tier2_count}, {"total_ops", rt.trace_stats.tier2_ops}}}};
  json sites = json::array();
  for (const InlineCacheSlot* s : rt.inline_caches.sorted()) {
    sites.push_back({{"site", rt.program().method(s->site.method).name + "@" + std::to_string(s->site.pc)},
                     {"hits", s->hits},
                     {"misses", s->misses}});
  }
  j["inline_cache"] = std::move(sites);
  return j;
}

}  // namespace tvm
