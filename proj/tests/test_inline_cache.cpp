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

#include "doctest.h"
#include "support.hpp"

#include "tvm/inline_cache.hpp"
#include "tvm/threaded_code.hpp"

using namespace tvm;
using namespace tvm::testing;

namespace {

// `site` is called 200 times and switches its CALL_VALUE callee by parity.
const char* kPolymorphic =
    ".method main 0 2\n  CONST_INT 0\n  STORE_LOCAL 0\n  CONST_INT 0\n  STORE_LOCAL 1\n"
    "loop:\n  LOAD_LOCAL 0\n  CONST_INT 200\n  LT\n  JUMP_IF_FALSE done\n"
    "  LOAD_LOCAL 1\n  LOAD_LOCAL 0\n  CALL site 1\n  ADD\n  STORE_LOCAL 1\n"
    "  LOAD_LOCAL 0\n  CONST_INT 1\n  ADD\n  STORE_LOCAL 0\n  JUMP_BACKWARD loop\n"
    "done:\n  LOAD_LOCAL 1\n  RET\n.end\n"
    ".method site 1 1\n  LOAD_LOCAL 0\n  CONST_INT 2\n  MOD\n  JUMP_IF_TRUE odd\n"
    "  CONST_METHOD inc\n  JUMP go\nodd:\n  CONST_METHOD dec\ngo:\n  LOAD_LOCAL 0\n  CALL_VALUE 1\n  RET\n.end\n"
    ".method inc 1 1\n  LOAD_LOCAL 0\n  CONST_INT 1\n  ADD\n  RET\n.end\n"
    ".method dec 1 1\n  LOAD_LOCAL 0\n  CONST_INT 1\n  SUB\n  RET\n.end\n";

// `hot` runs 50 times; `cold` is reached from it only once.
const char* kCold =
    ".method main 0 2\n  CONST_INT 50\n  STORE_LOCAL 0\n  CONST_INT 0\n  STORE_LOCAL 1\n"
    "loop:\n  LOAD_LOCAL 0\n  JUMP_IF_FALSE done\n"
    "  LOAD_LOCAL 1\n  LOAD_LOCAL 0\n  CALL hot 1\n  ADD\n  STORE_LOCAL 1\n"
    "  LOAD_LOCAL 0\n  CONST_INT 1\n  SUB\n  STORE_LOCAL 0\n  JUMP_BACKWARD loop\n"
    "done:\n  LOAD_LOCAL 1\n  RET\n.end\n"
    ".method hot 1 1\n  LOAD_LOCAL 0\n  CONST_INT 1\n  EQ\n  JUMP_IF_FALSE plain\n"
    "  LOAD_LOCAL 0\n  CALL cold 1\n  RET\nplain:\n  LOAD_LOCAL 0\n  RET\n.end\n"
    ".method cold 1 1\n  LOAD_LOCAL 0\n  CONST_INT 1000\n  MUL\n  RET\n.end\n";

const InlineCacheSlot* slot_in(const Runtime& rt, const Program& p, const std::string& method, Opcode op) {
  const MethodId id = *p.find(method);
  for (std::size_t pc = 0; pc < p.method(id).code.size(); ++pc) {
    if (p.method(id).code[pc].op == op) return rt.inline_caches.find(CallSite{id, pc});
  }
  return nullptr;
}

}  // namespace

TEST_CASE("record_type and check_type") {
  InlineCacheSlot s;
  CHECK_FALSE(check_type(s, 3));
  record_type(s, 3, nullptr);
  CHECK(s.state == InlineCacheSlot::State::Cached);
  CHECK(s.expected == 3);
  CHECK(check_type(s, 3));
  CHECK_FALSE(check_type(s, 4));
  record_type(s, 3, nullptr);
  CHECK(s.hits == 1);
  CHECK(s.misses == 0);
  record_type(s, 4, nullptr);
  CHECK(s.expected == 3);
  CHECK(s.misses == 1);
  CHECK(s.hits == 1);
}

TEST_CASE("deferred target is filled once the callee compiles") {
  InlineCacheSlot s;
  record_type(s, 2, nullptr);
  CHECK(s.target == nullptr);
  ThreadedCode code;
  record_type(s, 2, &code);
  CHECK(s.target == &code);
}

TEST_CASE("store hands out stable slots") {
  InlineCacheStore store;
  InlineCacheSlot& a = store.slot({1, 4});
  for (std::size_t pc = 0; pc < 100; ++pc) store.slot({2, pc});
  CHECK(&store.slot({1, 4}) == &a);
  CHECK(store.find({1, 5}) == nullptr);
  CHECK(store.size() == 101);
  const auto sorted = store.sorted();
  CHECK(sorted.front()->site == CallSite{1, 4});
}

TEST_CASE("polymorphic site stays on its first callee") {
  const Program p = parse(kPolymorphic);
  Vm vm(p, options_for(ExecMode::Tier1Only));
  const RunResult r = vm.run();
  CHECK(observe(r, p) == observe(run_mode(p, ExecMode::InterpOnly), p));
  const InlineCacheSlot* s = slot_in(vm.runtime(), p, "site", Opcode::CallValue);
  REQUIRE(s != nullptr);
  CHECK(s->state == InlineCacheSlot::State::Cached);
  const MethodId first = s->expected;
  CHECK(s->misses > 0);
  CHECK(s->hits > 0);
  vm.run();
  CHECK(s->expected == first);
}

TEST_CASE("recursive fib stops making indirect calls after warm-up") {
  const Program p = load_program("programs/corpus/fib.tvm");
  Vm vm(p, options_for(ExecMode::Tier1Only));
  const RunResult first = vm.run();
  REQUIRE_FALSE(first.error.has_value());
  const MethodId fib = *p.find("fib");
  std::vector<const InlineCacheSlot*> sites;
  for (std::size_t pc = 0; pc < p.method(fib).code.size(); ++pc) {
    if (p.method(fib).code[pc].op == Opcode::Call) sites.push_back(vm.runtime().inline_caches.find({fib, pc}));
  }
  REQUIRE(sites.size() == 2);
  std::vector<std::uint64_t> slow;
  for (const InlineCacheSlot* s : sites) {
    REQUIRE(s != nullptr);
    CHECK(s->state == InlineCacheSlot::State::Cached);
    CHECK(s->expected == fib);
    CHECK(s->target != nullptr);
    CHECK(s->slow_calls <= 11);
    slow.push_back(s->slow_calls);
  }
  const RunResult second = vm.run();
  CHECK(second.value == first.value);
  for (std::size_t i = 0; i < sites.size(); ++i) CHECK(sites[i]->slow_calls == slow[i]);
  CHECK(second.counters.direct_calls > 10000);
  CHECK(second.counters.indirect_calls <= 1);
}

TEST_CASE("cold callee always takes the slow path") {
  const Program p = parse(kCold);
  Vm vm(p, options_for(ExecMode::Tier1Only));
  const RunResult r = vm.run();
  CHECK(observe(r, p) == observe(run_mode(p, ExecMode::InterpOnly), p));
  CHECK(vm.runtime().cache.threaded_for(*p.find("cold")) == nullptr);
  const InlineCacheSlot* s = slot_in(vm.runtime(), p, "hot", Opcode::Call);
  REQUIRE(s != nullptr);
  CHECK(s->target == nullptr);
  CHECK(s->slow_calls == 1);
}

TEST_CASE("disabling the cache changes no result") {
  for (const std::string& dir : {"programs/corpus", "programs/suite"}) {
    for (const std::string& f : program_files(dir)) {
      const Program p = load_program(f);
      for (ExecMode m : {ExecMode::Tier1Only, ExecMode::TwoLevel}) {
        VmOptions on = options_for(m);
        VmOptions off = on;
        off.inline_cache = false;
        Vm a(p, on);
        Vm b(p, off);
        const RunResult ra = a.run();
        const RunResult rb = b.run();
        INFO(f << " " << mode_name(m));
        CHECK(observe(ra, p) == observe(rb, p));
        CHECK(rb.counters.direct_calls == 0);
      }
    }
  }
}

TEST_CASE("fast path agrees with a shadow lookup") {
  for (const std::string& f : program_files("programs/corpus")) {
    const Program p = load_program(f);
    VmOptions o = options_for(ExecMode::Tier1Only, 2);
    o.shadow_check = true;
    Vm vm(p, o);
    INFO(f);
    CHECK_NOTHROW(vm.run());
  }
}

TEST_CASE("stats report per-site hits and misses") {
  const Program p = parse(kPolymorphic);
  Vm vm(p, options_for(ExecMode::Tier1Only));
  const RunResult r = vm.run();
  const nlohmann::json j = stats_json(r, vm.runtime());
  REQUIRE(j.at("inline_cache").is_array());
  REQUIRE_FALSE(j.at("inline_cache").empty());
  bool found_miss = false;
  for (const auto& site : j.at("inline_cache")) {
    CHECK(site.contains("site"));
    found_miss = found_miss || site.at("misses").get<std::uint64_t>() > 0;
  }
  CHECK(found_miss);
}
