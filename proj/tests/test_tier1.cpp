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

#include <random>

#include "tvm/threaded_code.hpp"

using namespace tvm;
using namespace tvm::testing;

namespace {

std::vector<EntryKind> entry_kinds(const std::vector<ThreadedEntry>& seg) {
  std::vector<EntryKind> out;
  for (const ThreadedEntry& e : seg) out.push_back(e.kind);
  return out;
}

struct Invocation {
  Value result;
  StepCounters delta;
  std::string error;
};

// Runs one method on `args`, either through the light interpreter or through
// its threaded code, on a runtime whose heap holds `heap`.
Invocation invoke(Runtime& rt, MethodId id, const std::vector<Value>& args, bool threaded) {
  const Method& m = rt.program().method(id);
  Frame f(m, id);
  std::copy(args.begin(), args.end(), f.locals.begin());
  const StepCounters before = rt.counters;
  Invocation out;
  try {
    if (threaded) {
      const ThreadedCode* code = rt.cache.threaded_for(id);
      if (code == nullptr) code = rt.compile_tier1(id);
      REQUIRE(code != nullptr);
      out.result = rt.execute_threaded(*code, f);
    } else {
      out.result = rt.interpret_light(f);
    }
  } catch (const VmError& e) {
    out.error = error_kind_name(e.kind());
  }
  out.delta = rt.counters - before;
  return out;
}

bool has_call(const Method& m) {
  for (const Instruction& i : m.code) {
    if (is_call(i.op)) return true;
  }
  return false;
}

const char* kBranchy =
    ".method main 0 1\n  CONST_INT 0\n  CALL pick 1\n  RET\n.end\n"
    ".method pick 1 1\n  LOAD_LOCAL 0\n  JUMP_IF_TRUE yes\n  CONST_INT 0\n  RET\nyes:\n  CONST_INT 1\n  RET\n.end\n"
    ".method pick_false 1 1\n  LOAD_LOCAL 0\n  JUMP_IF_FALSE no\n  CONST_INT 1\n  RET\nno:\n  CONST_INT 0\n  RET\n.end\n";

}  // namespace

TEST_CASE("strange_add compiles to two segments") {
  const Program p = load_program("programs/corpus/strange_add.tvm");
  Runtime rt(p, options_for(ExecMode::Tier1Only));
  const ThreadedCode* code = rt.compile_tier1(*p.find("strange_add"));
  REQUIRE(code != nullptr);
  REQUIRE(code->segments.size() == 2);
  using K = EntryKind;
  CHECK(entry_kinds(code->segments[code->entry]) ==
        std::vector<K>{K::Invoke, K::Invoke, K::Invoke, K::Branch, K::Invoke, K::Invoke, K::Invoke, K::Return});
  CHECK(entry_kinds(code->segments[1 - code->entry]) == std::vector<K>{K::Invoke, K::Invoke, K::Invoke, K::Return});
  CHECK(code->segment_names[code->segments[code->entry][3].target] == "L1");
}

TEST_CASE("call sites get empty cache slots") {
  const Program p = load_program("programs/corpus/strange_add.tvm");
  Runtime rt(p, options_for(ExecMode::Tier1Only));
  const ThreadedCode* code = rt.compile_tier1(*p.find("calc"));
  REQUIRE(code != nullptr);
  std::size_t cached = 0;
  for (const auto& seg : code->segments) {
    for (const ThreadedEntry& e : seg) {
      if (e.kind != EntryKind::CachedCall) continue;
      ++cached;
      REQUIRE(e.cache != nullptr);
      CHECK(e.cache->state == InlineCacheSlot::State::Empty);
      CHECK(e.cache->hits == 0);
      CHECK(e.inst->op == Opcode::Call);
    }
  }
  CHECK(cached == 1);
  CHECK(code->cache_sites.size() == 1);
}

TEST_CASE("no-branch method compiles to one Invoke per op") {
  const Program p = parse(".method main 0 1\n  CONST_INT 4\n  DUP\n  MUL\n  STORE_LOCAL 0\n  LOAD_LOCAL 0\n  RET\n.end\n");
  Runtime rt(p, options_for(ExecMode::Tier1Only));
  const ThreadedCode* code = rt.compile_tier1(0);
  REQUIRE(code->segments.size() == 1);
  REQUIRE(code->segments[0].size() == 6);
  for (std::size_t i = 0; i < 5; ++i) CHECK(code->segments[0][i].kind == EntryKind::Invoke);
  CHECK(code->segments[0][5].kind == EntryKind::Return);
}

TEST_CASE("strange_add through threaded code") {
  const Program p = load_program("programs/corpus/strange_add.tvm");
  Runtime rt(p, options_for(ExecMode::Tier1Only));
  rt.begin_run();
  const MethodId id = *p.find("strange_add");
  for (auto [a, expected] : {std::pair{84, 10084}, std::pair{1, -41}}) {
    const Invocation interp = invoke(rt, id, {Value::integer(a), Value::integer(10000)}, false);
    const Invocation threaded = invoke(rt, id, {Value::integer(a), Value::integer(10000)}, true);
    CHECK(threaded.result == Value::integer(expected));
    CHECK(interp.result == threaded.result);
    CHECK(threaded.delta.dispatches == 0);
    CHECK(threaded.delta.handler_calls == interp.delta.handler_calls);
  }
}

TEST_CASE("strange_sum_arr side effect happens at execution") {
  const Program p = load_program("programs/corpus/strange_sum_arr.tvm");
  Runtime rt(p, options_for(ExecMode::Tier1Only));
  rt.begin_run();
  const MethodId id = *p.find("strange_sum_arr");
  const ArrayId arr = rt.heap.allocate(30, 1);
  REQUIRE(rt.compile_tier1(id) != nullptr);
  CHECK(rt.heap.at(arr) == std::vector<std::int64_t>(30, 1));
  const Invocation r = invoke(rt, id, {Value::array(arr), Value::integer(1), Value::integer(0)}, true);
  CHECK(r.result == Value::integer(30));
  CHECK(rt.heap.at(arr) == std::vector<std::int64_t>(30, 0));
  CHECK(r.delta.dispatches == 0);
}

TEST_CASE("dispatch elimination on call-free methods") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Program p = parse(random_program(seed));
    for (MethodId id = 0; id < p.methods.size(); ++id) {
      const Method& m = p.method(id);
      if (m.arg_count != 3 || has_call(m)) continue;
      const std::vector<Value> args = {Value::array(0), Value::integer(static_cast<std::int64_t>(seed) * 37 % 1000),
                                       Value::integer(static_cast<std::int64_t>(seed) * 11 % 997)};
      Runtime a(p, options_for(ExecMode::Tier1Only));
      Runtime b(p, options_for(ExecMode::Tier1Only));
      a.begin_run();
      b.begin_run();
      a.heap.allocate(5, 2);
      b.heap.allocate(5, 2);
      const Invocation interp = invoke(a, id, args, false);
      const Invocation threaded = invoke(b, id, args, true);
      INFO("seed " << seed << " method " << m.name);
      CHECK(interp.error.empty());
      CHECK(threaded.result == interp.result);
      CHECK(a.heap == b.heap);
      CHECK(a.output == b.output);
      CHECK(threaded.delta.dispatches == 0);
      CHECK(threaded.delta.handler_calls == interp.delta.handler_calls);
      ++checked;
    }
  }
  CHECK(checked >= 50);
}

TEST_CASE("whole programs run entirely threaded with threshold 1") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Program p = parse(random_program(seed));
    const RunResult interp = run_mode(p, ExecMode::InterpOnly);
    const RunResult threaded = run_mode(p, ExecMode::Tier1Only, 1);
    INFO("seed " << seed);
    CHECK(threaded.counters.dispatches == 0);
    CHECK(threaded.counters.handler_calls == interp.counters.handler_calls);
    CHECK(observe(threaded, p) == observe(interp, p));
  }
}

TEST_CASE("branch entries follow the conditional jump") {
  const Program p = parse(kBranchy);
  std::mt19937_64 rng(5);
  for (const char* name : {"pick", "pick_false"}) {
    Runtime rt(p, options_for(ExecMode::Tier1Only));
    rt.begin_run();
    const ArrayId arr = rt.heap.allocate(1);
    const MethodId id = *p.find(name);
    std::vector<Value> values = {Value::integer(0), Value::integer(-1), Value::integer(INT64_MIN),
                                 Value::boolean(true), Value::boolean(false), Value::nil(), Value::array(arr),
                                 Value::method(id)};
    for (int i = 0; i < 200; ++i) values.push_back(Value::integer(static_cast<std::int64_t>(rng() % 7) - 3));
    for (const Value& v : values) {
      const Invocation interp = invoke(rt, id, {v}, false);
      const Invocation threaded = invoke(rt, id, {v}, true);
      CHECK(threaded.result == interp.result);
      CHECK(threaded.error == interp.error);
    }
  }
}

TEST_CASE("back-edge probe raises on the 1000th execution") {
  const Program p = parse(
      ".method main 0 0\n  CONST_INT 5000\n  CALL spin 1\n  RET\n.end\n"
      ".method spin 1 1\ntop:\n  LOAD_LOCAL 0\n  JUMP_IF_FALSE out\n"
      "  LOAD_LOCAL 0\n  CONST_INT 1\n  SUB\n  STORE_LOCAL 0\n  JUMP_BACKWARD top\nout:\n  CONST_INT 0\n  RET\n.end\n");
  Runtime rt(p, options_for(ExecMode::TwoLevel));
  rt.begin_run();
  const MethodId id = *p.find("spin");
  const ThreadedCode* code = rt.compile_tier1(id);
  REQUIRE(code != nullptr);
  Frame f(p.method(id), id);
  f.locals[0] = Value::integer(5000);
  bool raised = false;
  std::size_t pc = 0;
  try {
    rt.execute_threaded(*code, f);
  } catch (const TierTransition& t) {
    raised = true;
    REQUIRE(t.frames.size() == 1);
    CHECK(t.frames[0].locals[0] == Value::integer(4000));
    pc = t.frames[0].pc;
    CHECK(p.method(id).code[pc].op == Opcode::JumpBackward);
  }
  CHECK(raised);
  CHECK(rt.profile.backedge_count(id, pc) == 1000);
}
