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

#include "tvm/loop_trace.hpp"
#include "tvm/workload.hpp"

using namespace tvm;
using namespace tvm::testing;

namespace {

// A single loop in `spin` running `n` back edges.
std::string spin_program(std::int64_t n) {
  return ".method main 0 0\n  CONST_INT " + std::to_string(n) + "\n  CALL spin 1\n  RET\n.end\n"
         ".method spin 1 2\n  CONST_INT 0\n  STORE_LOCAL 1\ntop:\n  LOAD_LOCAL 0\n  JUMP_IF_FALSE out\n"
         "  LOAD_LOCAL 1\n  LOAD_LOCAL 0\n  ADD\n  STORE_LOCAL 1\n"
         "  LOAD_LOCAL 0\n  CONST_INT 1\n  SUB\n  STORE_LOCAL 0\n  JUMP_BACKWARD top\nout:\n  LOAD_LOCAL 1\n  RET\n.end\n";
}

std::size_t backedge_pc(const Program& p, const std::string& method) {
  const Method& m = p.method(*p.find(method));
  for (std::size_t pc = 0; pc < m.code.size(); ++pc) {
    if (m.code[pc].op == Opcode::JumpBackward) return pc;
  }
  FAIL("no back edge");
  return 0;
}

struct Traced {
  RunResult result;
  std::vector<TransitionRecord> transitions;
  std::size_t loops = 0;
  std::size_t threaded = 0;
};

Traced run_recorded(const Program& p, ExecMode mode, std::uint64_t t2 = 1000) {
  VmOptions o = options_for(mode, 10, t2);
  o.record_transitions = true;
  Vm vm(p, o);
  Traced t;
  t.result = vm.run();
  t.transitions = vm.runtime().transitions;
  t.loops = vm.runtime().cache.loops.size();
  t.threaded = vm.runtime().cache.threaded_count();
  return t;
}

}  // namespace

TEST_CASE("thresholds") {
  Thresholds t;
  CHECK(t.active_t2(ExecMode::TwoLevel) == 1000);
  CHECK(t.active_t2(ExecMode::Tier2Only) == 1000);
  CHECK(t.active_t2(ExecMode::Tier2HighThreshold) == 3000);
  t.t1_method_threshold = 0;
  CHECK_THROWS(t.check());
  for (ExecMode m : kAllModes) CHECK(mode_from_name(mode_name(m)) == m);
  CHECK_FALSE(mode_from_name("jit").has_value());
}

TEST_CASE("transition fires on the 1000th back edge, once") {
  const Program p = parse(spin_program(5000));
  const Traced t = run_recorded(p, ExecMode::TwoLevel);
  REQUIRE(t.transitions.size() == 1);
  const TransitionRecord& r = t.transitions[0];
  CHECK(r.count == 1000);
  CHECK(r.anchor == CodeKey{*p.find("spin"), backedge_pc(p, "spin")});
  CHECK(r.raised.locals[0] == Value::integer(4000));
  CHECK(t.result.value == run_mode(p, ExecMode::InterpOnly).value);
}

TEST_CASE("999 back edges do not transition") {
  const Traced t = run_recorded(parse(spin_program(999)), ExecMode::TwoLevel);
  CHECK(t.transitions.empty());
  CHECK(t.loops == 0);
  const Traced u = run_recorded(parse(spin_program(1000)), ExecMode::TwoLevel);
  CHECK(u.transitions.size() == 1);
}

TEST_CASE("tripled threshold transitions on the 3000th back edge") {
  const Traced t = run_recorded(parse(spin_program(5000)), ExecMode::TwoLevel, 3000);
  REQUIRE(t.transitions.size() == 1);
  CHECK(t.transitions[0].count == 3000);
  CHECK(run_recorded(parse(spin_program(2999)), ExecMode::TwoLevel, 3000).transitions.empty());
}

TEST_CASE("tier2 modes start recording at their threshold") {
  // Recording starts at the back edge that reaches the threshold and needs
  // one more iteration to close the loop.
  CHECK(run_recorded(parse(spin_program(1000)), ExecMode::Tier2Only).loops == 0);
  CHECK(run_recorded(parse(spin_program(1001)), ExecMode::Tier2Only).loops == 1);
  CHECK(run_recorded(parse(spin_program(3000)), ExecMode::Tier2HighThreshold).loops == 0);
  CHECK(run_recorded(parse(spin_program(3001)), ExecMode::Tier2HighThreshold).loops == 1);
}

TEST_CASE("transition preserves the frame") {
  for (const std::string& f : {"programs/corpus/strange_add.tvm", "programs/corpus/nested_loops.tvm",
                               "programs/corpus/stack_carried.tvm", "programs/corpus/deep_calls.tvm"}) {
    const Program p = load_program(f);
    const Traced t = run_recorded(p, ExecMode::TwoLevel);
    INFO(f);
    REQUIRE(t.transitions.size() == 1);
    const TransitionRecord& r = t.transitions[0];
    CHECK(r.raised == r.resumed);
    CHECK(r.resumed.method != nullptr);
    CHECK(observe(t.result, p) == observe(run_mode(p, ExecMode::InterpOnly), p));
  }
}

TEST_CASE("an anchor transitions once even after guard exits") {
  const Program p = load_program("programs/corpus/phase_change.tvm");
  VmOptions o = options_for(ExecMode::TwoLevel);
  o.record_transitions = true;
  Vm vm(p, o);
  const RunResult r = vm.run();
  CHECK(vm.runtime().transitions.size() == 1);
  CHECK(vm.runtime().profile.transitions_fired.size() == 1);
  std::uint64_t exits = 0;
  for (const auto& [key, loop] : vm.runtime().cache.loops) {
    for (const ExitDescriptor& e : loop->exits) exits += e.exit_count;
  }
  CHECK(exits > 1);
  CHECK(observe(r, p) == observe(run_mode(p, ExecMode::InterpOnly), p));
}

TEST_CASE("example program tiers") {
  const Program p = load_program("programs/corpus/strange_add.tvm");
  const Value expected = run_mode(p, ExecMode::InterpOnly).value;

  Vm two(p, options_for(ExecMode::TwoLevel));
  CHECK(two.run().value == expected);
  CHECK(two.runtime().cache.threaded_for(*p.find("strange_add")) != nullptr);
  CHECK(two.runtime().cache.loops.size() == 1);
  CHECK(two.runtime().heavy_phase);

  const Traced t2 = run_recorded(p, ExecMode::Tier2Only);
  CHECK(t2.result.value == expected);
  CHECK(t2.loops == 1);
  CHECK(t2.threaded == 0);
  CHECK(t2.transitions.empty());

  const Traced t1 = run_recorded(p, ExecMode::Tier1Only);
  CHECK(t1.loops == 0);
  CHECK(t1.threaded >= 1);
  const Traced in = run_recorded(p, ExecMode::InterpOnly);
  CHECK(in.loops == 0);
  CHECK(in.threaded == 0);
}

TEST_CASE("heavy phase persists across runs") {
  const Program p = load_program("programs/corpus/strange_add.tvm");
  Vm vm(p, options_for(ExecMode::TwoLevel));
  const RunResult a = vm.run();
  CHECK(vm.runtime().heavy_phase);
  const RunResult b = vm.run();
  CHECK(vm.runtime().heavy_phase);
  CHECK(a.value == b.value);
  CHECK(b.counters.dispatches < a.counters.dispatches);
}

TEST_CASE("tier-1 share of traces on the synthesized suite") {
  const std::string manifest = source_path("suites/variant_01.json");
  SuiteSpec suite = suite_from_json(nlohmann::json::parse(read_file(manifest)));
  for (SuiteEntry& e : suite.subprograms) e.file = source_path(e.file);
  Vm vm(build_suite_program(suite), options_for(ExecMode::TwoLevel));
  const RunResult r = vm.run();
  REQUIRE_FALSE(r.error.has_value());
  const TraceStats& s = vm.runtime().trace_stats;
  const double share = static_cast<double>(s.tier1_count) / static_cast<double>(s.tier1_count + s.tier2_count);
  MESSAGE("tier1 " << s.tier1_count << " tier2 " << s.tier2_count << " share " << share);
  CHECK(share > 0.0);
  CHECK(share < 0.5);
}
