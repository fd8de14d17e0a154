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

#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tvm/assembler.hpp"
#include "tvm/workload.hpp"

#ifndef TVM_SOURCE_DIR
#define TVM_SOURCE_DIR "."
#endif

namespace tvm::testing {

std::string source_path(const std::string& rel) { return std::string(TVM_SOURCE_DIR) + "/" + rel; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program load_program(const std::string& rel) { return parse_assembly(read_file(source_path(rel))); }

Program parse(const std::string& text) { return parse_assembly(text); }

std::vector<std::string> program_files(const std::string& rel_dir) {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(source_path(rel_dir))) {
    if (e.path().extension() == ".tvm") out.push_back(rel_dir + "/" + e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

VmOptions options_for(ExecMode mode, std::uint64_t t1, std::uint64_t t2) {
  VmOptions o;
  o.mode = mode;
  o.thresholds.t1_method_threshold = t1;
  o.thresholds.t2_backedge_threshold = t2;
  return o;
}

RunResult run_mode(const Program& p, ExecMode mode, std::uint64_t t1, std::uint64_t t2) {
  Vm vm(p, options_for(mode, t1, t2));
  return vm.run();
}

Observation observe(const RunResult& r, const Program& p) {
  Observation o;
  o.halted = r.halted;
  if (r.error) {
    o.error = std::string(error_kind_name(r.error->kind)) + " in " + r.error->method + " at pc " +
              std::to_string(r.error->pc) + ": " + r.error->message;
  } else if (!r.halted) {
    o.value = format_value(r.value, p);
  }
  o.output = r.output;
  o.heap = r.heap;
  return o;
}

std::string describe(const Observation& o) {
  std::ostringstream ss;
  ss << "value=" << o.value << " halted=" << o.halted << " error=" << o.error << " output=" << o.output.size()
     << "B heap=" << o.heap.size();
  return ss.str();
}

namespace {

constexpr std::int64_t kModulus = 1000003;
constexpr int kTemps = 6;
constexpr int kCounterBase = 7;
constexpr int kLocals = 9;

class Generator {
 public:
  Generator(std::uint64_t seed, bool side_effects) : rng_(seed), side_effects_(side_effects) {}

  std::string program() {
    const int helpers = 1 + pick(4);
    std::ostringstream out;
    for (int h = 0; h < helpers; ++h) {
      method_ = h;
      body_.str("");
      cost_ = 1;
      body_ << ".method h" << h << " 3 " << kLocals << "\n";
      for (int t = 3; t <= kTemps; ++t) line("CONST_INT 0", "STORE_LOCAL " + std::to_string(t));
      statements(0, 2 + pick(4));
      expr(2);
      line("RET");
      body_ << ".end\n";
      costs_.push_back(cost_);
      out << body_.str();
    }
    method_ = helpers;
    body_.str("");
    cost_ = 1;
    body_ << ".method main 0 " << kLocals << "\n";
    line("CONST_INT " + std::to_string(1 + pick(10)), "ARRAY_NEW", "ARRAY_FILL " + std::to_string(pick(50)),
         "STORE_LOCAL 0");
    for (int t = 1; t <= kTemps; ++t) line("CONST_INT " + std::to_string(pick(1000)), "STORE_LOCAL " + std::to_string(t));
    statements(0, 3 + pick(5));
    for (int t = 1; t <= 2; ++t) line("LOAD_LOCAL " + std::to_string(t), "PRINT");
    expr(2);
    line("RET");
    body_ << ".end\n";
    out << body_.str();
    return out.str();
  }

 private:
  int pick(int n) { return static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(n))); }

  template <typename... S>
  void line(const S&... s) {
    ((body_ << "  " << s << "\n"), ...);
  }

  std::string label() { return "L" + std::to_string(labels_++); }

  int temp() { return 1 + pick(kTemps); }

  void leaf() {
    switch (pick(4)) {
      case 0:
        line("CONST_INT " + std::to_string(pick(1000)));
        break;
      case 1:
        line("LOAD_LOCAL 0");
        index(0);
        line("ARRAY_AT");
        break;
      default:
        line("LOAD_LOCAL " + std::to_string(temp()));
    }
  }

  void expr(int depth) {
    if (depth == 0 || pick(3) == 0) {
      leaf();
      return;
    }
    expr(depth - 1);
    expr(depth - 1);
    static const char* const ops[] = {"ADD", "SUB", "MUL"};
    line(ops[pick(3)], "CONST_INT " + std::to_string(kModulus), "MOD");
  }

  void index(int depth) {
    expr(depth);
    line("LOAD_LOCAL 0", "ARRAY_LEN", "MOD", "CONST_INT 1", "ADD");
  }

  void condition() {
    if (pick(4) == 0) {
      expr(1);
      return;
    }
    expr(1);
    expr(1);
    static const char* const ops[] = {"LT", "LE", "EQ"};
    line(ops[pick(3)]);
  }

  void call_args() {
    line("LOAD_LOCAL 0");
    expr(1);
    expr(1);
  }

  // Cost estimate keeps run time bounded: a statement costs its own work plus
  // any callee cost, loops multiply.
  void statements(int loop_depth, int count) {
    for (int i = 0; i < count; ++i) statement(loop_depth);
  }

  void statement(int loop_depth) {
    const int kind = pick(side_effects_ ? 11 : 8);
    switch (kind) {
      case 0:
      case 1:
        expr(2);
        line("STORE_LOCAL " + std::to_string(temp()));
        cost_ += 1;
        break;
      case 2: {
        const std::string other = label();
        const std::string end = label();
        condition();
        line("JUMP_IF_FALSE " + other);
        statements(loop_depth, 1 + pick(2));
        line("JUMP " + end);
        body_ << other << ":\n";
        statements(loop_depth, pick(2));
        body_ << end << ":\n";
        break;
      }
      case 3: {
        if (loop_depth >= 2) break;
        const bool main = method_ == static_cast<int>(costs_.size());
        const int n = main && loop_depth == 0 ? pick(60) : pick(7);
        const int slot = kCounterBase + loop_depth;
        const std::string top = label();
        const std::string end = label();
        line("CONST_INT " + std::to_string(n), "STORE_LOCAL " + std::to_string(slot));
        body_ << top << ":\n";
        line("LOAD_LOCAL " + std::to_string(slot), "JUMP_IF_FALSE " + end);
        const std::uint64_t before = cost_;
        cost_ = 1;
        statements(loop_depth + 1, 1 + pick(3));
        const std::uint64_t inner = cost_;
        cost_ = before + inner * static_cast<std::uint64_t>(std::max(n, 1));
        line("LOAD_LOCAL " + std::to_string(slot), "CONST_INT 1", "SUB", "STORE_LOCAL " + std::to_string(slot));
        line("JUMP_BACKWARD " + top);
        body_ << end << ":\n";
        break;
      }
      case 4:
        expr(1);
        line("PRINT");
        cost_ += 1;
        break;
      case 5:
      case 6: {
        if (method_ == 0) break;
        const int callee = affordable(pick(method_));
        if (callee < 0) break;
        call_args();
        line("CALL h" + std::to_string(callee) + " 3", "STORE_LOCAL " + std::to_string(temp()));
        cost_ += costs_[callee];
        break;
      }
      case 7: {
        if (method_ == 0) break;
        const int a = affordable(pick(method_));
        const int b = affordable(pick(method_));
        if (a < 0 || b < 0) break;
        const std::string other = label();
        const std::string end = label();
        condition();
        line("JUMP_IF_FALSE " + other, "CONST_METHOD h" + std::to_string(a), "JUMP " + end);
        body_ << other << ":\n";
        line("CONST_METHOD h" + std::to_string(b));
        body_ << end << ":\n";
        call_args();
        line("CALL_VALUE 3", "STORE_LOCAL " + std::to_string(temp()));
        cost_ += std::max(costs_[a], costs_[b]);
        break;
      }
      case 8:
      case 9:
        line("LOAD_LOCAL 0");
        index(1);
        expr(1);
        line("ARRAY_AT_PUT");
        cost_ += 1;
        break;
      default:
        line("LOAD_LOCAL 0");
        if (pick(2)) {
          line("ARRAY_FILL " + std::to_string(pick(100)), "POP");
        } else {
          line("ARRAY_CLEAR");
        }
        cost_ += 1;
    }
  }

  // Returns `callee` or a cheaper helper, or -1 when none keeps the method
  // under budget.
  int affordable(int callee) {
    for (int c = callee; c >= 0; --c) {
      if (cost_ + costs_[c] * 64 <= kBudget) return c;
    }
    return -1;
  }

  static constexpr std::uint64_t kBudget = 40000;

  std::mt19937_64 rng_;
  bool side_effects_;
  std::ostringstream body_;
  std::vector<std::uint64_t> costs_;
  std::uint64_t cost_ = 0;
  int method_ = 0;
  int labels_ = 0;
};

}  // namespace

std::string random_program(std::uint64_t seed, bool side_effects) {
  return Generator(seed, side_effects).program();
}

}  // namespace tvm::testing
