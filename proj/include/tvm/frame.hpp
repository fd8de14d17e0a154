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
#include <vector>

#include "tvm/bytecode.hpp"
#include "tvm/errors.hpp"
#include "tvm/value.hpp"

namespace tvm {

/// Integer arrays allocated during one program run. Handles stay valid for the
/// whole run.
class Heap {
 public:
  ArrayId allocate(std::size_t length, std::int64_t fill = 0) {
    arrays_.emplace_back(length, fill);
    return static_cast<ArrayId>(arrays_.size() - 1);
  }
  std::vector<std::int64_t>& at(ArrayId id) { return arrays_[id]; }
  const std::vector<std::int64_t>& at(ArrayId id) const { return arrays_[id]; }
  std::size_t size() const { return arrays_.size(); }
  void clear() { arrays_.clear(); }

  const std::vector<std::vector<std::int64_t>>& arrays() const { return arrays_; }
  friend bool operator==(const Heap&, const Heap&) = default;

 private:
  std::vector<std::vector<std::int64_t>> arrays_;
};

/// Activation record. `(method code, pc)` are constant along a trace; the rest
/// of the frame is the varying state the compiled tiers read and write.
struct Frame {
  Frame() = default;
  Frame(const Method& m, MethodId id) : method(&m), method_id(id), locals(m.num_locals) {
    stack.reserve(m.max_stack);
  }

  const Method* method = nullptr;
  MethodId method_id = kNoMethod;
  std::size_t pc = 0;
  std::vector<Value> locals;
  std::vector<Value> stack;
  /// Owned by the heavyweight tier (tracing interpreter) rather than the
  /// lightweight tier.
  bool heavy = false;

  void push(Value v) { stack.push_back(v); }
  Value pop() {
    if (stack.empty()) throw InternalError("operand stack underflow in " + method->name);
    Value v = stack.back();
    stack.pop_back();
    return v;
  }
  Value& top() { return stack.back(); }
  const Instruction& instruction() const { return method->code[pc]; }

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.method_id == b.method_id && a.pc == b.pc && a.locals == b.locals &&
           a.stack == b.stack;
  }
};

}  // namespace tvm
