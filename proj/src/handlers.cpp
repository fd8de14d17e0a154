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

#include "tvm/handlers.hpp"

#include <algorithm>

#include "tvm/runtime.hpp"

namespace tvm {

namespace {

using Out = HandlerOutcome;

[[noreturn]] void type_error(const char* op, const Value& v) {
  throw VmError(ErrorKind::TypeError, std::string(op) + ": unexpected " + tag_name(v.tag()));
}

ArrayId expect_array(const Value& v, const char* op) {
  if (!v.is_array()) type_error(op, v);
  return v.as_array();
}

Out h_const_int(Frame& f, const Instruction& i, Runtime&) {
  f.push(Value::integer(i.operand));
  return Out::proceed();
}

Out h_const_method(Frame& f, const Instruction& i, Runtime&) {
  f.push(Value::method(i.callee));
  return Out::proceed();
}

Out h_load_local(Frame& f, const Instruction& i, Runtime&) {
  f.push(f.locals[i.target()]);
  return Out::proceed();
}

Out h_store_local(Frame& f, const Instruction& i, Runtime&) {
  f.locals[i.target()] = f.pop();
  return Out::proceed();
}

Out h_dup(Frame& f, const Instruction&, Runtime&) {
  f.push(f.top());
  return Out::proceed();
}

Out h_pop(Frame& f, const Instruction&, Runtime&) {
  f.pop();
  return Out::proceed();
}

template <std::int64_t (*Fn)(std::int64_t, std::int64_t)>
Out arith(Frame& f, const char* name) {
  const std::int64_t b = expect_int(f.stack[f.stack.size() - 1], name);
  const std::int64_t a = expect_int(f.stack[f.stack.size() - 2], name);
  const std::int64_t r = Fn(a, b);
  f.stack.pop_back();
  f.stack.back() = Value::integer(r);
  return Out::proceed();
}

Out h_add(Frame& f, const Instruction&, Runtime&) { return arith<checked_add>(f, "ADD"); }
Out h_sub(Frame& f, const Instruction&, Runtime&) { return arith<checked_sub>(f, "SUB"); }
Out h_mul(Frame& f, const Instruction&, Runtime&) { return arith<checked_mul>(f, "MUL"); }
Out h_mod(Frame& f, const Instruction&, Runtime&) { return arith<floored_mod>(f, "MOD"); }

Out h_le(Frame& f, const Instruction&, Runtime&) {
  const std::int64_t b = expect_int(f.stack[f.stack.size() - 1], "LE");
  const std::int64_t a = expect_int(f.stack[f.stack.size() - 2], "LE");
  f.stack.pop_back();
  f.stack.back() = Value::boolean(a <= b);
  return Out::proceed();
}

Out h_lt(Frame& f, const Instruction&, Runtime&) {
  const std::int64_t b = expect_int(f.stack[f.stack.size() - 1], "LT");
  const std::int64_t a = expect_int(f.stack[f.stack.size() - 2], "LT");
  f.stack.pop_back();
  f.stack.back() = Value::boolean(a < b);
  return Out::proceed();
}

Out h_eq(Frame& f, const Instruction&, Runtime&) {
  const Value b = f.pop();
  f.stack.back() = Value::boolean(f.stack.back() == b);
  return Out::proceed();
}

Out h_jump(Frame&, const Instruction& i, Runtime&) { return Out::jump(i.target()); }

Out h_jump_if_true(Frame& f, const Instruction& i, Runtime&) {
  return truthy(f.pop()) ? Out::jump(i.target()) : Out::proceed();
}

Out h_jump_if_false(Frame& f, const Instruction& i, Runtime&) {
  return truthy(f.pop()) ? Out::proceed() : Out::jump(i.target());
}

Out h_call(Frame& f, const Instruction& i, Runtime& rt) {
  rt.call(f, i);
  return Out::proceed();
}

Out h_ret(Frame& f, const Instruction&, Runtime&) { return Out::ret(f.pop()); }

Out h_array_new(Frame& f, const Instruction&, Runtime& rt) {
  const std::int64_t n = expect_int(f.top(), "ARRAY_NEW");
  if (n < 0) throw VmError(ErrorKind::InvalidArgument, "ARRAY_NEW: negative length " + std::to_string(n));
  f.top() = Value::array(rt.heap.allocate(static_cast<std::size_t>(n)));
  return Out::proceed();
}

Out h_array_at(Frame& f, const Instruction&, Runtime& rt) {
  const std::int64_t idx = expect_int(f.stack[f.stack.size() - 1], "ARRAY_AT");
  const auto& arr = rt.heap.at(expect_array(f.stack[f.stack.size() - 2], "ARRAY_AT"));
  const Value v = Value::integer(arr[checked_index(arr, idx)]);
  f.stack.pop_back();
  f.stack.back() = v;
  return Out::proceed();
}

Out h_array_at_put(Frame& f, const Instruction&, Runtime& rt) {
  const std::size_t n = f.stack.size();
  const std::int64_t v = expect_int(f.stack[n - 1], "ARRAY_AT_PUT");
  const std::int64_t idx = expect_int(f.stack[n - 2], "ARRAY_AT_PUT");
  auto& arr = rt.heap.at(expect_array(f.stack[n - 3], "ARRAY_AT_PUT"));
  arr[checked_index(arr, idx)] = v;
  f.stack.resize(n - 3);
  return Out::proceed();
}

Out h_array_len(Frame& f, const Instruction&, Runtime& rt) {
  const auto& arr = rt.heap.at(expect_array(f.top(), "ARRAY_LEN"));
  f.top() = Value::integer(static_cast<std::int64_t>(arr.size()));
  return Out::proceed();
}

Out h_array_fill(Frame& f, const Instruction& i, Runtime& rt) {
  auto& arr = rt.heap.at(expect_array(f.top(), "ARRAY_FILL"));
  std::fill(arr.begin(), arr.end(), i.operand);
  return Out::proceed();
}

Out h_array_clear(Frame& f, const Instruction&, Runtime& rt) {
  auto& arr = rt.heap.at(expect_array(f.top(), "ARRAY_CLEAR"));
  std::fill(arr.begin(), arr.end(), 0);
  f.stack.pop_back();
  return Out::proceed();
}

Out h_print(Frame& f, const Instruction&, Runtime& rt) {
  rt.output += to_string(f.pop());
  rt.output += '\n';
  return Out::proceed();
}

Out h_halt(Frame&, const Instruction&, Runtime&) { throw ProgramHalt{}; }

std::array<Handler, kOpcodeCount> build_table() {
  std::array<Handler, kOpcodeCount> t{};
  auto set = [&](Opcode op, Handler h) { t[static_cast<std::size_t>(op)] = h; };
  set(Opcode::ConstInt, h_const_int);
  set(Opcode::LoadLocal, h_load_local);
  set(Opcode::StoreLocal, h_store_local);
  set(Opcode::Dup, h_dup);
  set(Opcode::Pop, h_pop);
  set(Opcode::Add, h_add);
  set(Opcode::Sub, h_sub);
  set(Opcode::Mul, h_mul);
  set(Opcode::Mod, h_mod);
  set(Opcode::Le, h_le);
  set(Opcode::Lt, h_lt);
  set(Opcode::Eq, h_eq);
  set(Opcode::Jump, h_jump);
  set(Opcode::JumpIfTrue, h_jump_if_true);
  set(Opcode::JumpIfFalse, h_jump_if_false);
  set(Opcode::JumpBackward, h_jump);
  set(Opcode::Call, h_call);
  set(Opcode::Ret, h_ret);
  set(Opcode::ArrayNew, h_array_new);
  set(Opcode::ArrayAt, h_array_at);
  set(Opcode::ArrayAtPut, h_array_at_put);
  set(Opcode::ArrayLen, h_array_len);
  set(Opcode::ArrayFill, h_array_fill);
  set(Opcode::ArrayClear, h_array_clear);
  set(Opcode::Print, h_print);
  set(Opcode::Halt, h_halt);
  set(Opcode::ConstMethod, h_const_method);
  set(Opcode::CallValue, h_call);
  return t;
}

}  // namespace

const std::array<Handler, kOpcodeCount>& handler_table() {
  static const auto table = build_table();
  return table;
}

bool truthy(const Value& v) {
  switch (v.tag()) {
    case ValueTag::Int:
    case ValueTag::Bool:
      return v.as_int() != 0;
    case ValueTag::Nil:
      return false;
    default:
      type_error("condition", v);
  }
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw VmError(ErrorKind::Overflow, "integer overflow in ADD");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw VmError(ErrorKind::Overflow, "integer overflow in SUB");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw VmError(ErrorKind::Overflow, "integer overflow in MUL");
  return r;
}

std::int64_t floored_mod(std::int64_t a, std::int64_t b) {
  if (b == 0) throw VmError(ErrorKind::DivisionByZero, "modulo by zero");
  if (b == -1) return 0;
  std::int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

std::int64_t expect_int(const Value& v, const char* what) {
  if (!v.is_int()) type_error(what, v);
  return v.as_int();
}

std::size_t checked_index(const std::vector<std::int64_t>& arr, std::int64_t index) {
  if (index < 1 || static_cast<std::uint64_t>(index) > arr.size()) {
    throw VmError(ErrorKind::IndexOutOfBounds, "index " + std::to_string(index) + " outside 1.." +
                                                   std::to_string(arr.size()));
  }
  return static_cast<std::size_t>(index - 1);
}

}  // namespace tvm
