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

#include <cstdint>
#include <string>

namespace tvm {

using MethodId = std::uint32_t;
using ArrayId = std::uint32_t;

inline constexpr MethodId kNoMethod = 0xffffffffu;

enum class ValueTag : std::uint8_t { Int, Bool, Nil, Array, Method };

const char* tag_name(ValueTag tag);

/// Tagged dynamic value. Arrays and methods are referenced by handle; the
/// payload of an Array value indexes the run's Heap, the payload of a Method
/// value indexes Program::methods.
class Value {
 public:
  constexpr Value() = default;

  static constexpr Value integer(std::int64_t v) { return Value(ValueTag::Int, v); }
  static constexpr Value boolean(bool b) { return Value(ValueTag::Bool, b ? 1 : 0); }
  static constexpr Value nil() { return Value(); }
  static constexpr Value array(ArrayId id) { return Value(ValueTag::Array, id); }
  static constexpr Value method(MethodId id) { return Value(ValueTag::Method, id); }

  constexpr ValueTag tag() const { return tag_; }
  constexpr bool is_int() const { return tag_ == ValueTag::Int; }
  constexpr bool is_bool() const { return tag_ == ValueTag::Bool; }
  constexpr bool is_nil() const { return tag_ == ValueTag::Nil; }
  constexpr bool is_array() const { return tag_ == ValueTag::Array; }
  constexpr bool is_method() const { return tag_ == ValueTag::Method; }

  constexpr std::int64_t as_int() const { return bits_; }
  constexpr bool as_bool() const { return bits_ != 0; }
  constexpr ArrayId as_array() const { return static_cast<ArrayId>(bits_); }
  constexpr MethodId as_method() const { return static_cast<MethodId>(bits_); }

  friend constexpr bool operator==(const Value& a, const Value& b) {
    return a.tag_ == b.tag_ && a.bits_ == b.bits_;
  }

 private:
  constexpr Value(ValueTag tag, std::int64_t bits) : tag_(tag), bits_(bits) {}

  ValueTag tag_ = ValueTag::Nil;
  std::int64_t bits_ = 0;
};

/// Printable form used by PRINT. Method values print by id because values do
/// not carry a program reference.
std::string to_string(const Value& v);

}  // namespace tvm
