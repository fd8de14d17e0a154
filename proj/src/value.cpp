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

#include "tvm/value.hpp"

#include "tvm/errors.hpp"

namespace tvm {

const char* tag_name(ValueTag tag) {
  switch (tag) {
    case ValueTag::Int: return "Int";
    case ValueTag::Bool: return "Bool";
    case ValueTag::Nil: return "Nil";
    case ValueTag::Array: return "Array";
    case ValueTag::Method: return "Method";
  }
  return "?";
}

std::string to_string(const Value& v) {
  switch (v.tag()) {
    case ValueTag::Int: return std::to_string(v.as_int());
    case ValueTag::Bool: return v.as_bool() ? "true" : "false";
    case ValueTag::Nil: return "nil";
    case ValueTag::Array: return "<array #" + std::to_string(v.as_array()) + ">";
    case ValueTag::Method: return "<method #" + std::to_string(v.as_method()) + ">";
  }
  return "?";
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::StackOverflow: return "StackOverflow";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "?";
}

const char* tier_name(Tier tier) {
  switch (tier) {
    case Tier::Interpreter: return "interpreter";
    case Tier::Threaded: return "threaded";
    case Tier::Heavy: return "heavyweight";
    case Tier::Trace: return "trace";
  }
  return "?";
}

}  // namespace tvm
