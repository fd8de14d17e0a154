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
#include <stdexcept>
#include <string>

namespace tvm {

/// Raised by the assembler for malformed text.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ErrorKind {
  TypeError,
  IndexOutOfBounds,
  Overflow,
  DivisionByZero,
  StackOverflow,
  InvalidArgument,
};

const char* error_kind_name(ErrorKind kind);

/// Which execution engine was running when a runtime error surfaced.
enum class Tier { Interpreter, Threaded, Heavy, Trace };

const char* tier_name(Tier tier);

/// A guest-program runtime error. Location fields are filled in by the
/// innermost dispatch loop that sees the error.
class VmError : public std::runtime_error {
 public:
  VmError(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  bool located() const { return located_; }
  const std::string& method() const { return method_; }
  std::size_t pc() const { return pc_; }
  Tier tier() const { return tier_; }

  void locate(const std::string& method, std::size_t pc, Tier tier) {
    if (located_) return;
    located_ = true;
    method_ = method;
    pc_ = pc;
    tier_ = tier;
  }

 private:
  ErrorKind kind_;
  bool located_ = false;
  std::string method_;
  std::size_t pc_ = 0;
  Tier tier_ = Tier::Interpreter;
};

/// Broken VM invariant; never caused by guest programs.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace tvm
