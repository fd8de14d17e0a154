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

#include <string>
#include <string_view>

#include "tvm/bytecode.hpp"

namespace tvm {

struct ParseOptions {
  /// Rewrite `JUMP L` whose label precedes the jump into JUMP_BACKWARD.
  /// When off, such jumps are rejected.
  bool rewrite_backward_jumps = true;
  /// Run the validator on the parsed program.
  bool validate = true;
};

/// Parses the line-oriented `.tvm` assembly format:
///
///   # comment
///   .entry run
///   .method strange_add 2 2
///     LOAD_LOCAL 0
///     CONST_INT 42
///     MOD
///     JUMP_IF_TRUE L1
///     ...
///   L1:
///     ...
///   .end
///
/// `.entry` is optional and defaults to `main`. Labels are local to a method.
Program parse_assembly(std::string_view text, const ParseOptions& options = {});

/// Inverse of parse_assembly on validated programs. Jump targets are printed
/// as synthetic labels `L<pc>`.
std::string disassemble(const Program& program);

}  // namespace tvm
