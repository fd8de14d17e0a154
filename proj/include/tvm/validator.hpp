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
#include <utility>
#include <vector>

#include "tvm/bytecode.hpp"

namespace tvm {

struct MethodReport {
  std::string name;
  std::uint32_t max_stack = 0;
  std::vector<std::int32_t> stack_depth;
};

struct ValidationReport {
  std::vector<MethodReport> methods;
};

/// Operand-stack effect of an instruction as (pops, pushes).
std::pair<std::uint32_t, std::uint32_t> stack_effect(const Instruction& inst);

/// Links and checks a program, recording max_stack and the per-pc stack depth
/// map in each method. Throws ValidationError on the first problem found.
ValidationReport validate(Program& program);

}  // namespace tvm
