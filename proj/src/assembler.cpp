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

#include "tvm/assembler.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "tvm/errors.hpp"
#include "tvm/validator.hpp"

namespace tvm {
namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s[0]);
  if (!(std::isalpha(head) || head == '_')) return false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '_' || c == '.')) return false;
  }
  return true;
}

template <typename T>
T parse_number(std::string_view word, std::size_t line, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc() || ptr != word.data() + word.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(word) + "'");
  }
  return value;
}

struct PendingJump {
  std::size_t index;
  std::string label;
  std::size_t line;
};

class Assembler {
 public:
  explicit Assembler(const ParseOptions& options) : options_(options) {}

  Program run(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      ++line_no;
      handle_line(text.substr(pos, end - pos), line_no);
      pos = end + 1;
    }
    if (in_method_) throw ParseError(line_no, "missing .end for method '" + current_.name + "'");
    program_.link();
    return std::move(program_);
  }

 private:
  void handle_line(std::string_view raw, std::size_t line) {
    auto hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    auto words = split_words(raw);
    if (words.empty()) return;

    if (words[0].front() == '.') {
      directive(words, line);
      return;
    }
    if (!in_method_) throw ParseError(line, "instruction outside of .method");

    // Leading label, optionally followed by an instruction on the same line.
    if (words[0].back() == ':') {
      auto label = words[0].substr(0, words[0].size() - 1);
      if (!is_identifier(label)) throw ParseError(line, "invalid label '" + std::string(label) + "'");
      if (!labels_.emplace(std::string(label), current_.code.size()).second) {
        throw ParseError(line, "duplicate label '" + std::string(label) + "'");
      }
      words.erase(words.begin());
      if (words.empty()) return;
    }
    instruction(words, line);
  }

  void directive(const std::vector<std::string_view>& words, std::size_t line) {
    if (words[0] == ".entry") {
      if (words.size() != 2 || !is_identifier(words[1])) throw ParseError(line, "expected .entry <name>");
      program_.entry = std::string(words[1]);
    } else if (words[0] == ".method") {
      if (in_method_) throw ParseError(line, "nested .method");
      if (words.size() != 4) throw ParseError(line, "expected .method <name> <arg_count> <num_locals>");
      if (!is_identifier(words[1])) throw ParseError(line, "invalid method name '" + std::string(words[1]) + "'");
      std::string name(words[1]);
      if (!names_.insert(name).second) throw ParseError(line, "duplicate method name '" + name + "'");
      current_ = Method{};
      current_.name = std::move(name);
      current_.arg_count = parse_number<std::uint32_t>(words[2], line, "argument count");
      current_.num_locals = parse_number<std::uint32_t>(words[3], line, "locals count");
      if (current_.num_locals < current_.arg_count) {
        throw ParseError(line, "num_locals must be at least arg_count");
      }
      labels_.clear();
      jumps_.clear();
      in_method_ = true;
    } else if (words[0] == ".end") {
      if (!in_method_) throw ParseError(line, ".end without .method");
      if (words.size() != 1) throw ParseError(line, "unexpected tokens after .end");
      resolve_jumps();
      program_.add_method(std::move(current_));
      in_method_ = false;
    } else {
      throw ParseError(line, "unknown directive '" + std::string(words[0]) + "'");
    }
  }

  void instruction(const std::vector<std::string_view>& words, std::size_t line) {
    auto op = opcode_from_name(words[0]);
    if (!op) throw ParseError(line, "unknown opcode '" + std::string(words[0]) + "'");
    Instruction inst;
    inst.op = *op;
    auto expect = [&](std::size_t n) {
      if (words.size() != n + 1) {
        throw ParseError(line, std::string(opcode_name(*op)) + " expects " + std::to_string(n) +
                                   " operand(s)");
      }
    };
    switch (*op) {
      case Opcode::ConstInt:
      case Opcode::ArrayFill:
        expect(1);
        inst.operand = parse_number<std::int64_t>(words[1], line, "integer");
        break;
      case Opcode::LoadLocal:
      case Opcode::StoreLocal:
        expect(1);
        inst.operand = parse_number<std::uint32_t>(words[1], line, "local index");
        break;
      case Opcode::Jump:
      case Opcode::JumpIfTrue:
      case Opcode::JumpIfFalse:
      case Opcode::JumpBackward:
        expect(1);
        if (!is_identifier(words[1])) throw ParseError(line, "invalid label '" + std::string(words[1]) + "'");
        jumps_.push_back({current_.code.size(), std::string(words[1]), line});
        break;
      case Opcode::Call:
        expect(2);
        if (!is_identifier(words[1])) throw ParseError(line, "invalid method name '" + std::string(words[1]) + "'");
        inst.name = std::string(words[1]);
        inst.argc = parse_number<std::uint32_t>(words[2], line, "argument count");
        break;
      case Opcode::ConstMethod:
        expect(1);
        if (!is_identifier(words[1])) throw ParseError(line, "invalid method name '" + std::string(words[1]) + "'");
        inst.name = std::string(words[1]);
        break;
      case Opcode::CallValue:
        expect(1);
        inst.argc = parse_number<std::uint32_t>(words[1], line, "argument count");
        break;
      default:
        expect(0);
        break;
    }
    current_.code.push_back(std::move(inst));
  }

  void resolve_jumps() {
    for (const auto& j : jumps_) {
      auto it = labels_.find(j.label);
      if (it == labels_.end()) throw ParseError(j.line, "undefined label '" + j.label + "'");
      auto& inst = current_.code[j.index];
      std::size_t target = it->second;
      inst.operand = static_cast<std::int64_t>(target);
      bool backward = target <= j.index;
      if (inst.op == Opcode::JumpBackward) {
        if (!backward) throw ParseError(j.line, "JUMP_BACKWARD must target an earlier instruction");
      } else if (backward) {
        if (inst.op != Opcode::Jump) {
          throw ParseError(j.line, "conditional jumps must be forward; use a forward branch and JUMP_BACKWARD");
        }
        if (!options_.rewrite_backward_jumps) {
          throw ParseError(j.line, "backward JUMP must use JUMP_BACKWARD semantics");
        }
        inst.op = Opcode::JumpBackward;
      }
    }
  }

  ParseOptions options_;
  Program program_;
  Method current_;
  bool in_method_ = false;
  std::set<std::string> names_;
  std::map<std::string, std::size_t> labels_;
  std::vector<PendingJump> jumps_;
};

}  // namespace

Program parse_assembly(std::string_view text, const ParseOptions& options) {
  Program program = Assembler(options).run(text);
  if (options.validate) validate(program);
  return program;
}

std::string disassemble(const Program& program) {
  std::ostringstream out;
  out << ".entry " << program.entry << "\n";
  for (const auto& m : program.methods) {
    out << "\n.method " << m.name << ' ' << m.arg_count << ' ' << m.num_locals << "\n";
    std::set<std::size_t> targets;
    for (const auto& inst : m.code) {
      if (is_jump(inst.op)) targets.insert(inst.target());
    }
    for (std::size_t pc = 0; pc < m.code.size(); ++pc) {
      if (targets.count(pc)) out << "L" << pc << ":\n";
      const auto& inst = m.code[pc];
      out << "  " << opcode_name(inst.op);
      switch (inst.op) {
        case Opcode::ConstInt:
        case Opcode::ArrayFill:
        case Opcode::LoadLocal:
        case Opcode::StoreLocal:
          out << ' ' << inst.operand;
          break;
        case Opcode::Jump:
        case Opcode::JumpIfTrue:
        case Opcode::JumpIfFalse:
        case Opcode::JumpBackward:
          out << " L" << inst.operand;
          break;
        case Opcode::Call:
          out << ' ' << inst.name << ' ' << inst.argc;
          break;
        case Opcode::ConstMethod:
          out << ' ' << inst.name;
          break;
        case Opcode::CallValue:
          out << ' ' << inst.argc;
          break;
        default:
          break;
      }
      out << "\n";
    }
    // A label may point one past the last instruction only in invalid code;
    // emit it anyway so the text still parses.
    if (targets.count(m.code.size())) out << "L" << m.code.size() << ":\n";
    out << ".end\n";
  }
  return out.str();
}

}  // namespace tvm
