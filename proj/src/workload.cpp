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

#include "tvm/workload.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tvm/assembler.hpp"
#include "tvm/vm.hpp"

namespace tvm {

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Instruction make(Opcode op, std::int64_t operand = 0) {
  Instruction i;
  i.op = op;
  i.operand = operand;
  return i;
}

Instruction make_call(const std::string& name, std::uint32_t argc) {
  Instruction i;
  i.op = Opcode::Call;
  i.name = name;
  i.argc = argc;
  return i;
}

}  // namespace

Program build_suite_program(const SuiteSpec& suite) {
  if (suite.subprograms.empty()) throw std::invalid_argument("empty suite");
  Program out;
  out.entry = kSuiteDriver;
  Method driver;
  driver.name = kSuiteDriver;
  driver.num_locals = 1;
  std::vector<std::string> added;
  for (const SuiteEntry& e : suite.subprograms) {
    if (e.iterations == 0) throw std::invalid_argument(e.file + ": iterations must be positive");
    const std::string stem = std::filesystem::path(e.file).stem().string();
    Program part;
    try {
      part = parse_assembly(read_text(e.file));
    } catch (const std::exception& ex) {
      throw std::runtime_error(e.file + ": " + ex.what());
    }
    const std::string entry = stem + "." + part.entry;
    if (std::find(added.begin(), added.end(), stem) == added.end()) {
      added.push_back(stem);
      for (Method m : part.methods) {
        m.name = stem + "." + m.name;
        for (Instruction& i : m.code) {
          if (i.op == Opcode::Call || i.op == Opcode::ConstMethod) i.name = stem + "." + i.name;
        }
        m.stack_depth.clear();
        out.add_method(std::move(m));
      }
    }
    // counter = iterations; while counter != 0: call entry; counter -= 1
    auto& code = driver.code;
    code.push_back(make(Opcode::ConstInt, static_cast<std::int64_t>(e.iterations)));
    code.push_back(make(Opcode::StoreLocal, 0));
    const std::size_t top = code.size();
    code.push_back(make(Opcode::LoadLocal, 0));
    const std::size_t exit_jump = code.size();
    code.push_back(make(Opcode::JumpIfFalse, 0));
    code.push_back(make_call(entry, 0));
    code.push_back(make(Opcode::Pop));
    code.push_back(make(Opcode::LoadLocal, 0));
    code.push_back(make(Opcode::ConstInt, 1));
    code.push_back(make(Opcode::Sub));
    code.push_back(make(Opcode::StoreLocal, 0));
    code.push_back(make(Opcode::JumpBackward, static_cast<std::int64_t>(top)));
    code[exit_jump].operand = static_cast<std::int64_t>(code.size());
  }
  driver.code.push_back(make(Opcode::ConstInt, 0));
  driver.code.push_back(make(Opcode::Ret));
  out.add_method(std::move(driver));
  out.link();
  return out;
}

MethodProfile profile_suite(const SuiteSpec& suite) {
  VmOptions opts;
  opts.mode = ExecMode::InterpOnly;
  Vm vm(build_suite_program(suite), opts);
  const RunResult r = vm.run();
  if (r.error) {
    const std::string stem = r.error->method.substr(0, r.error->method.find('.'));
    throw std::runtime_error("subprogram " + stem + " failed: " + r.error->describe());
  }
  MethodProfile profile;
  const Program& p = vm.program();
  const auto& counts = vm.runtime().profile.method_entry_counts;
  for (MethodId id = 0; id < p.methods.size(); ++id) {
    if (p.methods[id].name == kSuiteDriver || counts[id] == 0) continue;
    profile[p.methods[id].name] = counts[id];
  }
  return profile;
}

RegressionFit fit_loglog(const MethodProfile& profile, std::uint64_t min_count) {
  RegressionFit fit;
  for (const auto& [name, count] : profile) {
    if (count > 0 && count >= min_count) fit.points.push_back({0, count, name});
  }
  std::sort(fit.points.begin(), fit.points.end(), [](const FitPoint& a, const FitPoint& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.name < b.name;
  });
  fit.n = fit.points.size();
  if (fit.n < 3) throw FitError("log-log fit needs at least 3 methods, got " + std::to_string(fit.n));
  std::vector<double> x(fit.n);
  std::vector<double> y(fit.n);
  for (std::size_t i = 0; i < fit.n; ++i) {
    fit.points[i].rank = i + 1;
    x[i] = std::log(static_cast<double>(i + 1));
    y[i] = std::log(static_cast<double>(fit.points[i].count));
  }
  const double n = static_cast<double>(fit.n);
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0;
  double sxy = 0;
  double syy = 0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (fit.points.front().count == fit.points.back().count) {
    fit.degenerate = true;
    fit.slope = 0;
    fit.intercept = y[0];
    fit.r2 = 0;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r2 = 1.0 - ss_res / syy;
  return fit;
}

namespace {

MethodProfile combined(const SuiteSpec& suite, const SubprogramProfiler& profiler) {
  MethodProfile total;
  for (const SuiteEntry& e : suite.subprograms) {
    for (const auto& [name, count] : profiler(e)) total[name] += count;
  }
  return total;
}

std::optional<RegressionFit> try_fit(const SuiteSpec& suite, const SubprogramProfiler& profiler,
                                     std::uint64_t min_count) {
  try {
    return fit_loglog(combined(suite, profiler), min_count);
  } catch (const FitError&) {
    return std::nullopt;
  }
}

}  // namespace

TuneReport tune_iterations(const SuiteSpec& suite, const TuneOptions& options) {
  std::map<std::pair<std::string, std::uint64_t>, MethodProfile> memo;
  return tune_iterations(suite, options, [&memo](const SuiteEntry& e) {
    auto key = std::make_pair(e.file, e.iterations);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, profile_suite(SuiteSpec{{e}, 0})).first;
    return it->second;
  });
}

TuneReport tune_iterations(const SuiteSpec& suite, const TuneOptions& options,
                           const SubprogramProfiler& profiler) {
  if (!(options.target_r2 > 0 && options.target_r2 <= 1)) {
    throw std::invalid_argument("target r2 must be in (0, 1]");
  }
  TuneReport report;
  report.suite = suite;
  report.fit = fit_loglog(combined(suite, profiler), options.min_count);
  report.history.push_back(report.fit.r2);
  auto distance = [&](const RegressionFit& f) { return std::abs(f.r2 - options.target_r2); };
  while (report.fit.r2 < options.target_r2 && report.rounds < options.max_rounds) {
    std::optional<SuiteSpec> best_suite;
    RegressionFit best_fit;
    double best_distance = distance(report.fit);
    for (std::size_t i = 0; i < report.suite.subprograms.size(); ++i) {
      const std::uint64_t it = report.suite.subprograms[i].iterations;
      std::vector<std::uint64_t> candidates;
      if (it >= 2) candidates.push_back(it / 2);
      if (it <= options.max_iterations / 2) candidates.push_back(it * 2);
      for (std::uint64_t c : candidates) {
        SuiteSpec trial = report.suite;
        trial.subprograms[i].iterations = c;
        auto fit = try_fit(trial, profiler, options.min_count);
        if (fit && distance(*fit) < best_distance) {
          best_distance = distance(*fit);
          best_fit = *fit;
          best_suite = std::move(trial);
        }
      }
    }
    if (!best_suite) break;
    report.suite = std::move(*best_suite);
    report.fit = std::move(best_fit);
    ++report.rounds;
    report.history.push_back(report.fit.r2);
  }
  report.target_met = report.fit.r2 >= options.target_r2;
  return report;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return r % bound;
  }
}

std::vector<SuiteSpec> make_variants(const SuiteSpec& suite, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("need at least one variant");
  std::vector<SuiteSpec> out;
  out.push_back(suite);
  out.back().variant_seed = seed;
  std::mt19937_64 rng(seed);
  for (std::size_t v = 1; v < n; ++v) {
    SuiteSpec s = suite;
    s.variant_seed = seed;
    auto& items = s.subprograms;
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_below(rng, i)]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

nlohmann::json to_json(const SuiteSpec& suite) {
  nlohmann::json items = nlohmann::json::array();
  for (const SuiteEntry& e : suite.subprograms) items.push_back({{"file", e.file}, {"iterations", e.iterations}});
  return {{"variant_seed", suite.variant_seed}, {"subprograms", std::move(items)}};
}

std::string variant_document(const SuiteSpec& suite, std::size_t number) {
  nlohmann::json j = to_json(suite);
  j["variant"] = number;
  return j.dump(2) + "\n";
}

std::string variant_file_name(std::size_t number) {
  char name[32];
  std::snprintf(name, sizeof name, "variant_%02zu.json", number);
  return name;
}

SuiteSpec suite_from_json(const nlohmann::json& j) {
  SuiteSpec s;
  s.variant_seed = j.value("variant_seed", std::uint64_t{0});
  for (const auto& item : j.at("subprograms")) {
    s.subprograms.push_back({item.at("file").get<std::string>(), item.at("iterations").get<std::uint64_t>()});
  }
  return s;
}

nlohmann::json to_json(const RegressionFit& fit) {
  nlohmann::json points = nlohmann::json::array();
  for (const FitPoint& p : fit.points) points.push_back({{"rank", p.rank}, {"count", p.count}, {"name", p.name}});
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2},
          {"n", fit.n},         {"degenerate", fit.degenerate}, {"points", std::move(points)}};
}

SuiteSpec suite_from_directory(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tvm") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::invalid_argument("no .tvm files in " + dir);
  SuiteSpec s;
  for (auto& f : files) s.subprograms.push_back({std::move(f), 1});
  return s;
}

}  // namespace tvm
