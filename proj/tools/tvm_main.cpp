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

// tvm command-line driver.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tvm/assembler.hpp"
#include "tvm/bench.hpp"
#include "tvm/vm.hpp"
#include "tvm/workload.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct RunArgs {
  std::string file;
  std::string mode = "interp";
  std::uint64_t t1 = 10;
  std::uint64_t t2 = 1000;
  bool no_ic = false;
  bool dump_threaded = false;
  bool dump_trace = false;
  std::string stats_path;
};

int cmd_run(const RunArgs& a) {
  auto mode = tvm::mode_from_name(a.mode);
  if (!mode) throw std::runtime_error("unknown mode " + a.mode);
  tvm::VmOptions opts;
  opts.mode = *mode;
  opts.thresholds.t1_method_threshold = a.t1;
  opts.thresholds.t2_backedge_threshold = a.t2;
  opts.inline_cache = !a.no_ic;
  tvm::Vm vm(tvm::parse_assembly(read_file(a.file)), opts);
  const tvm::RunResult r = vm.run();
  std::cout << r.output;
  const tvm::Runtime& rt = vm.runtime();
  if (a.dump_threaded) {
    for (const auto& code : rt.cache.threaded) {
      if (code) std::cerr << tvm::dump(*code) << "\n";
    }
  }
  if (a.dump_trace) {
    for (const auto& [key, loop] : rt.cache.loops) std::cerr << tvm::dump(*loop, vm.program()) << "\n";
  }
  if (!a.stats_path.empty()) write_file(a.stats_path, tvm::stats_json(r, rt).dump(2) + "\n");
  if (r.error) {
    std::cerr << "error: " << r.error->describe() << "\n";
    return 1;
  }
  if (!r.halted) std::cout << "=> " << tvm::format_value(r.value, vm.program()) << "\n";
  return 0;
}

struct SynthArgs {
  std::string suite_dir;
  double target_r2 = 0.98;
  std::size_t variants = 20;
  std::uint64_t seed = 1;
  std::size_t max_rounds = 50;
  std::uint64_t min_count = 0;
  std::string out = "suites";
};

int cmd_synth(const SynthArgs& a) {
  tvm::TuneOptions opts;
  opts.target_r2 = a.target_r2;
  opts.max_rounds = a.max_rounds;
  opts.min_count = a.min_count;
  const tvm::TuneReport report = tvm::tune_iterations(tvm::suite_from_directory(a.suite_dir), opts);
  std::filesystem::create_directories(a.out);
  const auto variants = tvm::make_variants(report.suite, a.variants, a.seed);
  for (std::size_t v = 0; v < variants.size(); ++v) {
    write_file((std::filesystem::path(a.out) / tvm::variant_file_name(v + 1)).string(),
               tvm::variant_document(variants[v], v + 1));
  }
  nlohmann::json fit = tvm::to_json(report.fit);
  fit["target_r2"] = a.target_r2;
  fit["target_met"] = report.target_met;
  fit["rounds"] = report.rounds;
  fit["history"] = report.history;
  fit["suite"] = tvm::to_json(report.suite);
  write_file((std::filesystem::path(a.out) / "fit.json").string(), fit.dump(2) + "\n");
  std::cout << "r2 " << report.fit.r2 << " after " << report.rounds << " rounds ("
            << (report.target_met ? "target met" : "target not met") << "), slope " << report.fit.slope
            << ", " << report.fit.n << " methods, " << variants.size() << " variants in " << a.out << "\n";
  return report.target_met ? 0 : 3;
}

int cmd_bench(const std::string& config_path, const std::string& out) {
  const nlohmann::json cfg = nlohmann::json::parse(read_file(config_path));
  const std::string base = std::filesystem::path(config_path).parent_path().string();
  const nlohmann::json results = tvm::bench(tvm::bench_config_from_json(cfg, base.empty() ? "." : base));
  write_file(out, results.dump(2) + "\n");
  int failed = 0;
  for (const auto& c : results.at("cells")) {
    if (!c.at("ok").get<bool>()) {
      ++failed;
      std::cerr << "cell " << c.at("source").get<std::string>() << "/" << c.at("mode").get<std::string>()
                << " failed: " << c.at("error").get<std::string>() << "\n";
    }
  }
  for (const auto& d : results.at("directionality")) {
    std::cout << d.at("claim").get<std::string>() << ": " << d.at("achieved").dump() << " (published "
              << d.at("published").get<std::string>() << ")\n";
  }
  std::cout << results.at("cells").size() << " cells, " << failed << " failed, written to " << out << "\n";
  return failed ? 1 : 0;
}

int cmd_compare(const std::string& results_path, const std::string& baseline, const std::string& candidate) {
  auto b = tvm::mode_from_name(baseline);
  auto c = tvm::mode_from_name(candidate);
  if (!b || !c) throw std::runtime_error("unknown mode");
  const nlohmann::json results = nlohmann::json::parse(read_file(results_path));
  std::cout << tvm::compare(results, *b, *c).dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tvm: bytecode VM with a two-tier JIT"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a .tvm program");
  run_cmd->add_option("file", run.file)->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--mode", run.mode, "interp|tier1|tier2|tier2-hi|two-level");
  run_cmd->add_option("--t1-threshold", run.t1)->check(CLI::PositiveNumber);
  run_cmd->add_option("--t2-threshold", run.t2)->check(CLI::PositiveNumber);
  run_cmd->add_flag("--no-inline-cache", run.no_ic);
  run_cmd->add_flag("--dump-threaded", run.dump_threaded);
  run_cmd->add_flag("--dump-trace", run.dump_trace);
  run_cmd->add_option("--stats-json", run.stats_path);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Tune a benchmark suite and emit shuffled variants");
  synth_cmd->add_option("--suite", synth.suite_dir, "Directory of .tvm subprograms")->required();
  synth_cmd->add_option("--target-r2", synth.target_r2);
  synth_cmd->add_option("--variants", synth.variants)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--max-rounds", synth.max_rounds);
  synth_cmd->add_option("--min-count", synth.min_count);
  synth_cmd->add_option("--out", synth.out);

  std::string bench_config;
  std::string bench_out = "results.json";
  auto* bench_cmd = app.add_subcommand("bench", "Run the benchmark harness");
  bench_cmd->add_option("--config", bench_config)->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench_out);

  std::string cmp_results;
  std::string cmp_base = "tier2";
  std::string cmp_cand = "two-level";
  auto* cmp_cmd = app.add_subcommand("compare", "Compare two modes in a results document");
  cmp_cmd->add_option("--results", cmp_results)->required()->check(CLI::ExistingFile);
  cmp_cmd->add_option("--baseline", cmp_base);
  cmp_cmd->add_option("--candidate", cmp_cand);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run_cmd->parsed()) return cmd_run(run);
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (bench_cmd->parsed()) return cmd_bench(bench_config, bench_out);
    if (cmp_cmd->parsed()) return cmd_compare(cmp_results, cmp_base, cmp_cand);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
