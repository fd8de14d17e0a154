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

#include "tvm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "tvm/assembler.hpp"
#include "tvm/vm.hpp"

namespace tvm {

using nlohmann::json;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string resolve(const std::string& base, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base) / p).lexically_normal().string();
}

std::string kind_name(BenchSource::Kind k) { return k == BenchSource::Kind::Suite ? "suite" : "program"; }

// Relative subprogram paths are tried against the working directory, then
// against the manifest's directory and each of its ancestors.
std::string locate(const std::string& file, const std::string& manifest) {
  namespace fs = std::filesystem;
  const fs::path p(file);
  if (p.is_absolute() || fs::exists(p)) return file;
  for (fs::path dir = fs::absolute(manifest).parent_path(); !dir.empty(); dir = dir.parent_path()) {
    if (fs::exists(dir / p)) return (dir / p).string();
    if (dir == dir.parent_path()) break;
  }
  return file;
}

Program load_source(const BenchSource& s) {
  if (s.kind == BenchSource::Kind::Program) return parse_assembly(read_text(s.path));
  SuiteSpec spec = suite_from_json(json::parse(read_text(s.path)));
  for (SuiteEntry& e : spec.subprograms) e.file = locate(e.file, s.path);
  return build_suite_program(spec);
}

json result_value(const RunResult& r, const Program& p) {
  if (r.error || r.halted) return nullptr;
  if (r.value.is_int()) return r.value.as_int();
  return format_value(r.value, p);
}

double geomean(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += std::log(x);
  return std::exp(s / static_cast<double>(xs.size()));
}

}  // namespace

BenchConfig bench_config_from_json(const json& j, const std::string& base_dir) {
  BenchConfig c;
  if (j.contains("suite_dir")) {
    const std::string dir = resolve(base_dir, j.at("suite_dir").get<std::string>());
    std::vector<std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      const std::string name = e.path().filename().string();
      if (name.rfind("variant_", 0) == 0 && e.path().extension() == ".json") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      c.sources.push_back({BenchSource::Kind::Suite, std::filesystem::path(f).stem().string(), f});
    }
  }
  for (const auto& s : j.value("suites", json::array())) {
    const std::string path = resolve(base_dir, s.get<std::string>());
    c.sources.push_back({BenchSource::Kind::Suite, std::filesystem::path(path).stem().string(), path});
  }
  for (const auto& s : j.value("programs", json::array())) {
    const std::string path = resolve(base_dir, s.get<std::string>());
    c.sources.push_back({BenchSource::Kind::Program, std::filesystem::path(path).stem().string(), path});
  }
  if (c.sources.empty()) throw std::invalid_argument("bench config lists no suites or programs");
  for (const auto& m : j.value("modes", json::array({"interp", "tier1", "tier2", "tier2-hi", "two-level"}))) {
    const auto mode = mode_from_name(m.get<std::string>());
    if (!mode) throw std::invalid_argument("unknown mode " + m.get<std::string>());
    c.modes.push_back(*mode);
  }
  c.iterations = j.value("iterations", std::size_t{20});
  if (c.iterations < 2) throw std::invalid_argument("iterations must be at least 2");
  c.thresholds.t1_method_threshold = j.value("t1_threshold", c.thresholds.t1_method_threshold);
  c.thresholds.t2_backedge_threshold = j.value("t2_threshold", c.thresholds.t2_backedge_threshold);
  c.thresholds.check();
  c.inline_cache = j.value("inline_cache", true);
  return c;
}

SeriesStats summarize(std::vector<double> values) {
  SeriesStats s;
  s.n = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t mid = s.n / 2;
  s.median = s.n % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(s.n - 1);
  }
  return s;
}

json bench(const BenchConfig& config) {
  json cells = json::array();
  for (const BenchSource& src : config.sources) {
    std::optional<Program> program;
    std::string load_error;
    try {
      program = load_source(src);
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (ExecMode mode : config.modes) {
      json cell = {{"source", src.name}, {"kind", kind_name(src.kind)}, {"path", src.path},
                   {"mode", std::string(mode_name(mode))}, {"iterations", config.iterations}};
      if (!program) {
        cell["ok"] = false;
        cell["error"] = load_error;
        cells.push_back(std::move(cell));
        continue;
      }
      try {
        VmOptions opts;
        opts.mode = mode;
        opts.thresholds = config.thresholds;
        opts.inline_cache = config.inline_cache;
        Vm vm(*program, opts);
        std::vector<std::uint64_t> series;
        StepCounters counters;
        RunResult last;
        for (std::size_t i = 0; i < config.iterations; ++i) {
          last = vm.run();
          if (last.error) throw std::runtime_error(last.error->describe());
          series.push_back(last.total_ns);
          counters.dispatches += last.counters.dispatches;
          counters.handler_calls += last.counters.handler_calls;
          counters.direct_calls += last.counters.direct_calls;
          counters.indirect_calls += last.counters.indirect_calls;
        }
        const std::size_t w = peak_window(series.size());
        std::uint64_t tail = 0;
        for (std::size_t i = series.size() - w; i < series.size(); ++i) tail += series[i];
        const TraceStats& ts = vm.runtime().trace_stats;
        const auto& entries = vm.runtime().profile.method_entry_counts;
        cell["ok"] = true;
        cell["error"] = nullptr;
        cell["result"] = result_value(last, vm.program());
        cell["series_ns"] = series;
        cell["first_iteration_ns"] = series.front();
        cell["peak_ns"] = static_cast<double>(tail) / static_cast<double>(w);
        cell["counters"] = {{"dispatches", counters.dispatches},
                            {"handler_calls", counters.handler_calls},
                            {"direct_calls", counters.direct_calls},
                            {"indirect_calls", counters.indirect_calls}};
        cell["traces"] = {{"tier1", {{"count", ts.tier1_count}, {"total_ops", ts.tier1_ops}}},
                          {"tier2", {{"count", ts.tier2_count}, {"total_ops", ts.tier2_ops}}},
                          {"tier2_aborts", ts.tier2_aborts}};
        cell["methods_invoked"] = std::count_if(entries.begin(), entries.end(), [](auto c) { return c > 0; });
      } catch (const std::exception& e) {
        cell["ok"] = false;
        cell["error"] = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  json out;
  out["config"] = {{"iterations", config.iterations},
                   {"peak_window", peak_window(config.iterations)},
                   {"t1_threshold", config.thresholds.t1_method_threshold},
                   {"t2_threshold", config.thresholds.t2_backedge_threshold},
                   {"inline_cache", config.inline_cache}};
  json modes = json::array();
  for (ExecMode m : config.modes) modes.push_back(std::string(mode_name(m)));
  out["config"]["modes"] = std::move(modes);
  out["cells"] = std::move(cells);
  out["aggregates"] = aggregate(out["cells"]);
  out["directionality"] = directionality(out);
  return out;
}

json aggregate(const json& cells) {
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const json& c : cells) {
    if (!c.at("ok").get<bool>()) continue;
    auto& g = groups[{c.at("kind").get<std::string>(), c.at("mode").get<std::string>()}];
    g.first.push_back(c.at("first_iteration_ns").get<double>());
    g.second.push_back(c.at("peak_ns").get<double>());
  }
  auto stats_json = [](const SeriesStats& s) {
    return json{{"median", s.median}, {"mean", s.mean}, {"variance", s.variance}, {"n", s.n}};
  };
  json out = json::object();
  for (const auto& [key, g] : groups) {
    out[key.first][key.second] = {{"first_iteration_ns", stats_json(summarize(g.first))},
                                  {"peak_ns", stats_json(summarize(g.second))}};
  }
  return out;
}

json compare(const json& results, ExecMode baseline, ExecMode candidate) {
  const std::string base = std::string(mode_name(baseline));
  const std::string cand = std::string(mode_name(candidate));
  const json& modes = results.at("config").at("modes");
  for (const std::string& m : {base, cand}) {
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) {
      throw std::invalid_argument("mode " + m + " not in results");
    }
  }
  std::map<std::pair<std::string, std::string>, const json*> base_cells;
  for (const json& c : results.at("cells")) {
    if (c.at("mode") == base && c.at("ok").get<bool>()) base_cells[{c.at("kind"), c.at("source")}] = &c;
  }
  json rows = json::array();
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_kind;
  auto ratio = [](const json& a, const json& b, const char* key) -> json {
    const double den = b.at(key).get<double>();
    if (den == 0) return nullptr;
    return a.at(key).get<double>() / den;
  };
  for (const json& c : results.at("cells")) {
    if (c.at("mode") != cand || !c.at("ok").get<bool>()) continue;
    auto it = base_cells.find({c.at("kind"), c.at("source")});
    if (it == base_cells.end()) continue;
    const json& b = *it->second;
    const double warm = c.at("first_iteration_ns").get<double>() / b.at("first_iteration_ns").get<double>();
    const double peak = c.at("peak_ns").get<double>() / b.at("peak_ns").get<double>();
    by_kind[c.at("kind")].first.push_back(warm);
    by_kind[c.at("kind")].second.push_back(peak);
    rows.push_back({{"source", c.at("source")},
                    {"kind", c.at("kind")},
                    {"warmup_ratio", warm},
                    {"peak_ratio", peak},
                    {"dispatch_ratio", ratio(c.at("counters"), b.at("counters"), "dispatches")},
                    {"handler_call_ratio", ratio(c.at("counters"), b.at("counters"), "handler_calls")},
                    {"direct_calls", {{"baseline", b.at("counters").at("direct_calls")},
                                      {"candidate", c.at("counters").at("direct_calls")}}},
                    {"indirect_calls", {{"baseline", b.at("counters").at("indirect_calls")},
                                        {"candidate", c.at("counters").at("indirect_calls")}}}});
  }
  json geo = json::object();
  for (const auto& [kind, r] : by_kind) {
    geo[kind] = {{"warmup_ratio", geomean(r.first)}, {"peak_ratio", geomean(r.second)}, {"n", r.first.size()}};
  }
  return {{"baseline", base}, {"candidate", cand}, {"rows", std::move(rows)}, {"geomean", std::move(geo)}};
}

json directionality(const json& results) {
  const json& modes = results.at("config").at("modes");
  auto has = [&](ExecMode m) {
    return std::find(modes.begin(), modes.end(), std::string(mode_name(m))) != modes.end();
  };
  auto geo = [&](ExecMode b, ExecMode c, const char* kind, const char* key) -> std::optional<double> {
    if (!has(b) || !has(c)) return std::nullopt;
    const json cmp = compare(results, b, c);
    if (!cmp.at("geomean").contains(kind)) return std::nullopt;
    return cmp.at("geomean").at(kind).at(key).get<double>();
  };
  json out = json::array();
  auto add = [&](const char* claim, std::optional<double> achieved, const char* published, const char* expect,
                 bool (*holds)(double)) {
    json row = {{"claim", claim}, {"published", published}, {"expected", expect}};
    row["achieved"] = achieved ? json(*achieved) : json(nullptr);
    row["holds"] = achieved ? json(holds(*achieved)) : json(nullptr);
    out.push_back(std::move(row));
  };
  add("two-level / tier2 first-iteration time (suites)",
      geo(ExecMode::Tier2Only, ExecMode::TwoLevel, "suite", "warmup_ratio"), "about 0.85", "<= 1.0",
      [](double r) { return r <= 1.0; });
  add("two-level / tier2 peak time (suites)", geo(ExecMode::Tier2Only, ExecMode::TwoLevel, "suite", "peak_ratio"),
      "1.03 to 1.05", "<= 1.15", [](double r) { return r <= 1.15; });
  add("tier1 / interp peak time (programs)", geo(ExecMode::InterpOnly, ExecMode::Tier1Only, "program", "peak_ratio"),
      "about 0.90", "< 1.0", [](double r) { return r < 1.0; });
  std::optional<double> share;
  if (has(ExecMode::TwoLevel)) {
    double t1 = 0;
    double all = 0;
    for (const json& c : results.at("cells")) {
      if (c.at("mode") != "two-level" || c.at("kind") != "suite" || !c.at("ok").get<bool>()) continue;
      t1 += c.at("traces").at("tier1").at("count").get<double>();
      all += c.at("traces").at("tier1").at("count").get<double>() + c.at("traces").at("tier2").at("count").get<double>();
    }
    if (all > 0) share = t1 / all;
  }
  add("tier-1 share of traces in two-level (suites)", share, "about 0.10", "in (0, 0.5)",
      [](double r) { return r > 0 && r < 0.5; });
  return out;
}

}  // namespace tvm
