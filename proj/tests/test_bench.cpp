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

#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tvm/bench.hpp"

using namespace tvm;
using namespace tvm::testing;
using json = nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("tvm_bench_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    write("ok.tvm", read_file(source_path("programs/corpus/strange_add.tvm")));
    write("bad.tvm", ".method main 0 0\n  CONST_INT 1\n  CONST_INT 0\n  MOD\n  RET\n.end\n");
    write("s.json", R"({"subprograms": [{"file": "ok.tvm", "iterations": 2}]})");
  }
  ~Workspace() { fs::remove_all(dir); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir / name) << text; }
};

const json* find_cell(const json& results, const std::string& source, const std::string& mode) {
  for (const json& c : results.at("cells")) {
    if (c.at("source") == source && c.at("mode") == mode) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("summary statistics") {
  const SeriesStats s = summarize({4, 1, 3, 2});
  CHECK(s.n == 4);
  CHECK(s.median == 2.5);
  CHECK(s.mean == 2.5);
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  const SeriesStats one = summarize({7});
  CHECK(one.median == 7);
  CHECK(one.variance == 0);
  CHECK(summarize({}).n == 0);
  CHECK(summarize({5, 1, 9}).median == 5);
}

TEST_CASE("peak window") {
  CHECK(peak_window(2) == 1);
  CHECK(peak_window(3) == 2);
  CHECK(peak_window(20) == 10);
}

TEST_CASE("config parsing") {
  Workspace w;
  const std::string base = w.dir.string();
  const BenchConfig c = bench_config_from_json(json::parse(R"({"programs": ["ok.tvm"], "suites": ["s.json"]})"), base);
  REQUIRE(c.sources.size() == 2);
  CHECK(c.sources[0].kind == BenchSource::Kind::Suite);
  CHECK(c.sources[0].name == "s");
  CHECK(c.sources[1].kind == BenchSource::Kind::Program);
  CHECK(c.modes.size() == 5);
  CHECK(c.iterations == 20);
  CHECK(c.inline_cache);

  CHECK_THROWS_AS(bench_config_from_json(json::object(), base), std::invalid_argument);
  CHECK_THROWS_AS(bench_config_from_json(json::parse(R"({"programs": ["ok.tvm"], "modes": ["jit"]})"), base),
                  std::invalid_argument);
  CHECK_THROWS_AS(bench_config_from_json(json::parse(R"({"programs": ["ok.tvm"], "iterations": 1})"), base),
                  std::invalid_argument);
  CHECK_THROWS(bench_config_from_json(json::parse(R"({"programs": ["ok.tvm"], "t1_threshold": 0})"), base));

  w.write("variant_02.json", R"({"subprograms": [{"file": "ok.tvm", "iterations": 1}]})");
  w.write("variant_01.json", R"({"subprograms": [{"file": "ok.tvm", "iterations": 1}]})");
  w.write("other.json", "{}");
  const BenchConfig d = bench_config_from_json(json::parse(R"({"suite_dir": "."})"), base);
  REQUIRE(d.sources.size() == 2);
  CHECK(d.sources[0].name == "variant_01");
  CHECK(d.sources[1].name == "variant_02");
}

TEST_CASE("bench cells, failures and aggregates") {
  Workspace w;
  BenchConfig c = bench_config_from_json(
      json::parse(R"({"programs": ["ok.tvm", "bad.tvm", "missing.tvm"], "suites": ["s.json"],
                      "modes": ["interp", "tier1", "two-level"], "iterations": 2})"),
      w.dir.string());
  const json r = bench(c);
  CHECK(r.at("config").at("peak_window") == 1);
  CHECK(r.at("cells").size() == 12);

  const Program prog = load_program("programs/corpus/strange_add.tvm");
  const std::int64_t expected = run_mode(prog, ExecMode::InterpOnly).value.as_int();
  const json* ok = find_cell(r, "ok", "interp");
  REQUIRE(ok);
  CHECK(ok->at("ok") == true);
  CHECK(ok->at("result") == expected);
  REQUIRE(ok->at("series_ns").size() == 2);
  // Two iterations: the peak is the second one alone.
  CHECK(ok->at("peak_ns").get<double>() == ok->at("series_ns")[1].get<double>());
  CHECK(ok->at("first_iteration_ns") == ok->at("series_ns")[0]);
  CHECK(ok->at("counters").at("dispatches").get<std::uint64_t>() > 0);

  const json* t1 = find_cell(r, "ok", "tier1");
  REQUIRE(t1);
  CHECK(t1->at("result") == expected);
  CHECK(t1->at("traces").at("tier1").at("count").get<int>() >= 1);

  for (const char* mode : {"interp", "tier1", "two-level"}) {
    const json* bad = find_cell(r, "bad", mode);
    REQUIRE(bad);
    CHECK(bad->at("ok") == false);
    CHECK(bad->at("error").get<std::string>().find("DivisionByZero") != std::string::npos);
    const json* missing = find_cell(r, "missing", mode);
    REQUIRE(missing);
    CHECK(missing->at("ok") == false);
    const json* suite = find_cell(r, "s", mode);
    REQUIRE(suite);
    CHECK(suite->at("ok") == true);
    CHECK(suite->at("kind") == "suite");
  }

  CHECK(aggregate(r.at("cells")) == r.at("aggregates"));
  const json& agg = r.at("aggregates").at("program").at("interp").at("peak_ns");
  CHECK(agg.at("n") == 1);
  CHECK(agg.at("median").get<double>() == ok->at("peak_ns").get<double>());
  CHECK(r.at("directionality").size() == 4);
  CHECK(json::parse(r.dump()) == r);
}

TEST_CASE("compare") {
  Workspace w;
  BenchConfig c = bench_config_from_json(
      json::parse(R"({"programs": ["ok.tvm"], "suites": ["s.json"], "modes": ["interp", "tier1"], "iterations": 2})"),
      w.dir.string());
  json r = bench(c);
  const json same = compare(r, ExecMode::InterpOnly, ExecMode::InterpOnly);
  REQUIRE(same.at("rows").size() == 2);
  for (const json& row : same.at("rows")) {
    CHECK(row.at("warmup_ratio") == 1.0);
    CHECK(row.at("peak_ratio") == 1.0);
    CHECK(row.at("dispatch_ratio") == 1.0);
  }
  CHECK(same.at("geomean").at("program").at("peak_ratio").get<double>() == doctest::Approx(1.0));

  // Synthetic timings give known ratios.
  for (json& cell : r.at("cells")) {
    const bool cand = cell.at("mode") == "tier1";
    cell["first_iteration_ns"] = cand ? 50.0 : 100.0;
    cell["peak_ns"] = cand ? 80.0 : 40.0;
  }
  const json cmp = compare(r, ExecMode::InterpOnly, ExecMode::Tier1Only);
  for (const json& row : cmp.at("rows")) {
    CHECK(row.at("warmup_ratio") == 0.5);
    CHECK(row.at("peak_ratio") == 2.0);
    CHECK(row.at("dispatch_ratio").get<double>() < 1.0);
  }
  CHECK(cmp.at("geomean").at("suite").at("warmup_ratio").get<double>() == doctest::Approx(0.5));
  CHECK_THROWS_AS(compare(r, ExecMode::InterpOnly, ExecMode::TwoLevel), std::invalid_argument);
}
