#include <benchmark/benchmark.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "jscov/analyzer.hpp"
#include "jscov/coverage_store.hpp"
#include "jscov/fsutil.hpp"
#include "jscov/runtime.hpp"
#include "jscov/transformer.hpp"

namespace {

struct Script {
  std::string url;
  std::string source;
  jscov::ResourceAnalysis analysis;
};

const std::vector<Script>& corpus() {
  static const std::vector<Script> scripts = [] {
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(JSCOV_BENCH_CORPUS_DIR)) {
      paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<Script> out;
    for (const auto& p : paths) {
      Script s;
      s.url = "https://bench.test/" + p.filename().string();
      s.source = jscov::read_file(p);
      const auto key = jscov::make_resource_key(s.url, s.source);
      s.analysis = jscov::analyze(s.source, key);
      if (s.analysis.parse_ok) out.push_back(std::move(s));
    }
    return out;
  }();
  return scripts;
}

std::int64_t corpus_bytes() {
  std::int64_t n = 0;
  for (const auto& s : corpus()) n += static_cast<std::int64_t>(s.source.size());
  return n;
}

void BM_Analyze(benchmark::State& state) {
  for (auto _ : state) {
    for (const auto& s : corpus()) {
      benchmark::DoNotOptimize(jscov::analyze(s.source, s.analysis.key));
    }
  }
  state.SetBytesProcessed(state.iterations() * corpus_bytes());
}
BENCHMARK(BM_Analyze);

void BM_Instrument(benchmark::State& state) {
  const auto& runtime = jscov::RuntimeTemplates::defaults();
  for (auto _ : state) {
    for (const auto& s : corpus()) {
      benchmark::DoNotOptimize(jscov::instrument(s.source, s.analysis, runtime, "/__jscov__/beacon"));
    }
  }
  state.SetBytesProcessed(state.iterations() * corpus_bytes());
}
BENCHMARK(BM_Instrument);

// Every other unit counts as executed.
void BM_Elide(benchmark::State& state) {
  std::vector<std::set<jscov::FunctionId>> executed;
  for (const auto& s : corpus()) {
    std::set<jscov::FunctionId> ids;
    for (std::size_t i = 0; i < s.analysis.units.size(); i += 2) ids.insert(s.analysis.units[i].id);
    executed.push_back(std::move(ids));
  }
  const auto policy = jscov::ElisionPolicy::permissive();
  for (auto _ : state) {
    for (std::size_t i = 0; i < corpus().size(); ++i) {
      const auto& s = corpus()[i];
      benchmark::DoNotOptimize(
          jscov::elide(s.source, s.analysis, executed[i], policy, "/__jscov__/body/bench"));
    }
  }
  state.SetBytesProcessed(state.iterations() * corpus_bytes());
}
BENCHMARK(BM_Elide);

void BM_RecordBeacon(benchmark::State& state) {
  const auto& s = corpus().front();
  jscov::CoverageBeacon beacon;
  beacon.key = s.analysis.key;
  for (const auto& u : s.analysis.units) beacon.ids.push_back(u.id);
  beacon.page_url = "https://bench.test/";
  jscov::CoverageStore store;
  for (auto _ : state) {
    beacon.received_at = jscov::now_ms();
    benchmark::DoNotOptimize(store.record_beacon(beacon));
  }
}
BENCHMARK(BM_RecordBeacon);

}  // namespace

BENCHMARK_MAIN();
