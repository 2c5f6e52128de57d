// One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "jscov/analyzer.hpp"
#include "jscov/coverage_store.hpp"
#include "jscov/digest.hpp"
#include "jscov/errors.hpp"
#include "jscov/fsutil.hpp"
#include "jscov/reporter.hpp"
#include "jscov/runtime.hpp"
#include "jscov/transformer.hpp"
#include "proxy_loop.hpp"
#include "test_support.hpp"

namespace {

using namespace jscov;
namespace fs = std::filesystem;

constexpr double kAnalyzerSeconds = 5.0;
constexpr std::size_t kMinCorpusFiles = 30;
constexpr int kMinNestingDepth = 3;
constexpr int kMinElisionCases = 1000;
constexpr int kElisionCasesPerFile = 40;
constexpr std::uint64_t kMinBeacons = 5;
constexpr double kLoopSeconds = 30.0;
constexpr std::size_t kLoopScripts = 5;
constexpr std::size_t kCssGoldens = 10;

struct Outcome {
  std::vector<std::string> failures;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Outcome analyzer_spans() {
  Outcome out;
  const auto corpus = testing::load_corpus();
  out.check(corpus.size() >= kMinCorpusFiles, "corpus has only " + std::to_string(corpus.size()) + " files");
  std::set<UnitKind> kinds;
  int depth = 0;
  int expression_bodies = 0;
  std::size_t units = 0;
  const auto start = Clock::now();
  for (const auto& f : corpus) {
    const auto a = analyze(f.source, make_resource_key(f.url, f.source));
    if (!a.parse_ok) {
      out.check(false, f.name + " does not parse");
      continue;
    }
    if (a.units.size() != f.labels.size()) {
      out.check(false, f.name + ": " + std::to_string(a.units.size()) + " units, labels have " +
                           std::to_string(f.labels.size()));
      continue;
    }
    for (std::size_t i = 0; i < a.units.size(); ++i) {
      const auto& u = a.units[i];
      const auto& l = f.labels[i];
      const bool same = to_string(u.kind) == l.kind && u.span.start == l.start && u.span.end == l.end &&
                        u.body_span.start == l.body_start && u.body_span.end == l.body_end && u.name == l.name &&
                        u.is_async == l.is_async && u.is_generator == l.is_generator;
      out.check(same, f.name + " unit " + std::to_string(i) + " differs from its label");
      kinds.insert(u.kind);
      depth = std::max(depth, u.depth);
      expression_bodies += u.expression_body;
      ++units;
    }
  }
  const double elapsed = seconds_since(start);
  out.check(kinds.size() == 7, "corpus covers " + std::to_string(kinds.size()) + " of 7 kinds");
  out.check(depth >= kMinNestingDepth, "maximum nesting depth " + std::to_string(depth));
  out.check(expression_bodies > 0, "no expression-bodied arrows");
  out.check(elapsed < kAnalyzerSeconds, "took " + std::to_string(elapsed) + " s");
  out.detail = std::to_string(corpus.size()) + " files, " + std::to_string(units) + " units, depth " +
               std::to_string(depth) + ", " + std::to_string(elapsed) + " s";
  return out;
}

Outcome insertion_reversibility() {
  Outcome out;
  int files = 0;
  int mismatches = 0;
  for (const auto& f : testing::load_corpus()) {
    const auto a = analyze_or_throw(f.source, make_resource_key(f.url, f.source));
    const auto inst = instrument(f.source, a, RuntimeTemplates::defaults(), kBeaconPath);
    ++files;
    if (strip_instrumentation(inst.body) != f.source) {
      ++mismatches;
      out.check(false, f.name + " does not strip back to the original");
    }
  }
  out.detail = std::to_string(files) + " files, " + std::to_string(mismatches) + " mismatches";
  return out;
}

ElisionPolicy policy_for(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: return ElisionPolicy{};
    case 1: return ElisionPolicy::permissive();
    default: {
      ElisionPolicy p;
      p.min_body_bytes = rng() % 200;
      return p;
    }
  }
}

Outcome elision_property() {
  Outcome out;
  const auto corpus = testing::load_corpus();
  std::mt19937_64 rng(424242);
  int cases = 0;
  for (const auto& f : corpus) {
    const auto a = analyze_or_throw(f.source, make_resource_key(f.url, f.source));
    const std::string base = sidecar_url_base(a.key);
    for (int i = 0; i < kElisionCasesPerFile; ++i) {
      const auto executed =
          testing::random_subset(a, std::uniform_real_distribution<double>(0.0, 1.0)(rng), rng);
      const auto policy = policy_for(rng);
      const auto got = elide(f.source, a, executed, policy, base);
      const auto want = testing::expected_elision(f.source, a, executed, policy, base);
      const std::string where = f.name + " case " + std::to_string(i);
      ++cases;
      out.check(got.stats == want.stats, where + ": stats differ from the oracle");
      out.check(got.replaced == want.replaced, where + ": replaced spans differ from the oracle");
      out.check(got.body == want.body, where + ": bytes outside replaced bodies changed");
      out.check(analyze(got.body, make_resource_key(f.url, got.body)).parse_ok, where + ": output does not parse");
      for (const auto& [id, text] : got.sidecars) {
        out.check(analyze(text, make_resource_key("s", text)).parse_ok, where + ": sidecar " + id + " does not parse");
      }
    }
  }
  out.check(cases >= kMinElisionCases, "only " + std::to_string(cases) + " cases");
  out.detail = std::to_string(cases) + " cases";
  return out;
}

CoverageBeacon make_beacon(const ResourceKey& key, std::vector<FunctionId> ids, std::int64_t at) {
  CoverageBeacon b;
  b.key = key;
  b.ids = std::move(ids);
  b.page_url = "https://site.test/";
  b.received_at = Timestamp(std::chrono::milliseconds(at));
  return b;
}

Outcome store_properties() {
  Outcome out;
  std::mt19937_64 rng(77);
  auto key = [](int n) { return ResourceKey{"https://site.test/" + std::to_string(n), sha256_hex(std::to_string(n))}; };
  auto id = [](int n) { return sha256_hex("f" + std::to_string(n)).substr(0, 16); };
  auto random_beacons = [&](int count) {
    std::vector<CoverageBeacon> bs;
    for (int i = 0; i < count; ++i) {
      std::vector<FunctionId> ids;
      for (int k = static_cast<int>(rng() % 5); k > 0; --k) ids.push_back(id(static_cast<int>(rng() % 16)));
      bs.push_back(make_beacon(key(static_cast<int>(rng() % 3)), ids, 1000 + i));
    }
    return bs;
  };

  // permutation invariance
  for (int trial = 0; trial < 200; ++trial) {
    auto bs = random_beacons(1 + static_cast<int>(rng() % 25));
    CoverageStore a;
    for (const auto& b : bs) a.record_beacon(b);
    std::shuffle(bs.begin(), bs.end(), rng);
    CoverageStore b;
    for (const auto& x : bs) b.record_beacon(x);
    const auto ra = a.records();
    const auto rb = b.records();
    bool same = ra.size() == rb.size();
    for (std::size_t i = 0; same && i < ra.size(); ++i) {
      same = ra[i].executed == rb[i].executed && ra[i].beacon_count == rb[i].beacon_count && ra[i].pages == rb[i].pages;
    }
    out.check(same, "trial " + std::to_string(trial) + ": beacon order changed the result");
  }

  // union monotonicity
  for (int trial = 0; trial < 100; ++trial) {
    CoverageStore store;
    std::map<ResourceKey, std::set<FunctionId>> expected;
    for (const auto& b : random_beacons(30)) {
      const auto before = store.executed_ids(b.key);
      const auto rec = store.record_beacon(b);
      expected[b.key].insert(b.ids.begin(), b.ids.end());
      out.check(std::includes(rec.executed.begin(), rec.executed.end(), before.begin(), before.end()),
                "executed set shrank");
      out.check(rec.executed == expected[b.key], "executed set is not the union of beacons");
    }
  }

  // atomic persistence under injected truncation
  testing::TempDir dir;
  const fs::path path = dir.path() / "coverage.store";
  {
    CoverageStore store(path);
    for (const auto& b : random_beacons(10)) store.record_beacon(b);
  }
  const std::string full = read_file(path);
  const auto reference = CoverageStore::load(path)->records();
  int truncations = 0;
  for (std::size_t len = 0; len < full.size(); len += 1 + rng() % 7) {
    {
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      f.write(full.data(), static_cast<std::streamsize>(len));
    }
    bool rejected = false;
    try {
      CoverageStore::load(path);
    } catch (const CorruptState&) {
      rejected = true;
    }
    out.check(rejected, "truncation to " + std::to_string(len) + " bytes was accepted");
    ++truncations;
  }
  write_file_atomic(path, full);
  out.check(CoverageStore::load(path)->records() == reference, "intact file does not reload");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++entries;
  out.check(entries == 1, "temporary files left next to the store");

  // phase flip
  CoverageStore store;
  const auto k = key(9);
  for (std::uint64_t n = 1; n <= kMinBeacons + 2; ++n) {
    store.record_beacon(make_beacon(k, {}, static_cast<std::int64_t>(n)));
    const auto want = n >= kMinBeacons ? ResourcePhase::kElided : ResourcePhase::kLearning;
    out.check(store.phase(k, PhasePolicy{}) == want, "wrong phase after " + std::to_string(n) + " beacons");
  }
  out.check(PhasePolicy{}.min_beacons == kMinBeacons, "default min_beacons is not 5");
  out.detail = "300 order/union trials, " + std::to_string(truncations) + " truncations, flip at " +
               std::to_string(kMinBeacons);
  return out;
}

Outcome proxy_loop() {
  Outcome out;
  testing::TempDir dir;
  testing::LoopOptions options;
  options.workdir = dir.path();
  options.cycles = 5;
  const auto r = testing::run_proxy_loop(options);
  for (const auto& p : r.problems) out.check(false, p);
  out.check(r.scripts.size() == kLoopScripts, std::to_string(r.scripts.size()) + " scripts in the fixture");
  std::size_t shrunk = 0;
  for (const auto& s : r.scripts) {
    out.check(s.final_variant == "elided", s.url + " served as '" + s.final_variant + "'");
    out.check(s.origin_fetches == 1, s.url + " fetched " + std::to_string(s.origin_fetches) + " times");
    out.check(s.final_parses, s.url + " elided body does not parse");
    out.check(s.sidecars_ok, s.url + " sidecars not served");
    if (s.replaced_units > 0) {
      out.check(s.final_bytes < s.original_bytes, s.url + " did not shrink");
      ++shrunk;
    }
  }
  out.check(shrunk > 0, "nothing was elided");
  out.check(r.seconds < kLoopSeconds, "took " + std::to_string(r.seconds) + " s");
  out.detail = std::to_string(r.scripts.size()) + " scripts, " + std::to_string(shrunk) + " shrunk, " +
               std::to_string(r.beacons_accepted) + " beacons, " + std::to_string(r.seconds) + " s";
  return out;
}

Outcome css_goldens() {
  Outcome out;
  const auto goldens = testing::load_css_goldens();
  out.check(goldens.size() == kCssGoldens, std::to_string(goldens.size()) + " goldens");
  bool empty_case = false;
  bool full_case = false;
  for (const auto& g : goldens) {
    out.check(elide_css(g.input, g.ranges) == g.expected, g.name + " differs from its golden");
    empty_case |= g.ranges.empty();
    full_case |= g.ranges.size() == 1 && g.ranges[0].start == 0 && g.ranges[0].end == g.input.size();
  }
  out.check(empty_case, "no empty-range golden");
  out.check(full_case, "no full-range golden");
  out.detail = std::to_string(goldens.size()) + " goldens";
  return out;
}

Outcome reporter_arithmetic() {
  Outcome out;
  std::string src;
  for (int i = 0; i < 80; ++i) src += "function f" + std::to_string(i) + "(){return " + std::to_string(i) + "}\n";
  const auto a = analyze_or_throw(src, make_resource_key("https://site.test/a.js", src));
  CoverageRecord rec;
  rec.key = a.key;
  for (std::size_t i = 0; i < 55 && i < a.units.size(); ++i) rec.executed.insert(a.units[i].id);
  const auto s = resource_stats(a, rec, Party::kFirst);
  out.check(s.total_functions == 80, "total " + std::to_string(s.total_functions));
  out.check(s.executed_functions == 55, "executed " + std::to_string(s.executed_functions));
  out.check(s.superfluous_functions == 25, "superfluous " + std::to_string(s.superfluous_functions));
  out.check(s.superfluous_pct == 31.25, "pct " + format_double(s.superfluous_pct));
  out.detail = std::to_string(s.superfluous_functions) + " superfluous, " + format_double(s.superfluous_pct) + "%";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"analyzer-span-exactness", analyzer_spans},
      {"insertion-reversibility", insertion_reversibility},
      {"elision-locality-and-stats", elision_property},
      {"store-properties", store_properties},
      {"end-to-end-proxy-loop", proxy_loop},
      {"css-elision-goldens", css_goldens},
      {"reporter-arithmetic", reporter_arithmetic},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("threw: ") + e.what());
    }
    if (o.failures.empty()) {
      std::printf("PASS %s (%s)\n", name.c_str(), o.detail.c_str());
    } else {
      ++failed;
      std::printf("FAIL %s: %s", name.c_str(), o.failures.front().c_str());
      if (o.failures.size() > 1) std::printf(" (+%zu more)", o.failures.size() - 1);
      std::printf("\n");
    }
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
