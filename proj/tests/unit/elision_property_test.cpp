#include <gtest/gtest.h>

#include <random>

#include "jscov/analyzer.hpp"
#include "jscov/runtime.hpp"
#include "jscov/transformer.hpp"
#include "test_support.hpp"

namespace jscov {
namespace {

struct Case {
  const testing::CorpusFile* file;
  ResourceAnalysis analysis;
};

std::vector<Case> corpus_cases(const std::vector<testing::CorpusFile>& corpus) {
  std::vector<Case> cases;
  for (const auto& f : corpus) cases.push_back({&f, analyze_or_throw(f.source, make_resource_key(f.url, f.source))});
  return cases;
}

ElisionPolicy random_policy(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: return ElisionPolicy{};
    case 1: return ElisionPolicy::permissive();
    case 2: {
      ElisionPolicy p;
      p.min_body_bytes = rng() % 200;
      return p;
    }
    default: {
      ElisionPolicy p = ElisionPolicy::permissive();
      p.size_guard = true;
      p.skip_async = rng() % 2;
      return p;
    }
  }
}

constexpr int kCasesPerFile = 40;

TEST(ElisionProperty, MatchesOracleAndReparses) {
  const auto corpus = testing::load_corpus();
  const auto cases = corpus_cases(corpus);
  std::mt19937_64 rng(20240611);
  int checked = 0;
  for (const auto& c : cases) {
    const std::string base = sidecar_url_base(c.analysis.key);
    for (int i = 0; i < kCasesPerFile; ++i) {
      const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto executed = testing::random_subset(c.analysis, p, rng);
      const auto policy = random_policy(rng);
      SCOPED_TRACE(c.file->name + " case " + std::to_string(i));
      const auto got = elide(c.file->source, c.analysis, executed, policy, base);
      const auto want = testing::expected_elision(c.file->source, c.analysis, executed, policy, base);
      ASSERT_EQ(got.body, want.body);
      ASSERT_EQ(got.stats, want.stats);
      ASSERT_EQ(got.replaced, want.replaced);
      std::set<FunctionId> sidecar_ids;
      for (const auto& [id, text] : got.sidecars) {
        sidecar_ids.insert(id);
        ASSERT_TRUE(analyze(text, make_resource_key("s", text)).parse_ok) << id;
      }
      ASSERT_EQ(sidecar_ids, want.replaced_ids);
      ASSERT_TRUE(analyze(got.body, make_resource_key(c.file->url, got.body)).parse_ok);
      ++checked;
    }
  }
  EXPECT_GE(checked, 1000);
}

TEST(ElisionProperty, BytesOutsideReplacedSpansAreUntouched) {
  const auto corpus = testing::load_corpus();
  const auto cases = corpus_cases(corpus);
  std::mt19937_64 rng(7);
  for (const auto& c : cases) {
    for (int i = 0; i < 10; ++i) {
      const auto executed = testing::random_subset(c.analysis, 0.3, rng);
      const auto got = elide(c.file->source, c.analysis, executed, ElisionPolicy::permissive(),
                             sidecar_url_base(c.analysis.key));
      // Walk the output: every gap between replaced spans is copied verbatim.
      std::size_t src_pos = 0;
      std::size_t out_pos = 0;
      for (const auto& span : got.replaced) {
        const std::size_t gap = span.start - src_pos;
        ASSERT_EQ(got.body.compare(out_pos, gap, c.file->source, src_pos, gap), 0);
        out_pos += gap;
        const FunctionUnit* unit = nullptr;
        for (const auto& u : c.analysis.units) {
          if (u.body_span == span) unit = &u;
        }
        ASSERT_NE(unit, nullptr);
        const auto stub = stub_for(c.file->source, *unit, sidecar_url_base(c.analysis.key), RuntimeTemplates::defaults());
        ASSERT_EQ(got.body.compare(out_pos, stub.size(), stub), 0);
        out_pos += stub.size();
        src_pos = span.end;
      }
      ASSERT_EQ(got.body.substr(out_pos), c.file->source.substr(src_pos));
    }
  }
}

TEST(ElisionProperty, MoreCoverageNeverElidesMore) {
  const auto corpus = testing::load_corpus();
  const auto cases = corpus_cases(corpus);
  std::mt19937_64 rng(99);
  for (const auto& c : cases) {
    for (int i = 0; i < 10; ++i) {
      const auto policy = random_policy(rng);
      auto small = testing::random_subset(c.analysis, 0.3, rng);
      auto large = small;
      for (const auto& id : testing::random_subset(c.analysis, 0.3, rng)) large.insert(id);
      const std::string base = sidecar_url_base(c.analysis.key);
      const auto a = elide(c.file->source, c.analysis, small, policy, base);
      const auto b = elide(c.file->source, c.analysis, large, policy, base);
      EXPECT_GE(a.stats.elided_functions, b.stats.elided_functions);
      EXPECT_GE(a.stats.elided_bytes, b.stats.elided_bytes);
      EXPECT_GE(a.stats.elided_anonymous, b.stats.elided_anonymous);
    }
  }
}

TEST(ElisionProperty, FullCoverageIsIdentity) {
  for (const auto& f : testing::load_corpus()) {
    const auto a = analyze_or_throw(f.source, make_resource_key(f.url, f.source));
    std::set<FunctionId> all;
    for (const auto& u : a.units) all.insert(u.id);
    const auto r = elide(f.source, a, all, ElisionPolicy::permissive(), "/b");
    EXPECT_EQ(r.body, f.source);
    EXPECT_EQ(r.stats.elided_functions, 0u);
    EXPECT_EQ(r.stats.skipped_functions, 0u);
  }
}

TEST(ReversibilityProperty, RandomTemplatesStillStrip) {
  // Instrumentation must be removable whatever the runtime code looks like.
  std::mt19937_64 rng(3);
  // No '@': it would open a placeholder.
  const std::string alphabet = "abc{}();\"'`/*\n ";
  auto junk = [&] {
    std::string s;
    const std::size_t n = rng() % 20;
    for (std::size_t i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  for (const auto& f : testing::load_corpus()) {
    const auto a = analyze_or_throw(f.source, make_resource_key(f.url, f.source));
    RuntimeTemplates t = RuntimeTemplates::defaults();
    t.prologue = junk() + "@GLOBAL@" + junk();
    t.marker = junk() + "@FID@" + junk();
    t.arrow_open = "{" + junk() + "@MARKER@return(";
    const auto out = instrument(f.source, a, t, kBeaconPath);
    EXPECT_EQ(strip_instrumentation(out.body), f.source) << f.name;
  }
}

}  // namespace
}  // namespace jscov
