#include <gtest/gtest.h>

#include "jscov/analyzer.hpp"
#include "jscov/runtime.hpp"
#include "jscov/transformer.hpp"
#include "test_support.hpp"

namespace jscov {
namespace {

struct Prepared {
  std::string source;
  ResourceAnalysis analysis;
};

Prepared prepare(std::string src, std::string_view url = "https://a.test/x.js") {
  auto a = analyze_or_throw(src, make_resource_key(url, src));
  return {std::move(src), std::move(a)};
}

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string_view::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

TEST(Instrument, StripRestoresEveryCorpusFile) {
  for (const auto& file : testing::load_corpus()) {
    SCOPED_TRACE(file.name);
    const auto p = prepare(file.source, file.url);
    const auto out = instrument(p.source, p.analysis, RuntimeTemplates::defaults(), kBeaconPath);
    EXPECT_EQ(strip_instrumentation(out.body), file.source);
    EXPECT_EQ(out.marker_count, p.analysis.units.size());
    EXPECT_TRUE(analyze(out.body, make_resource_key(file.url, out.body)).parse_ok);
    EXPECT_EQ(out.key, p.analysis.key);
  }
}

TEST(Instrument, OneMarkerPerUnitWithItsId) {
  const auto p = prepare("function a(){return 1}\nconst b = x => x * 2;\nclass C { m() {} }");
  const auto out = instrument(p.source, p.analysis, RuntimeTemplates::defaults(), kBeaconPath);
  for (const auto& u : p.analysis.units) {
    EXPECT_EQ(count(out.body, ".push(\"" + u.id + "\")"), 1u) << u.id;
  }
  EXPECT_EQ(count(out.body, kInsertOpen), count(out.body, kInsertClose));
  // prologue, two block markers, and the arrow's halves (its marker rides in the opening half)
  EXPECT_EQ(count(out.body, kInsertOpen), 1u + 2u + 2u);
  // the instrumented arrow body is a block returning the original expression
  const auto inst = analyze(out.body, make_resource_key("u", out.body));
  ASSERT_TRUE(inst.parse_ok);
  const FunctionUnit* found = nullptr;
  for (const auto& u : inst.units) {
    if (u.kind == UnitKind::kArrow && u.span.slice(out.body).starts_with("x =>")) found = &u;
  }
  ASSERT_NE(found, nullptr);
  const auto& arrow = *found;
  EXPECT_FALSE(arrow.expression_body);
  EXPECT_NE(arrow.body_span.slice(out.body).find("return("), std::string::npos);
}

TEST(Instrument, PrologueSitsAfterDirectivesAndHashbang) {
  const auto p = prepare("#!/bin/node\n'use strict';\nfunction f() {}");
  const auto out = instrument(p.source, p.analysis, RuntimeTemplates::defaults(), kBeaconPath);
  EXPECT_EQ(out.prologue_span.start, p.analysis.prologue_offset);
  EXPECT_TRUE(out.body.starts_with("#!/bin/node\n'use strict';"));
  EXPECT_EQ(out.prologue_span.slice(out.body).substr(0, kInsertOpen.size()), kInsertOpen);
  EXPECT_NE(out.prologue_span.slice(out.body).find(coverage_global_name(p.analysis.key)), std::string::npos);
  EXPECT_NE(out.prologue_span.slice(out.body).find(key_json(p.analysis.key)), std::string::npos);
}

TEST(Instrument, MarkerFollowsFunctionDirectives) {
  const auto p = prepare("function f() { 'use strict'; return this }");
  const auto out = instrument(p.source, p.analysis, RuntimeTemplates::defaults(), kBeaconPath);
  const auto body_start = out.body.find("{ 'use strict';");
  ASSERT_NE(body_start, std::string::npos);
  EXPECT_LT(body_start, out.body.find(".push(\"" + p.analysis.units[0].id));
}

TEST(Instrument, RejectsMismatchedAnalysis) {
  const auto p = prepare("function f() {}");
  EXPECT_THROW(instrument("function g() {}", p.analysis, RuntimeTemplates::defaults(), kBeaconPath),
               AnalysisMismatch);
  const std::string bad = "function (";
  const auto failed = analyze(bad, make_resource_key("u", bad));
  EXPECT_THROW(instrument(bad, failed, RuntimeTemplates::defaults(), kBeaconPath), AnalysisMismatch);
}

TEST(Instrument, RefusesToInstrumentTwice) {
  const auto p = prepare("function f() {}");
  const auto out = instrument(p.source, p.analysis, RuntimeTemplates::defaults(), kBeaconPath);
  const auto again = prepare(out.body);
  EXPECT_THROW(instrument(again.source, again.analysis, RuntimeTemplates::defaults(), kBeaconPath), Error);
}

TEST(Instrument, StripLeavesUnrelatedTextAlone) {
  EXPECT_EQ(strip_instrumentation("a/*x*/b"), "a/*x*/b");
  EXPECT_EQ(strip_instrumentation(std::string("a") + std::string(kInsertOpen) + "zz" + std::string(kInsertClose) + "b"),
            "ab");
  // unterminated insertion is kept verbatim
  EXPECT_EQ(strip_instrumentation(std::string("a") + std::string(kInsertOpen) + "zz"),
            std::string("a") + std::string(kInsertOpen) + "zz");
}

TEST(Elide, PermissiveElidesTinyBody) {
  const auto p = prepare("function f(){return 1}");
  const auto r = elide(p.source, p.analysis, {}, ElisionPolicy::permissive(), "/b");
  EXPECT_EQ(r.stats.elided_functions, 1u);
  EXPECT_EQ(r.stats.elided_bytes, 10u);
  EXPECT_EQ(r.stats.total_bytes, p.source.size());
  ASSERT_EQ(r.sidecars.size(), 1u);
  EXPECT_EQ(r.sidecars.begin()->first, p.analysis.units[0].id);
  EXPECT_EQ(r.sidecars.begin()->second, "(()=>{return 1})()");
  EXPECT_EQ(r.body, "function f()" + stub_for(p.source, p.analysis.units[0], "/b", RuntimeTemplates::defaults()));
  EXPECT_NE(r.body.find("\"/b/" + p.analysis.units[0].id + "\""), std::string::npos);
}

TEST(Elide, DefaultPolicyKeepsSmallBodiesAndSkippedKinds) {
  const auto p = prepare("function f(){return 1}");
  const auto r = elide(p.source, p.analysis, {}, ElisionPolicy{}, "/b");
  EXPECT_EQ(r.body, p.source);
  EXPECT_EQ(r.stats.elided_functions, 0u);
  EXPECT_EQ(r.stats.skipped_functions, 1u);

  const std::string big(600, ' ');
  const auto q = prepare("async function a(){" + big + "}");
  const auto s = elide(q.source, q.analysis, {}, ElisionPolicy{}, "/b");
  EXPECT_EQ(s.body, q.source);
  EXPECT_EQ(s.stats.skipped_functions, 1u);
  EXPECT_EQ(s.stats.elided_functions, 0u);
  EXPECT_TRUE(s.sidecars.empty());
}

TEST(Elide, ExecutedUnitsStay) {
  const std::string pad(600, ' ');
  const auto p = prepare("function used(){" + pad + "}\nfunction unused(){" + pad + "}");
  const auto r = elide(p.source, p.analysis, {p.analysis.units[0].id}, ElisionPolicy{}, "/b");
  EXPECT_EQ(r.stats.elided_functions, 1u);
  EXPECT_EQ(r.stats.skipped_functions, 0u);
  ASSERT_EQ(r.sidecars.size(), 1u);
  EXPECT_EQ(r.sidecars.begin()->first, p.analysis.units[1].id);
  EXPECT_TRUE(r.body.starts_with("function used(){" + pad + "}"));
  EXPECT_LT(r.body.size(), p.source.size());
}

TEST(Elide, NestedUnitsLeaveWithTheirParent) {
  const std::string pad(600, ' ');
  const auto p = prepare("function outer(){ function inner(){" + pad + "} const k = () => 1;" + pad + "}");
  ASSERT_EQ(p.analysis.units.size(), 3u);
  const auto r = elide(p.source, p.analysis, {}, ElisionPolicy{}, "/b");
  EXPECT_EQ(r.sidecars.size(), 1u);
  EXPECT_EQ(r.stats.elided_functions, 3u);
  EXPECT_EQ(r.stats.elided_bytes, p.analysis.units[0].body_span.size());
  ASSERT_EQ(r.replaced.size(), 1u);
  EXPECT_EQ(r.replaced[0], p.analysis.units[0].body_span);

  // Only the inner one when the outer ran.
  const auto s = elide(p.source, p.analysis, {p.analysis.units[0].id}, ElisionPolicy{}, "/b");
  EXPECT_EQ(s.stats.elided_functions, 1u);
  EXPECT_EQ(s.stats.skipped_functions, 1u);  // the tiny arrow
  EXPECT_TRUE(s.sidecars.contains(p.analysis.units[1].id));
}

TEST(Elide, ExpressionArrowsUseExpressionStub) {
  const std::string pad(600, '1');
  const auto p = prepare("const f = () => (" + pad + ");");
  const auto& u = p.analysis.units[0];
  ASSERT_TRUE(u.expression_body);
  const auto r = elide(p.source, p.analysis, {}, ElisionPolicy{}, "/b");
  ASSERT_EQ(r.sidecars.size(), 1u);
  EXPECT_EQ(r.sidecars.at(u.id), "(()=>((" + pad + ")))()");
  EXPECT_TRUE(r.body.starts_with("const f = () => eval("));
  EXPECT_TRUE(analyze(r.body, make_resource_key("u", r.body)).parse_ok);
}

TEST(Elide, StubKeepsDirectives) {
  const std::string pad(600, ' ');
  const auto p = prepare("function f(){'use strict';" + pad + "}");
  const auto stub = stub_for(p.source, p.analysis.units[0], "/b", RuntimeTemplates::defaults());
  EXPECT_TRUE(stub.starts_with("{'use strict';;return eval("));
}

TEST(Elide, PolicyControls) {
  const std::string pad(600, ' ');
  const auto p = prepare("class A { constructor(){" + pad + "} get g(){" + pad + "} *gen(){" + pad + "} m(){" + pad + "} }");
  const auto def = elide(p.source, p.analysis, {}, ElisionPolicy{}, "/b");
  EXPECT_EQ(def.stats.elided_functions, 1u);
  EXPECT_EQ(def.stats.skipped_functions, 3u);
  const auto all = elide(p.source, p.analysis, {}, ElisionPolicy::permissive(), "/b");
  EXPECT_EQ(all.stats.elided_functions, 4u);
  ElisionPolicy margin;
  margin.min_body_bytes = 10000;
  const auto none = elide(p.source, p.analysis, {}, margin, "/b");
  EXPECT_EQ(none.stats.elided_functions, 0u);
  EXPECT_EQ(none.body, p.source);
}

TEST(Elide, StatsInvariants) {
  for (const auto& file : testing::load_corpus()) {
    const auto p = prepare(file.source, file.url);
    for (const auto& policy : {ElisionPolicy{}, ElisionPolicy::permissive()}) {
      const auto r = elide(p.source, p.analysis, {}, policy, sidecar_url_base(p.analysis.key));
      EXPECT_LE(r.stats.elided_functions + r.stats.skipped_functions, r.stats.total_functions);
      EXPECT_LE(r.stats.elided_bytes, r.stats.total_bytes);
      EXPECT_LE(r.stats.elided_anonymous, r.stats.total_anonymous);
      EXPECT_EQ(r.stats.elided_functions + r.stats.skipped_functions, r.stats.total_functions) << file.name;
    }
  }
}

TEST(Elide, AsyncAndGeneratorBodiesGetMatchingWrappers) {
  const auto p = prepare(
      "async function a(){ await 1 }\nfunction* g(){ yield 1 }\nasync function* ag(){ yield 1 }\n"
      "const e = async x => await x;");
  const auto r = elide(p.source, p.analysis, {}, ElisionPolicy::permissive(), "/b");
  ASSERT_EQ(r.sidecars.size(), 4u);
  const auto& u = p.analysis.units;
  EXPECT_EQ(r.sidecars.at(u[0].id), "(async()=>{ await 1 })()");
  EXPECT_EQ(r.sidecars.at(u[1].id), "(function*(){ yield 1 }).apply(this,arguments)");
  EXPECT_EQ(r.sidecars.at(u[2].id), "(async function*(){ yield 1 }).apply(this,arguments)");
  EXPECT_EQ(r.sidecars.at(u[3].id), "(async()=>(await x))()");
  EXPECT_EQ(count(r.body, "return yield*eval("), 2u);
  for (const auto& [id, text] : r.sidecars) EXPECT_TRUE(analyze(text, make_resource_key("s", text)).parse_ok) << id;
  EXPECT_TRUE(analyze(r.body, make_resource_key("u", r.body)).parse_ok);
}

TEST(Elide, RejectsMismatchedSource) {
  const auto p = prepare("function f(){}");
  EXPECT_THROW(elide("function g(){}", p.analysis, {}, ElisionPolicy{}, "/b"), AnalysisMismatch);
}

TEST(Runtime, RenderSubstitutesOnce) {
  EXPECT_EQ(render("a@X@b@Y@c", {{"X", "@Y@"}, {"Y", "2"}}), "a@Y@b2c");
  EXPECT_EQ(render("mail@example.com", {}), "mail@example.com");
  EXPECT_THROW(render("@MISSING@", {}), std::invalid_argument);
}

TEST(Runtime, NamesAndLiterals) {
  const ResourceKey key{"https://a.test/\xE2\x9C\x93.js", std::string(64, 'a')};
  EXPECT_EQ(coverage_global_name(key), "__jscov_aaaaaaaaaaaaaaaa");
  EXPECT_EQ(key_json(key), "{\"url\":\"https://a.test/\\u2713.js\",\"hash\":\"" + std::string(64, 'a') + "\"}");
  EXPECT_EQ(js_string_literal("a\"b\n\xF0\x9F\x98\x80"), "\"a\\\"b\\n\\ud83d\\ude00\"");
  EXPECT_EQ(sidecar_url_base(key), "/__jscov__/body/" + std::string(64, 'a'));
}

TEST(Runtime, DefaultTemplatesUseOnlyKnownPlaceholders) {
  const auto& t = RuntimeTemplates::defaults();
  EXPECT_NO_THROW(render(t.prologue, {{"GLOBAL", "g"}, {"KEY_JSON", "{}"}, {"BEACON_URL", "\"/b\""}}));
  EXPECT_NO_THROW(render(t.marker, {{"GLOBAL", "g"}, {"FID", "\"x\""}}));
  EXPECT_NO_THROW(render(t.stub, {{"DIRECTIVES", ""}, {"BODY_URL", "\"/u\""}}));
  EXPECT_NO_THROW(render(t.expression_stub, {{"BODY_URL", "\"/u\""}}));
  EXPECT_NO_THROW(render(t.sidecar_wrapper, {{"ORIGINAL_BODY", "{}"}}));
  EXPECT_NE(t.prologue.find("sendBeacon"), std::string::npos);
  EXPECT_NE(t.prologue.find("XMLHttpRequest"), std::string::npos);
  EXPECT_EQ(t.prologue.find('\n'), std::string::npos);
}

}  // namespace
}  // namespace jscov
