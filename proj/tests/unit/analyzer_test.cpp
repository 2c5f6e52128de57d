#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "jscov/analyzer.hpp"
#include "jscov/digest.hpp"
#include "jscov/transformer.hpp"
#include "test_support.hpp"

namespace jscov {
namespace {

ResourceAnalysis analyze_text(std::string_view src, std::string_view url = "https://a.test/x.js") {
  return analyze_or_throw(src, make_resource_key(url, src));
}

TEST(Analyzer, CorpusMatchesReferenceLabels) {
  const auto corpus = testing::load_corpus();
  ASSERT_GE(corpus.size(), 30u);
  for (const auto& file : corpus) {
    SCOPED_TRACE(file.name);
    const auto a = analyze(file.source, make_resource_key(file.url, file.source));
    ASSERT_TRUE(a.parse_ok);
    ASSERT_EQ(a.units.size(), file.labels.size());
    for (std::size_t i = 0; i < a.units.size(); ++i) {
      const auto& u = a.units[i];
      const auto& l = file.labels[i];
      SCOPED_TRACE("unit " + std::to_string(i));
      EXPECT_EQ(to_string(u.kind), l.kind);
      EXPECT_EQ(u.span.start, l.start);
      EXPECT_EQ(u.span.end, l.end);
      EXPECT_EQ(u.body_span.start, l.body_start);
      EXPECT_EQ(u.body_span.end, l.body_end);
      EXPECT_EQ(u.name, l.name);
      EXPECT_EQ(u.is_async, l.is_async);
      EXPECT_EQ(u.is_generator, l.is_generator);
    }
  }
}

TEST(Analyzer, CorpusCoversEveryKindAndDeepNesting) {
  std::set<std::string> kinds;
  int max_depth = 0;
  int expression_bodies = 0;
  for (const auto& file : testing::load_corpus()) {
    const auto a = analyze(file.source, make_resource_key(file.url, file.source));
    for (const auto& u : a.units) {
      kinds.insert(std::string(to_string(u.kind)));
      max_depth = std::max(max_depth, u.depth);
      expression_bodies += u.expression_body;
    }
  }
  EXPECT_EQ(kinds.size(), 7u);
  EXPECT_GE(max_depth, 3);
  EXPECT_GT(expression_bodies, 0);
}

TEST(Analyzer, DerivedFieldsAgreeWithSpans) {
  for (const auto& file : testing::load_corpus()) {
    SCOPED_TRACE(file.name);
    const auto a = analyze(file.source, make_resource_key(file.url, file.source));
    std::set<FunctionId> ids;
    for (std::size_t i = 0; i < a.units.size(); ++i) {
      const auto& u = a.units[i];
      EXPECT_TRUE(ids.insert(u.id).second);
      EXPECT_EQ(u.id, function_id(a.key, u.span.start, u.kind));
      EXPECT_TRUE(u.span.contains(u.body_span));
      EXPECT_EQ(u.is_anonymous, !u.name.has_value());
      EXPECT_EQ(u.expression_body, file.source[u.body_span.start] != '{');
      if (u.expression_body) EXPECT_EQ(u.kind, UnitKind::kArrow);
      int depth = 0;
      for (const auto& v : a.units) {
        if (&v != &u && v.span.contains(u.span)) ++depth;
      }
      EXPECT_EQ(u.depth, depth);
      if (i > 0) EXPECT_LE(a.units[i - 1].span.start, u.span.start);
    }
  }
}

TEST(Analyzer, HandCheckedSpans) {
  const std::string src = "function f(){return 1}";
  const auto a = analyze_text(src);
  ASSERT_EQ(a.units.size(), 1u);
  EXPECT_EQ(a.units[0].span, (SourceSpan{0, 22}));
  EXPECT_EQ(a.units[0].body_span, (SourceSpan{12, 22}));
  EXPECT_EQ(a.units[0].name, "f");
  EXPECT_EQ(a.units[0].kind, UnitKind::kDeclaration);

  const std::string arrows = "x => (y) => ({ y })";
  const auto b = analyze_text(arrows);
  ASSERT_EQ(b.units.size(), 2u);
  EXPECT_EQ(b.units[0].span, (SourceSpan{0, 19}));
  EXPECT_EQ(b.units[0].body_span, (SourceSpan{5, 19}));
  EXPECT_EQ(b.units[1].body_span, (SourceSpan{12, 19}));
  EXPECT_EQ(b.units[1].depth, 1);
  EXPECT_TRUE(b.units[1].expression_body);

  const std::string cls = "class A { static async *g() {} get [k]() {} }";
  const auto c = analyze_text(cls);
  ASSERT_EQ(c.units.size(), 2u);
  EXPECT_EQ(c.units[0].span.slice(cls), "static async *g() {}");
  EXPECT_EQ(c.units[0].kind, UnitKind::kMethod);
  EXPECT_TRUE(c.units[0].is_async);
  EXPECT_TRUE(c.units[0].is_generator);
  EXPECT_EQ(c.units[1].span.slice(cls), "get [k]() {}");
  EXPECT_EQ(c.units[1].kind, UnitKind::kGetter);
  EXPECT_TRUE(c.units[1].is_anonymous);
}

TEST(Analyzer, OffsetsAreUtf8Bytes) {
  const std::string src = "const s = \"\xC3\xA9\"; const f = () => 1;";
  const auto a = analyze_text(src);
  ASSERT_EQ(a.units.size(), 1u);
  EXPECT_EQ(a.units[0].span.start, 26u);
  EXPECT_EQ(a.units[0].span.end, 33u);
  EXPECT_EQ(a.key.content_hash, "adad361862994b5d9939e83b1800a5a80ab4a235e77b5fbb95db6febf60f8ecc");
  EXPECT_EQ(a.units[0].id, "4f3ca3eb5024b04e");
}

TEST(Analyzer, FunctionIdMatchesFrozenDigest) {
  const std::string src = "function f(){return 1}";
  const auto key = make_resource_key("https://a.test/x.js", src);
  EXPECT_EQ(key.content_hash, "b7e9f1a94c148c89ce4ac475ac61e343f2ccca0f783e5d1e7c512c5ab84ef455");
  EXPECT_EQ(function_id(key, 0, UnitKind::kDeclaration), "bf3400860a18a57d");
  // Independent of the URL.
  EXPECT_EQ(analyze_text(src, "https://other.test/y.js").units[0].id, "bf3400860a18a57d");
}

TEST(Analyzer, ResourceKeyDropsFragmentOnly) {
  const auto k = make_resource_key("https://a.test/x.js?v=1#frag", "x");
  EXPECT_EQ(k.url, "https://a.test/x.js?v=1");
  EXPECT_EQ(k.content_hash, sha256_hex("x"));
}

TEST(Analyzer, DirectivesAndPrologueOffset) {
  const std::string src = "#!/usr/bin/env node\n'use strict';\n\"x\"\nfunction f() { 'use strict'; return 1 }";
  const auto a = analyze_text(src);
  EXPECT_EQ(a.prologue_offset, src.find("\"x\"") + 3);
  ASSERT_EQ(a.units.size(), 1u);
  EXPECT_EQ(a.units[0].statements_start, src.find("'use strict'; return") + 13);

  const std::string plain = "function g() { ('use strict'); }";
  const auto b = analyze_text(plain);
  EXPECT_EQ(b.prologue_offset, 0u);
  EXPECT_EQ(b.units[0].statements_start, b.units[0].body_span.start + 1);
}

TEST(Analyzer, SyntaxErrorsAreReported) {
  const std::string bad = "function (";
  EXPECT_THROW(analyze_text(bad), ParseError);
  const auto a = analyze(bad, make_resource_key("u", bad));
  EXPECT_FALSE(a.parse_ok);
  EXPECT_TRUE(a.units.empty());
  EXPECT_EQ(a.source_len, bad.size());
  try {
    analyze_text("let x = {;");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 9u);
  }
}

TEST(Analyzer, EmptySourceHasNoUnits) {
  const auto a = analyze_text("");
  EXPECT_TRUE(a.parse_ok);
  EXPECT_TRUE(a.units.empty());
}

TEST(Analyzer, HtmlLikeCommentsInScriptsOnly) {
  const std::string src = "x = 1 <!-- function hidden() {}\n--> function alsoHidden() {}\nfunction seen() {}";
  const auto a = analyze_text(src);
  ASSERT_EQ(a.units.size(), 1u);
  EXPECT_EQ(a.units[0].name, "seen");
  EXPECT_THROW(analyze_text("export const a = 1;\n--> y"), ParseError);
  // in a module `<!--` is `< ! --`
  EXPECT_TRUE(analyze_text("export const a = 1;\nx <!-- y").parse_ok);
}

TEST(Analyzer, EscapedNamesAreDecoded) {
  const auto a = analyze_text("({ \\u0061b() {}, \\u{63}onstructor() {} }); class K { \\u0063onstructor() {} }");
  ASSERT_EQ(a.units.size(), 3u);
  EXPECT_EQ(a.units[0].name, "ab");
  EXPECT_EQ(a.units[1].name, "constructor");
  EXPECT_EQ(a.units[1].kind, UnitKind::kMethod);
  EXPECT_EQ(a.units[2].kind, UnitKind::kConstructor);
}

TEST(Analyzer, FlagsBodiesThatRedeclareAParameter) {
  const std::string src =
      "function a(x){ var x; return x }\n"
      "function b(x){ { for (var x in o); } }\n"
      "function c({p: [q]}){ var {q} = o }\n"
      "function d(x){ let y; var z; function x(){} }\n"
      "function e(x){ return function(){ var x } }\n"
      "const f = (u, [w]) => { var w };\n"
      "const g = u => { var v };\n"
      "class K { m(x){ var x } static { var x } }\n";
  const auto a = analyze_text(src);
  auto flag_of = [&](std::string_view name) {
    for (const auto& u : a.units) {
      if (u.name == name || src.compare(u.span.start, name.size(), name) == 0) {
        return u.redeclares_parameter;
      }
    }
    ADD_FAILURE() << "no unit " << name;
    return false;
  };
  EXPECT_TRUE(flag_of("a"));
  EXPECT_TRUE(flag_of("b"));
  EXPECT_TRUE(flag_of("c"));
  EXPECT_FALSE(flag_of("d"));
  EXPECT_FALSE(flag_of("e"));
  EXPECT_TRUE(flag_of("(u, [w])"));
  EXPECT_FALSE(flag_of("u => { var v"));
  EXPECT_TRUE(flag_of("m"));
  // The nested function in `e` has no parameters of its own.
  for (const auto& u : a.units) {
    if (u.is_anonymous && u.kind == UnitKind::kExpression) EXPECT_FALSE(u.redeclares_parameter);
  }

  const FunctionUnit& flagged = *std::find_if(a.units.begin(), a.units.end(),
                                              [](const auto& u) { return u.name == "a"; });
  EXPECT_FALSE(policy_allows(ElisionPolicy::permissive(), flagged));
}

TEST(Analyzer, KindNamesRoundTrip) {
  for (auto k : {UnitKind::kDeclaration, UnitKind::kExpression, UnitKind::kArrow, UnitKind::kMethod,
                 UnitKind::kGetter, UnitKind::kSetter, UnitKind::kConstructor}) {
    EXPECT_EQ(unit_kind_from_string(to_string(k)), k);
  }
  EXPECT_FALSE(unit_kind_from_string("lambda"));
}

TEST(Analyzer, FindById) {
  const auto a = analyze_text("function a(){} function b(){}");
  ASSERT_EQ(a.units.size(), 2u);
  EXPECT_EQ(a.find(a.units[1].id), &a.units[1]);
  EXPECT_EQ(a.find("0000000000000000"), nullptr);
}

}  // namespace
}  // namespace jscov
