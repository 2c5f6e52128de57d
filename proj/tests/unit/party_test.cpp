#include <gtest/gtest.h>

#include "jscov/errors.hpp"
#include "jscov/party.hpp"
#include "jscov/url.hpp"
#include "test_support.hpp"
#include "jscov/fsutil.hpp"

namespace jscov {
namespace {

struct SuffixCase {
  const char* host;
  const char* suffix;
  const char* registrable;  // nullptr when the host is itself a public suffix
};

// Expectations from the publicsuffix2 Python package (strict mode) run over
// the vendored list. That package reports a public suffix as its own
// "second-level domain"; here such hosts have no registrable domain.
const SuffixCase kSuffixCases[] = {
    {"www.example.com", "com", "example.com"},
    {"example.com", "com", "example.com"},
    {"a.b.example.co.uk", "co.uk", "example.co.uk"},
    {"example.co.uk", "co.uk", "example.co.uk"},
    {"co.uk", "co.uk", nullptr},
    {"uk", "uk", nullptr},
    {"foo.bar.ck", "bar.ck", "foo.bar.ck"},
    {"www.ck", "ck", "www.ck"},
    {"b.city.kawasaki.jp", "kawasaki.jp", "city.kawasaki.jp"},
    {"a.b.city.kawasaki.jp", "kawasaki.jp", "city.kawasaki.jp"},
    {"x.kawasaki.jp", "x.kawasaki.jp", nullptr},
    {"foo.github.io", "github.io", "foo.github.io"},
    {"github.io", "github.io", nullptr},
    {"a.b.c.appspot.com", "appspot.com", "c.appspot.com"},
    {"s3.amazonaws.com", "s3.amazonaws.com", nullptr},
    {"xn--85x722f.xn--55qx5d.cn", "xn--55qx5d.cn", "xn--85x722f.xn--55qx5d.cn"},
    {"www.xn--85x722f.xn--55qx5d.cn", "xn--55qx5d.cn", "xn--85x722f.xn--55qx5d.cn"},
    {"shishi.xn--fiqs8s", "xn--fiqs8s", "shishi.xn--fiqs8s"},
    {"a.b.blogspot.com", "blogspot.com", "b.blogspot.com"},
    {"example.pvt.k12.ma.us", "pvt.k12.ma.us", "example.pvt.k12.ma.us"},
    {"test.k12.ak.us", "k12.ak.us", "test.k12.ak.us"},
    {"sub.domain.example.org", "org", "example.org"},
    {"mysite.herokuapp.com", "herokuapp.com", "mysite.herokuapp.com"},
    {"example.com.au", "com.au", "example.com.au"},
    {"www.example.com.au", "com.au", "example.com.au"},
    {"api.example.co.jp", "co.jp", "example.co.jp"},
    {"test.tokyo.jp", "tokyo.jp", "test.tokyo.jp"},
    {"foo.bar.tokyo.jp", "tokyo.jp", "bar.tokyo.jp"},
};

TEST(PublicSuffixList, MatchesReferenceImplementation) {
  const auto& psl = PublicSuffixList::builtin();
  EXPECT_GT(psl.rule_count(), 8000u);
  for (const auto& c : kSuffixCases) {
    SCOPED_TRACE(c.host);
    EXPECT_EQ(psl.public_suffix(c.host), c.suffix);
    const auto reg = psl.registrable_domain(c.host);
    if (c.registrable) {
      EXPECT_EQ(reg, std::optional<std::string>(c.registrable));
    } else {
      EXPECT_FALSE(reg);
    }
  }
}

TEST(PublicSuffixList, UnlistedTldsAndIpLiterals) {
  const auto& psl = PublicSuffixList::builtin();
  EXPECT_EQ(psl.public_suffix("localhost"), "localhost");
  EXPECT_FALSE(psl.registrable_domain("localhost"));
  EXPECT_EQ(psl.registrable_domain("a.b.unknowntld"), "b.unknowntld");
  EXPECT_EQ(psl.registrable_domain("127.0.0.1"), "127.0.0.1");
  EXPECT_EQ(psl.registrable_domain("[::1]"), "[::1]");
}

TEST(PublicSuffixList, FromTextFollowsRuleTypes) {
  const auto psl = PublicSuffixList::from_text(
      "// comment\n\ncom\n*.wild.test\n!keep.wild.test\nbücher.de\nplain.test  trailing words\n");
  EXPECT_EQ(psl.public_suffix("a.com"), "com");
  EXPECT_EQ(psl.public_suffix("x.y.wild.test"), "y.wild.test");
  EXPECT_EQ(psl.registrable_domain("x.y.wild.test"), "x.y.wild.test");
  EXPECT_EQ(psl.public_suffix("a.keep.wild.test"), "wild.test");
  EXPECT_EQ(psl.registrable_domain("a.keep.wild.test"), "keep.wild.test");
  EXPECT_EQ(psl.registrable_domain("a.plain.test"), "a.plain.test");
  EXPECT_EQ(psl.rule_count(), 4u);  // the non-ASCII rule is ignored
}

TEST(PublicSuffixList, FromFile) {
  testing::TempDir dir;
  write_file_atomic(dir.path() / "psl.dat", "test\n");
  EXPECT_EQ(PublicSuffixList::from_file(dir.path() / "psl.dat").registrable_domain("a.b.test"), "b.test");
  EXPECT_THROW(PublicSuffixList::from_file(dir.path() / "missing"), IoError);
}

TEST(Party, NormalizesHosts) {
  EXPECT_EQ(normalize_host("WWW.Example.COM."), "www.example.com");
  EXPECT_EQ(normalize_host("[::1]"), "[::1]");
  EXPECT_THROW(normalize_host(""), InvalidHost);
  EXPECT_THROW(normalize_host("a..b"), InvalidHost);
  EXPECT_THROW(normalize_host("host:8080"), InvalidHost);
  EXPECT_THROW(normalize_host("bad host"), InvalidHost);
  EXPECT_THROW(normalize_host(std::string(64, 'a') + ".com"), InvalidHost);
}

TEST(Party, PatternMatching) {
  EXPECT_TRUE(host_matches_pattern("cdn.example.com", "*.example.com"));
  EXPECT_TRUE(host_matches_pattern("a.b.example.com", "*.example.com"));
  EXPECT_FALSE(host_matches_pattern("example.com", "*.example.com"));
  EXPECT_FALSE(host_matches_pattern("badexample.com", "*.example.com"));
  EXPECT_TRUE(host_matches_pattern("example.com", "example.com"));
  EXPECT_FALSE(host_matches_pattern("www.example.com", "example.com"));
}

TEST(Party, Classification) {
  EXPECT_EQ(classify_party("static.example.com", "www.example.com", {}), Party::kFirst);
  EXPECT_EQ(classify_party("example.co.uk", "shop.example.co.uk", {}), Party::kFirst);
  EXPECT_EQ(classify_party("other.co.uk", "example.co.uk", {}), Party::kThird);
  EXPECT_EQ(classify_party("cdn.thirdparty.net", "www.example.com", {}), Party::kThird);
  EXPECT_EQ(classify_party("cdn.thirdparty.net", "www.example.com", {"*.thirdparty.net"}), Party::kFirst);
  EXPECT_EQ(classify_party("CDN.ThirdParty.net", "www.example.com", {"*.THIRDPARTY.net"}), Party::kFirst);
  EXPECT_EQ(classify_party("alice.github.io", "bob.github.io", {}), Party::kThird);
  EXPECT_EQ(classify_party("github.io", "github.io", {}), Party::kFirst);
  EXPECT_EQ(classify_party("127.0.0.1", "127.0.0.1", {}), Party::kFirst);
  EXPECT_EQ(classify_party("127.0.0.1", "localhost", {}), Party::kThird);
  EXPECT_THROW(classify_party("bad host", "example.com", {}), InvalidHost);
  EXPECT_EQ(to_string(Party::kFirst), "first");
  EXPECT_EQ(to_string(Party::kThird), "third");
}

TEST(Url, Parsing) {
  UrlParts p;
  ASSERT_TRUE(parse_url("https://Example.com:8443/a/b?q=1", p));
  EXPECT_EQ(p.scheme, "https");
  EXPECT_EQ(p.host, "example.com");
  EXPECT_EQ(p.port, 8443);
  EXPECT_EQ(p.target, "/a/b?q=1");
  ASSERT_TRUE(parse_url("http://example.com", p));
  EXPECT_EQ(p.port, 80);
  EXPECT_EQ(p.target, "/");
  ASSERT_TRUE(parse_url("http://[::1]:81/x", p));
  EXPECT_EQ(p.host, "[::1]");
  EXPECT_EQ(p.port, 81);
  EXPECT_FALSE(parse_url("ftp://example.com/", p));
  EXPECT_FALSE(parse_url("http://example.com:99999/", p));
  EXPECT_FALSE(parse_url("/relative", p));
  EXPECT_EQ(url_host("https://www.example.com/page"), "www.example.com");
  EXPECT_EQ(url_host("not a url"), "");
}

}  // namespace
}  // namespace jscov
