#include <gtest/gtest.h>

#include "jscov/cache.hpp"
#include "jscov/digest.hpp"
#include "jscov/errors.hpp"
#include "jscov/fsutil.hpp"
#include "test_support.hpp"

namespace jscov {
namespace {

namespace fs = std::filesystem;

std::shared_ptr<CachedResource> resource(const std::string& url, const std::string& body,
                                         Encoding enc = Encoding::kIdentity) {
  auto r = std::make_shared<CachedResource>();
  r->url = url;
  r->key = make_resource_key(url, body);
  r->decoded_body = body;
  r->original_encoding = enc;
  r->content_type = "text/javascript";
  r->headers = {{"Content-Type", "text/javascript"}, {"ETag", "\"abc\""}};
  r->fetched_at = Timestamp(std::chrono::milliseconds(1700000000000));
  return r;
}

TEST(Cache, HeaderLookupIgnoresCase) {
  const HeaderList h = {{"Content-Type", "a"}, {"content-type", "b"}, {"X-One", "1"}};
  EXPECT_EQ(find_header(h, "CONTENT-TYPE"), "a");
  EXPECT_EQ(find_header(h, "x-one"), "1");
  EXPECT_FALSE(find_header(h, "x-two"));
}

TEST(Cache, ResourceTypeDetection) {
  CachedResource r;
  r.url = "https://a.test/x.js?v=1";
  EXPECT_TRUE(r.is_javascript());
  r.content_type = "application/octet-stream";
  EXPECT_TRUE(r.is_javascript());
  r.content_type = "text/html";
  EXPECT_FALSE(r.is_javascript());
  r.content_type = "Application/JavaScript; charset=utf-8";
  EXPECT_TRUE(r.is_javascript());
  r.url = "https://a.test/style.css";
  r.content_type = "";
  EXPECT_TRUE(r.is_css());
  EXPECT_FALSE(r.is_javascript());
  r.url = "https://a.test/m.mjs";
  EXPECT_TRUE(r.is_javascript());
}

TEST(Cache, InMemoryLookups) {
  ResourceCache cache;
  const auto a = resource("https://a.test/a.js", "A");
  const auto b = resource("https://a.test/b.js", "B");
  cache.put(a);
  cache.put(b);
  EXPECT_EQ(cache.size(), 2u);
  EXPECT_EQ(cache.find_url("https://a.test/a.js"), a);
  EXPECT_EQ(cache.find(b->key), b);
  EXPECT_EQ(cache.find_hash(sha256_hex("A")), a);
  EXPECT_EQ(cache.find_url("https://a.test/none.js"), nullptr);
  EXPECT_FALSE(cache.variant_path(a->key, "elided"));
  EXPECT_NO_THROW(cache.put_variant(a->key, "elided", "x"));
  EXPECT_FALSE(cache.dir());
}

TEST(Cache, PersistsAndReloads) {
  testing::TempDir dir;
  const auto a = resource("https://a.test/a.js", "function a(){}", Encoding::kGzip);
  {
    ResourceCache cache(dir.path());
    cache.put(a);
    cache.put_variant(a->key, "instrumented", "INST");
    cache.put_variant(a->key, "elided", "ELIDED");
    cache.put_sidecar(a->key, "0123456789abcdef", "(()=>{})()");
  }
  const fs::path d = dir.path() / a->key.content_hash;
  EXPECT_EQ(read_file(d / "original"), "function a(){}");
  EXPECT_EQ(read_file(d / "instrumented"), "INST");
  EXPECT_EQ(read_file(d / "elided"), "ELIDED");
  EXPECT_EQ(read_file(d / "sidecars" / "0123456789abcdef"), "(()=>{})()");
  EXPECT_TRUE(fs::exists(d / "meta"));

  ResourceCache reloaded(dir.path());
  const auto r = reloaded.find_url(a->url);
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->key, a->key);
  EXPECT_EQ(r->decoded_body, a->decoded_body);
  EXPECT_EQ(r->original_encoding, Encoding::kGzip);
  EXPECT_EQ(r->headers, a->headers);
  EXPECT_EQ(r->content_type, a->content_type);
  EXPECT_EQ(r->fetched_at, a->fetched_at);
  EXPECT_EQ(r->status, 200);
  EXPECT_FALSE(r->opaque);
}

TEST(Cache, SameBodyUnderSeveralUrlsUsesAltDirectories) {
  testing::TempDir dir;
  const auto first = resource("https://a.test/lib.js", "shared");
  const auto second = resource("https://b.test/copy.js", "shared");
  ResourceCache cache(dir.path());
  cache.put(first);
  cache.put(second);
  const fs::path d = dir.path() / first->key.content_hash;
  EXPECT_EQ(cache.variant_path(first->key, "elided"), d / "elided");
  EXPECT_EQ(cache.variant_path(second->key, "elided"),
            d / "alt" / sha256_hex("https://b.test/copy.js").substr(0, 16) / "elided");
  cache.put_variant(second->key, "elided", "E2");
  EXPECT_EQ(read_file(*cache.variant_path(second->key, "elided")), "E2");
  EXPECT_EQ(cache.find_hash(first->key.content_hash), first);

  ResourceCache reloaded(dir.path());
  EXPECT_EQ(reloaded.size(), 2u);
  EXPECT_EQ(reloaded.find_url(second->url)->key, second->key);
  EXPECT_EQ(reloaded.find_hash(first->key.content_hash)->url, first->url);
}

TEST(Cache, ReplacingAUrlKeepsTheLatestBody) {
  testing::TempDir dir;
  ResourceCache cache(dir.path());
  cache.put(resource("https://a.test/a.js", "v1"));
  auto v2 = resource("https://a.test/a.js", "v2");
  v2->fetched_at += std::chrono::milliseconds(5);
  cache.put(v2);
  EXPECT_EQ(cache.find_url("https://a.test/a.js")->decoded_body, "v2");
  ResourceCache reloaded(dir.path());
  EXPECT_EQ(reloaded.find_url("https://a.test/a.js")->decoded_body, "v2");
  EXPECT_NE(reloaded.find(make_resource_key("https://a.test/a.js", "v1")), nullptr);
}

TEST(Cache, TamperedEntriesAreRejected) {
  testing::TempDir dir;
  const auto a = resource("https://a.test/a.js", "body");
  {
    ResourceCache cache(dir.path());
    cache.put(a);
  }
  const fs::path d = dir.path() / a->key.content_hash;
  write_file_atomic(d / "original", "changed");
  EXPECT_THROW(ResourceCache{dir.path()}, CorruptState);
  write_file_atomic(d / "original", "body");
  write_file_atomic(d / "meta", "{not json");
  EXPECT_THROW(ResourceCache{dir.path()}, CorruptState);
}

TEST(Cache, UnrelatedDirectoriesAreIgnored) {
  testing::TempDir dir;
  fs::create_directories(dir.path() / "notes");
  fs::create_directories(dir.path() / std::string(64, 'a'));  // no meta yet
  ResourceCache cache(dir.path());
  EXPECT_EQ(cache.size(), 0u);
}

}  // namespace
}  // namespace jscov
