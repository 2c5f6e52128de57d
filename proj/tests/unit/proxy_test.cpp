#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "jscov/codec.hpp"
#include "jscov/errors.hpp"
#include "jscov/proxy.hpp"
#include "test_support.hpp"

namespace jscov {
namespace {

struct FakeOrigin {
  std::mutex mutex;
  std::map<std::string, OriginResponse> routes;
  std::map<std::string, int> hits;
  std::vector<HeaderList> seen_headers;
  std::vector<std::string> seen_methods;
  std::chrono::milliseconds delay{0};

  void js(const std::string& url, const std::string& body, Encoding enc = Encoding::kIdentity,
          HeaderList extra = {}) {
    OriginResponse o;
    o.status = 200;
    o.headers = {{"Content-Type", "application/javascript"}};
    if (enc != Encoding::kIdentity) o.headers.emplace_back("Content-Encoding", std::string(to_string(enc)));
    for (auto& h : extra) o.headers.push_back(h);
    o.body = transcode(body, enc);
    routes[url] = o;
  }

  OriginFetcher fetcher() {
    return [this](const std::string& method, const std::string& url, const HeaderList& headers,
                  const std::string&) {
      if (delay.count()) std::this_thread::sleep_for(delay);
      std::lock_guard lock(mutex);
      ++hits[url];
      seen_headers.push_back(headers);
      seen_methods.push_back(method);
      const auto it = routes.find(url);
      if (it == routes.end()) throw OriginUnreachable("no route for " + url);
      return it->second;
    };
  }
};

// `unused` is long enough to pass the default size guard.
const std::string kScript = [] {
  std::string s = "function used(a){ return a + 1 }\nfunction unused(b){\n  var t = b;\n";
  for (int i = 0; i < 40; ++i) s += "  t = t * 3 + " + std::to_string(i) + ";\n";
  return s + "  return t;\n}\nused(1);\n";
}();

struct Fixture {
  FakeOrigin origin;
  CoverageStore store;
  ResourceCache cache;
  std::vector<std::string> logs;
  std::unique_ptr<Proxy> proxy;

  explicit Fixture(ProxyConfig config = {}) {
    origin.js("http://site.test/app.js", kScript, Encoding::kGzip, {{"ETag", "\"v1\""}});
    config.log = [this](std::string_view m) { logs.emplace_back(m); };
    proxy = std::make_unique<Proxy>(std::move(config), store, cache, origin.fetcher());
  }

  HttpResponse get(const std::string& target, HeaderList headers = {}, ServeMode mode = ServeMode::kAuto) {
    HttpRequest req;
    req.target = target;
    headers.emplace_back("Host", "site.test");
    req.headers = std::move(headers);
    return proxy->serve(req, mode);
  }

  HttpResponse post_beacon(const std::string& body) {
    HttpRequest req;
    req.method = "POST";
    req.target = std::string(kBeaconPath);
    req.headers = {{"Host", "site.test"}, {"Content-Type", "text/plain"}};
    req.body = body;
    return proxy->serve(req);
  }

  ResourceAnalysis analysis() {
    return analyze_or_throw(kScript, make_resource_key("http://site.test/app.js", kScript));
  }

  void beacons(int n, const std::vector<FunctionId>& ids) {
    const auto a = analysis();
    for (int i = 0; i < n; ++i) {
      CoverageBeacon b;
      b.key = a.key;
      b.ids = ids;
      b.page_url = "http://site.test/";
      ASSERT_EQ(post_beacon(beacon_to_json(b)).status, 204);
    }
  }
};

std::string header(const HttpResponse& r, std::string_view name) { return find_header(r.headers, name).value_or(""); }

std::size_t header_count(const HttpResponse& r, std::string_view name) {
  std::size_t n = 0;
  for (const auto& [k, v] : r.headers) n += find_header({{k, v}}, name).has_value();
  return n;
}

TEST(ProxyRouting, BeaconIsRecordedWithCors) {
  Fixture f;
  const auto a = f.analysis();
  CoverageBeacon b;
  b.key = a.key;
  b.ids = {a.units[0].id};
  const auto res = f.post_beacon(beacon_to_json(b));
  EXPECT_EQ(res.status, 204);
  EXPECT_TRUE(res.body.empty());
  EXPECT_EQ(header(res, "Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(f.store.executed_ids(a.key), (std::set<FunctionId>{a.units[0].id}));
  EXPECT_EQ(f.proxy->counters().beacons, 1u);
  EXPECT_EQ(f.proxy->counters().origin_requests, 0u);
}

TEST(ProxyRouting, BadBeaconsAre400) {
  Fixture f;
  for (const std::string body : {"", "{", "{\"v\":2,\"key\":{\"url\":\"u\",\"hash\":\"h\"},\"ids\":[]}",
                                 "{\"v\":1,\"key\":{\"url\":\"u\",\"hash\":\"short\"},\"ids\":[]}"}) {
    const auto res = f.post_beacon(body);
    EXPECT_EQ(res.status, 400) << body;
    EXPECT_EQ(header(res, "Access-Control-Allow-Origin"), "*");
  }
  EXPECT_EQ(f.store.size(), 0u);
}

TEST(ProxyRouting, BeaconPreflightAndWrongMethod) {
  Fixture f;
  HttpRequest req;
  req.method = "OPTIONS";
  req.target = std::string(kBeaconPath);
  const auto pre = f.proxy->serve(req);
  EXPECT_EQ(pre.status, 204);
  EXPECT_EQ(header(pre, "Access-Control-Allow-Methods"), "POST, OPTIONS");
  EXPECT_EQ(f.get(std::string(kBeaconPath)).status, 405);
}

TEST(ProxyRouting, LoopsAreRefused) {
  Fixture f;
  const auto res = f.get("/app.js", {{"Via", "1.1 jscov"}});
  EXPECT_EQ(res.status, 508);
  EXPECT_EQ(f.origin.hits.size(), 0u);
}

TEST(ProxyRouting, OriginRequestsCarryVia) {
  Fixture f;
  f.get("/app.js", {{"Cookie", "a=1"}, {"X-Private", "no"}});
  ASSERT_EQ(f.origin.seen_headers.size(), 1u);
  const auto& h = f.origin.seen_headers[0];
  EXPECT_EQ(find_header(h, "via"), "1.1 jscov");
  EXPECT_EQ(find_header(h, "cookie"), "a=1");
  EXPECT_FALSE(find_header(h, "x-private"));
}

TEST(ProxyRouting, MissingHostIs400) {
  Fixture f;
  HttpRequest req;
  req.target = "/app.js";
  EXPECT_EQ(f.proxy->serve(req).status, 400);
}

TEST(ProxyRouting, AbsoluteFormTargets) {
  Fixture f;
  HttpRequest req;
  req.target = "http://SITE.test:80/app.js";
  const auto res = f.proxy->serve(req);
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(f.origin.hits["http://site.test/app.js"], 1);
}

TEST(ProxySidecar, UnknownIs404AndKnownIsServed) {
  Fixture f;
  const auto a = f.analysis();
  EXPECT_EQ(f.get(sidecar_url_base(a.key) + "/" + a.units[1].id).status, 404);  // not cached yet
  f.get("/app.js");
  const auto res = f.get(sidecar_url_base(a.key) + "/" + a.units[1].id);
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(header(res, "Content-Type"), "application/javascript");
  EXPECT_EQ(header(res, "Cache-Control"), "no-store");
  EXPECT_EQ(res.body, sidecar_for(kScript, a.units[1], RuntimeTemplates::defaults()));
  EXPECT_EQ(f.get(sidecar_url_base(a.key) + "/ffffffffffffffff").status, 404);
  EXPECT_EQ(f.get(sidecar_url_base(a.key) + "/XYZ").status, 404);
  EXPECT_EQ(f.get(std::string(kSidecarPathPrefix) + "nothing").status, 404);
}

TEST(ProxyVariants, AutoModeFollowsThePhase) {
  Fixture f;
  const auto a = f.analysis();
  auto res = f.get("/app.js", {{"Accept-Encoding", "gzip"}});
  EXPECT_EQ(header(res, "X-Jscov-Variant"), "instrumented");
  EXPECT_EQ(strip_instrumentation(decode(res.body, Encoding::kGzip)), kScript);

  f.beacons(4, {a.units[0].id});
  EXPECT_EQ(header(f.get("/app.js"), "X-Jscov-Variant"), "instrumented");
  f.beacons(1, {a.units[0].id});
  res = f.get("/app.js");
  EXPECT_EQ(header(res, "X-Jscov-Variant"), "elided");
  const auto want = elide(kScript, a, {a.units[0].id}, ElisionPolicy{}, sidecar_url_base(a.key));
  EXPECT_EQ(res.body, want.body);
  EXPECT_EQ(want.stats.elided_functions, 1u);
  EXPECT_LT(res.body.size(), kScript.size());
  EXPECT_EQ(f.origin.hits["http://site.test/app.js"], 1);
}

TEST(ProxyVariants, OriginalModeAndMinBeacons) {
  ProxyConfig config;
  config.phase.min_beacons = 2;
  Fixture f(config);
  EXPECT_EQ(f.get("/app.js", {}, ServeMode::kOriginal).body, kScript);
  EXPECT_EQ(header(f.get("/app.js", {}, ServeMode::kOriginal), "X-Jscov-Variant"), "original");
  f.beacons(2, {});
  EXPECT_EQ(header(f.get("/app.js"), "X-Jscov-Variant"), "elided");
  EXPECT_EQ(f.get("/app.js", {}, ServeMode::kOriginal).body, kScript);
}

TEST(ProxyVariants, ForcedElidedNeedsSomeCoverage) {
  Fixture f;
  EXPECT_EQ(header(f.get("/app.js", {}, ServeMode::kForcedElided), "X-Jscov-Variant"), "instrumented");
  f.beacons(1, {});
  EXPECT_EQ(header(f.get("/app.js", {}, ServeMode::kForcedElided), "X-Jscov-Variant"), "elided");
  EXPECT_EQ(header(f.get("/app.js"), "X-Jscov-Variant"), "instrumented");
}

TEST(ProxyVariants, FrozenPhaseNeverElides) {
  ProxyConfig config;
  config.phase.freeze = true;
  Fixture f(config);
  f.beacons(6, {});
  EXPECT_EQ(header(f.get("/app.js"), "X-Jscov-Variant"), "instrumented");
}

TEST(ProxyVariants, RepeatedRequestsAreByteIdentical) {
  Fixture f;
  const auto first = f.get("/app.js", {{"Accept-Encoding", "br, gzip"}}).body;
  for (int i = 0; i < 5; ++i) EXPECT_EQ(f.get("/app.js", {{"Accept-Encoding", "br, gzip"}}).body, first);
  f.beacons(5, {});
  const auto elided = f.get("/app.js").body;
  for (int i = 0; i < 5; ++i) EXPECT_EQ(f.get("/app.js").body, elided);
  EXPECT_EQ(f.proxy->counters().transforms, 2u);
}

TEST(ProxyHeaders, EncodingFollowsTheClient) {
  Fixture f;
  auto res = f.get("/app.js", {{"Accept-Encoding", "gzip, br"}}, ServeMode::kOriginal);
  EXPECT_EQ(header(res, "Content-Encoding"), "gzip");
  EXPECT_EQ(decode(res.body, Encoding::kGzip), kScript);
  EXPECT_EQ(header(res, "Vary"), "Accept-Encoding");
  EXPECT_EQ(header_count(res, "Vary"), 1u);
  res = f.get("/app.js", {}, ServeMode::kOriginal);
  EXPECT_EQ(header_count(res, "Content-Encoding"), 0u);
  EXPECT_EQ(res.body, kScript);
  res = f.get("/app.js", {{"Accept-Encoding", "gzip;q=0, br"}}, ServeMode::kOriginal);
  EXPECT_EQ(header_count(res, "Content-Encoding"), 0u);
  res = f.get("/app.js", {{"Accept-Encoding", "*"}}, ServeMode::kOriginal);
  EXPECT_EQ(header(res, "Content-Encoding"), "gzip");
}

TEST(ProxyHeaders, TransformedBodiesDropOriginValidators) {
  Fixture f;
  const auto original = f.get("/app.js", {}, ServeMode::kOriginal);
  EXPECT_EQ(header(original, "ETag"), "\"v1\"");
  const auto inst = f.get("/app.js");
  EXPECT_EQ(header_count(inst, "ETag"), 0u);
  EXPECT_EQ(header(inst, "Cache-Control"), "no-store");
  EXPECT_EQ(header(inst, "Content-Type"), "application/javascript");
}

TEST(ProxyHeaders, PartyFollowsTheReferer) {
  ProxyConfig config;
  config.first_party = {"*.partner.test"};
  Fixture f(config);
  f.origin.js("http://cdn.partner.test/x.js", "function x(){}");
  f.origin.js("http://cdn.other.test/y.js", "function y(){}");
  EXPECT_EQ(header(f.get("/app.js", {{"Referer", "http://www.site.test/index.html"}}), "X-Jscov-Party"), "first");
  HttpRequest req;
  req.target = "http://cdn.other.test/y.js";
  req.headers = {{"Referer", "http://www.site.test/"}};
  EXPECT_EQ(header(f.proxy->serve(req), "X-Jscov-Party"), "third");
  req.target = "http://cdn.partner.test/x.js";
  EXPECT_EQ(header(f.proxy->serve(req), "X-Jscov-Party"), "first");
  EXPECT_EQ(header_count(f.get("/app.js"), "X-Jscov-Party"), 0u);
}

TEST(ProxyFetch, ServerErrorsBecome502) {
  Fixture f;
  OriginResponse o;
  o.status = 503;
  f.origin.routes["http://site.test/down.js"] = o;
  EXPECT_EQ(f.get("/down.js").status, 502);
  EXPECT_EQ(f.get("/unrouted.js").status, 502);
  EXPECT_EQ(f.cache.size(), 0u);
  EXPECT_THROW(f.proxy->fetch_origin("http://site.test/down.js"), OriginUnreachable);
}

TEST(ProxyFetch, NonOkResponsesPassThroughUncached) {
  Fixture f;
  OriginResponse o;
  o.status = 404;
  o.headers = {{"Content-Type", "text/html"}, {"Content-Encoding", "gzip"}};
  o.body = transcode("<h1>missing</h1>", Encoding::kGzip);
  f.origin.routes["http://site.test/missing.js"] = o;
  for (int i = 0; i < 2; ++i) {
    const auto res = f.get("/missing.js");
    EXPECT_EQ(res.status, 404);
    EXPECT_EQ(res.body, o.body);
    EXPECT_EQ(header_count(res, "Content-Encoding"), 1u);
  }
  EXPECT_EQ(f.origin.hits["http://site.test/missing.js"], 2);
  EXPECT_EQ(f.cache.size(), 0u);
}

TEST(ProxyFetch, UndecodableBodiesAreOpaque) {
  Fixture f;
  OriginResponse o;
  o.status = 200;
  o.headers = {{"Content-Type", "application/javascript"}, {"Content-Encoding", "gzip"}};
  o.body = "this is not gzip";
  f.origin.routes["http://site.test/broken.js"] = o;
  const auto res = f.get("/broken.js");
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(res.body, o.body);
  EXPECT_EQ(header_count(res, "Content-Encoding"), 1u);
  EXPECT_EQ(header_count(res, "X-Jscov-Variant"), 0u);
  const auto cached = f.cache.find_url("http://site.test/broken.js");
  ASSERT_NE(cached, nullptr);
  EXPECT_TRUE(cached->opaque);
  o.headers = {{"Content-Type", "application/javascript"}, {"Content-Encoding", "compress"}};
  f.origin.routes["http://site.test/compress.js"] = o;
  EXPECT_TRUE(f.proxy->fetch_origin("http://site.test/compress.js")->opaque);
}

TEST(ProxyFetch, ConcurrentRequestsShareOneFetch) {
  Fixture f;
  f.origin.delay = std::chrono::milliseconds(50);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int i = 0; i < 16; ++i) {
    threads.emplace_back([&] {
      if (f.get("/app.js").status == 200) ++ok;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 16);
  EXPECT_EQ(f.origin.hits["http://site.test/app.js"], 1);
  EXPECT_EQ(f.proxy->counters().transforms, 1u);
}

TEST(ProxyFetch, HardReloadRefetchesAndStartsFresh) {
  Fixture f;
  const auto a = f.analysis();
  f.get("/app.js");
  f.beacons(5, {a.units[0].id});
  EXPECT_EQ(header(f.get("/app.js"), "X-Jscov-Variant"), "elided");
  const std::string v2 = kScript + "function added(){ return 'new code' }\n";
  f.origin.js("http://site.test/app.js", v2);
  const auto res = f.get("/app.js", {{"Cache-Control", "no-cache"}});
  EXPECT_EQ(f.origin.hits["http://site.test/app.js"], 2);
  EXPECT_EQ(header(res, "X-Jscov-Variant"), "instrumented");
  EXPECT_EQ(strip_instrumentation(res.body), v2);
  const auto key2 = make_resource_key("http://site.test/app.js", v2);
  EXPECT_NE(key2, a.key);
  EXPECT_FALSE(f.store.record(key2));
  EXPECT_EQ(header(f.get("/app.js"), "X-Jscov-Variant"), "instrumented");
}

TEST(ProxyFailOpen, UnparseableScriptsAreServedAsIs) {
  Fixture f;
  const std::string poisoned = "function broken( { return 1 }";
  f.origin.js("http://site.test/poison.js", poisoned);
  auto res = f.get("/poison.js");
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(res.body, poisoned);
  EXPECT_EQ(header(res, "X-Jscov-Variant"), "original");
  res = f.get("/poison.js", {}, ServeMode::kForcedElided);
  EXPECT_EQ(res.body, poisoned);
  EXPECT_EQ(f.proxy->counters().transform_failures, 1u);
  EXPECT_FALSE(f.logs.empty());
}

TEST(ProxyFailOpen, NonScriptsAreNeverTransformed) {
  Fixture f;
  OriginResponse o;
  o.status = 200;
  o.headers = {{"Content-Type", "text/html"}};
  o.body = "<script>function inline(){}</script>";
  f.origin.routes["http://site.test/"] = o;
  const auto res = f.get("/");
  EXPECT_EQ(res.body, o.body);
  EXPECT_EQ(header(res, "X-Jscov-Variant"), "original");
}

TEST(ProxyRelay, OtherMethodsAreRelayedUncached) {
  Fixture f;
  OriginResponse o;
  o.status = 201;
  o.headers = {{"Content-Type", "application/json"}, {"Connection", "close"}};
  o.body = "{}";
  f.origin.routes["http://site.test/api"] = o;
  HttpRequest req;
  req.method = "PUT";
  req.target = "/api";
  req.headers = {{"Host", "site.test"}};
  req.body = "payload";
  const auto res = f.proxy->serve(req);
  EXPECT_EQ(res.status, 201);
  EXPECT_EQ(res.body, "{}");
  EXPECT_EQ(header_count(res, "Connection"), 0u);
  EXPECT_EQ(f.origin.seen_methods.back(), "PUT");
  EXPECT_EQ(f.cache.size(), 0u);
  req.target = "/nowhere";
  EXPECT_EQ(f.proxy->serve(req).status, 502);
}

TEST(ProxyMode, Names) {
  for (auto m : {ServeMode::kOriginal, ServeMode::kAuto, ServeMode::kForcedElided}) {
    EXPECT_EQ(parse_serve_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_serve_mode("elided"), Error);
}

}  // namespace
}  // namespace jscov
