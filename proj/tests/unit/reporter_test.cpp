#include <gtest/gtest.h>

#include <random>

#include "jscov/digest.hpp"
#include "jscov/reporter.hpp"

namespace jscov {
namespace {

std::string numbered_functions(int n) {
  std::string src;
  for (int i = 0; i < n; ++i) src += "function f" + std::to_string(i) + "(){return " + std::to_string(i) + "}\n";
  return src;
}

CoverageBeacon beacon_for(const ResourceKey& key, std::vector<FunctionId> ids, std::optional<std::string> page) {
  CoverageBeacon b;
  b.key = key;
  b.ids = std::move(ids);
  b.page_url = std::move(page);
  b.received_at = Timestamp(std::chrono::milliseconds(1));
  return b;
}

std::shared_ptr<CachedResource> cached(const std::string& url, const std::string& body) {
  auto r = std::make_shared<CachedResource>();
  r->url = url;
  r->key = make_resource_key(url, body);
  r->decoded_body = body;
  r->content_type = "application/javascript";
  return r;
}

// Exactly `total` bytes with one never-executed function whose body is
// `body_bytes` long.
std::string sized_resource(std::size_t body_bytes, std::size_t total) {
  std::string body = "{return " + std::string(body_bytes - 9, '1') + "}";
  std::string src = "function f()" + body + "//";
  src += std::string(total - src.size(), 'x');
  return src;
}

TEST(Reporter, EightyFunctionsFiftyFiveExecuted) {
  const std::string src = numbered_functions(80);
  const auto a = analyze_or_throw(src, make_resource_key("https://a.test/x.js", src));
  ASSERT_EQ(a.units.size(), 80u);
  CoverageRecord rec;
  rec.key = a.key;
  for (int i = 0; i < 55; ++i) rec.executed.insert(a.units[static_cast<std::size_t>(i)].id);
  const auto s = resource_stats(a, rec, Party::kFirst);
  EXPECT_EQ(s.total_functions, 80u);
  EXPECT_EQ(s.executed_functions, 55u);
  EXPECT_EQ(s.superfluous_functions, 25u);
  EXPECT_EQ(s.superfluous_pct, 31.25);
  EXPECT_EQ(s.total_anonymous, 0u);
  EXPECT_EQ(s.anonymous_pct, 0.0);
  std::size_t unexecuted_body_bytes = 0;
  for (std::size_t i = 55; i < 80; ++i) unexecuted_body_bytes += a.units[i].body_span.size();
  EXPECT_EQ(s.superfluous_bytes, unexecuted_body_bytes);
  EXPECT_EQ(s.total_bytes, src.size());
}

TEST(Reporter, UnknownIdsAreNotCounted) {
  const std::string src = numbered_functions(4);
  const auto a = analyze_or_throw(src, make_resource_key("u", src));
  CoverageRecord rec;
  rec.key = a.key;
  rec.executed = {a.units[0].id, "ffffffffffffffff"};
  EXPECT_EQ(resource_stats(a, rec, std::nullopt).executed_functions, 1u);
}

TEST(Reporter, NestedBodiesCountOnce) {
  const std::string src = "function o(){ function i(){ return 1 } return 2 }";
  const auto a = analyze_or_throw(src, make_resource_key("u", src));
  CoverageRecord rec;
  rec.key = a.key;
  EXPECT_EQ(resource_stats(a, rec, std::nullopt).superfluous_bytes, a.units[0].body_span.size());
  rec.executed = {a.units[0].id};
  EXPECT_EQ(resource_stats(a, rec, std::nullopt).superfluous_bytes, a.units[1].body_span.size());
}

TEST(Reporter, KeyMismatchIsRejected) {
  const std::string src = "function f(){}";
  const auto a = analyze_or_throw(src, make_resource_key("u", src));
  CoverageRecord rec;
  rec.key = make_resource_key("u", "other");
  EXPECT_THROW(resource_stats(a, rec, std::nullopt), KeyMismatch);
}

TEST(Reporter, PageAggregateIsByteWeighted) {
  CoverageStore store;
  ResourceCache cache;
  const std::string page = "https://www.site.test/";
  const auto r1 = cached("https://www.site.test/a.js", sized_resource(10, 100));
  const auto r2 = cached("https://static.site.test/b.js", sized_resource(30, 100));
  ASSERT_EQ(r1->decoded_body.size(), 100u);
  cache.put(r1);
  cache.put(r2);
  store.record_beacon(beacon_for(r1->key, {}, page));
  store.record_beacon(beacon_for(r2->key, {}, page));
  const auto report = page_report(store, cache, page, {});
  ASSERT_EQ(report.resources.size(), 2u);
  EXPECT_EQ(report.resources[0].superfluous_bytes_pct + report.resources[1].superfluous_bytes_pct, 40.0);
  EXPECT_EQ(report.page_superfluous_pct(), 20.0);
  EXPECT_EQ(report.first_party.superfluous_bytes_pct(), 20.0);
  EXPECT_EQ(report.first_party.resources, 2u);
  EXPECT_FALSE(report.third_party.superfluous_bytes_pct());
}

TEST(Reporter, PartiesAndSkippedResources) {
  CoverageStore store;
  ResourceCache cache;
  const std::string page = "https://www.site.test/";
  const auto first = cached("https://www.site.test/a.js", "function a(){}");
  const auto third = cached("https://cdn.other.test/b.js", "function b(){} function c(){}");
  const auto broken = cached("https://www.site.test/broken.js", "function (");
  const auto missing = make_resource_key("https://www.site.test/missing.js", "x");
  for (const auto& r : {first, third, broken}) cache.put(r);
  store.record_beacon(beacon_for(first->key, {}, page));
  store.record_beacon(beacon_for(third->key, {}, page));
  store.record_beacon(beacon_for(broken->key, {}, page));
  store.record_beacon(beacon_for(missing, {}, page));
  store.record_beacon(beacon_for(first->key, {}, "https://www.site.test/other"));
  store.record_beacon(beacon_for(cached("https://x.test/o.js", "")->key, {}, std::nullopt));

  std::vector<std::string> skipped;
  const auto report = page_report(store, cache, page, {}, &skipped);
  EXPECT_EQ(report.resources.size(), 2u);
  EXPECT_EQ(skipped.size(), 2u);
  EXPECT_EQ(report.first_party.resources, 1u);
  EXPECT_EQ(report.third_party.resources, 1u);
  EXPECT_EQ(report.third_party.total_functions, 2u);

  ReportOptions overrides;
  overrides.party.first_party = {"*.other.test"};
  EXPECT_EQ(page_report(store, cache, page, overrides).first_party.resources, 2u);

  EXPECT_EQ(known_pages(store), (std::vector<std::string>{page, "https://www.site.test/other"}));
  std::vector<std::string> orphan_skipped;
  const auto orphans = orphan_report(store, cache, {}, &orphan_skipped);
  EXPECT_TRUE(orphans.resources.empty());
  EXPECT_EQ(orphan_skipped.size(), 1u);
}

TEST(Reporter, EmptyPageHasUndefinedPercentages) {
  CoverageStore store;
  ResourceCache cache;
  const auto report = page_report(store, cache, "https://nothing.test/", {});
  EXPECT_TRUE(report.resources.empty());
  EXPECT_FALSE(report.page_superfluous_pct());
  const auto rows = parse_report_csv(report_csv({report}));
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_FALSE(r.pct_defined);
}

TEST(Reporter, NewIdRate) {
  CoverageStore store;
  std::vector<ResourceKey> keys;
  for (int i = 0; i < 25; ++i) keys.push_back(make_resource_key("https://a.test/" + std::to_string(i), "b"));
  for (int i = 0; i < 25; ++i) {
    const auto id = [&](int n) { return sha256_hex(std::to_string(i * 100 + n)).substr(0, 16); };
    store.record_beacon(beacon_for(keys[i], {id(1), id(2), id(3), id(4)}, std::nullopt));
    store.record_beacon(beacon_for(keys[i], i < 3 ? std::vector<FunctionId>{id(5)} : std::vector<FunctionId>{id(1)},
                                   std::nullopt));
  }
  const auto rate = new_id_rate(store);
  ASSERT_EQ(rate.resources.size(), 25u);
  EXPECT_EQ(rate.resources_with_late_ids, 3u);
  EXPECT_EQ(rate.share_with_late_ids, 0.12);
  EXPECT_EQ(100.0 * rate.share_with_late_ids, 12.0);
  std::size_t with_fraction = 0;
  for (const auto& e : rate.resources) {
    if (e.late) {
      EXPECT_EQ(e.executed, 5u);
      EXPECT_EQ(e.fraction, 0.2);
      ++with_fraction;
    } else {
      EXPECT_EQ(e.fraction, 0.0);
    }
  }
  EXPECT_EQ(with_fraction, 3u);
  const auto rows = parse_csv(new_id_csv(rate));
  ASSERT_EQ(rows.size(), 27u);
  EXPECT_EQ(rows.back()[0], "summary");
  EXPECT_EQ(rows.back()[6], "0.12");
}

TEST(Reporter, CsvRoundTrip) {
  std::mt19937_64 rng(4);
  std::vector<PageReport> pages;
  for (int p = 0; p < 3; ++p) {
    PageReport page;
    page.page_url = "https://site.test/page,\"" + std::to_string(p) + "\"\nx";
    for (int i = 0; i < 4; ++i) {
      ResourceStats s;
      s.key = {"https://site.test/r" + std::to_string(i) + ".js?a=1,2", sha256_hex(std::to_string(i))};
      s.party = i % 2 ? std::optional<Party>(Party::kThird) : std::optional<Party>(Party::kFirst);
      s.total_functions = rng() % 1000 + 1;
      s.executed_functions = rng() % s.total_functions;
      s.superfluous_functions = s.total_functions - s.executed_functions;
      s.superfluous_pct = 100.0 * static_cast<double>(s.superfluous_functions) / static_cast<double>(s.total_functions);
      s.total_anonymous = rng() % s.total_functions;
      s.anonymous_pct = 100.0 * static_cast<double>(s.total_anonymous) / static_cast<double>(s.total_functions);
      s.total_bytes = rng() % 100000 + 1;
      s.superfluous_bytes = rng() % s.total_bytes;
      s.superfluous_bytes_pct = 100.0 * static_cast<double>(s.superfluous_bytes) / static_cast<double>(s.total_bytes);
      s.new_ids_after_first_beacon = rng() % 5;
      s.beacon_count = rng() % 10;
      if (p == 1) {
        s.original_gzip_bytes = rng() % 5000;
        s.elided_gzip_bytes = rng() % 5000;
      }
      (s.party == Party::kFirst ? page.first_party : page.third_party).add(s);
      page.all.add(s);
      page.resources.push_back(s);
    }
    pages.push_back(page);
  }
  const std::string csv = report_csv(pages);
  const auto rows = parse_report_csv(csv);
  ASSERT_EQ(rows.size(), 3u * (4u + 3u));
  std::size_t r = 0;
  for (const auto& page : pages) {
    for (const auto& s : page.resources) {
      EXPECT_EQ(rows[r].row_type, "resource");
      EXPECT_EQ(rows[r].page_url, page.page_url);
      EXPECT_EQ(rows[r].stats, s);
      ++r;
    }
    for (const auto* agg : {&page.first_party, &page.third_party, &page.all}) {
      EXPECT_EQ(rows[r].resources, agg->resources);
      EXPECT_EQ(rows[r].stats.superfluous_bytes, agg->superfluous_bytes);
      EXPECT_EQ(rows[r].stats.superfluous_bytes_pct, *agg->superfluous_bytes_pct());
      ++r;
    }
  }
  EXPECT_EQ(rows[7].row_type, "resource");
  EXPECT_EQ(rows[11].row_type, "page_first");
  EXPECT_EQ(rows[13].row_type, "page_all");
  EXPECT_TRUE(rows[13].stats.original_gzip_bytes.has_value());
}

TEST(Reporter, CsvHeaderIsFixed) {
  const auto rows = parse_csv(report_csv({}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].size(), 19u);
  EXPECT_EQ(rows[0][0], "row_type");
  EXPECT_EQ(rows[0][9], "superfluous_pct");
  EXPECT_EQ(rows[0][14], "superfluous_bytes_pct");
  EXPECT_EQ(rows[0][18], "elided_gzip_bytes");
  EXPECT_THROW(parse_report_csv("a,b\n"), Error);
  EXPECT_THROW(parse_csv("\"unterminated"), Error);
}

TEST(Reporter, CdfIsSortedAndCumulative) {
  PageReport page;
  page.page_url = "https://p/";
  for (double v : {50.0, 10.0, 30.0, 20.0}) {
    ResourceStats s;
    s.party = Party::kFirst;
    s.superfluous_pct = v;
    page.resources.push_back(s);
  }
  const auto rows = parse_csv(cdf_csv({page}));
  std::vector<std::pair<std::string, std::string>> got;
  for (const auto& row : rows) {
    if (row[0] == "resource_superfluous_pct" && row[1] == "first") got.emplace_back(row[2], row[3]);
  }
  ASSERT_EQ(got.size(), 4u);
  EXPECT_EQ(got[0], (std::pair<std::string, std::string>{"10", "0.25"}));
  EXPECT_EQ(got[1], (std::pair<std::string, std::string>{"20", "0.5"}));
  EXPECT_EQ(got[3], (std::pair<std::string, std::string>{"50", "1"}));
}

TEST(Reporter, CompressedColumns) {
  CoverageStore store;
  ResourceCache cache;
  std::string big = "function used(){return 1}\nfunction unused(){";
  for (int i = 0; i < 200; ++i) big += "var v" + std::to_string(i) + " = " + std::to_string(i * 7919 % 1000) + ";\n";
  big += "}\nused();\n";
  const auto r = cached("https://site.test/big.js", big);
  cache.put(r);
  const auto a = analyze_or_throw(big, r->key);
  store.record_beacon(beacon_for(r->key, {a.units[0].id}, "https://site.test/"));
  ReportOptions opts;
  opts.compressed = true;
  const auto report = page_report(store, cache, "https://site.test/", opts);
  ASSERT_EQ(report.resources.size(), 1u);
  ASSERT_TRUE(report.resources[0].original_gzip_bytes);
  EXPECT_LT(*report.resources[0].elided_gzip_bytes, *report.resources[0].original_gzip_bytes);
}

TEST(Reporter, FormatDoubleRoundTrips) {
  EXPECT_EQ(format_double(31.25), "31.25");
  EXPECT_EQ(format_double(20.0), "20");
  EXPECT_EQ(format_double(100.0 / 3.0), "33.333333333333336");
}

}  // namespace
}  // namespace jscov
