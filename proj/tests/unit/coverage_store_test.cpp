#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <thread>

#include "jscov/coverage_store.hpp"
#include "jscov/digest.hpp"
#include "jscov/fsutil.hpp"
#include "test_support.hpp"

namespace jscov {
namespace {

namespace fs = std::filesystem;

ResourceKey key_n(int n) {
  return {"https://site.test/r" + std::to_string(n) + ".js", sha256_hex("body" + std::to_string(n))};
}

FunctionId id_n(int n) {
  return sha256_hex("id" + std::to_string(n)).substr(0, 16);
}

CoverageBeacon beacon(const ResourceKey& key, std::vector<FunctionId> ids, std::optional<std::string> page = {},
                      std::int64_t at_ms = 1000) {
  CoverageBeacon b;
  b.key = key;
  b.ids = std::move(ids);
  b.page_url = std::move(page);
  b.received_at = Timestamp(std::chrono::milliseconds(at_ms));
  return b;
}

std::vector<CoverageBeacon> random_beacons(std::mt19937_64& rng, int count) {
  std::vector<CoverageBeacon> out;
  for (int i = 0; i < count; ++i) {
    std::vector<FunctionId> ids;
    const int n = static_cast<int>(rng() % 6);
    for (int k = 0; k < n; ++k) ids.push_back(id_n(static_cast<int>(rng() % 20)));
    out.push_back(beacon(key_n(static_cast<int>(rng() % 4)), ids,
                         "https://site.test/p" + std::to_string(rng() % 3), static_cast<std::int64_t>(1000 + i)));
  }
  return out;
}

TEST(Beacon, ParsesWireFormat) {
  const std::string hash = sha256_hex("x");
  const auto b = parse_beacon(R"({"v":1,"key":{"url":"https://a.test/x.js","hash":")" + hash +
                                  R"("},"ids":["0123456789abcdef","0123456789abcdef"],"page":"https://a.test/"})",
                              Timestamp{});
  EXPECT_EQ(b.version, 1);
  EXPECT_EQ(b.key.url, "https://a.test/x.js");
  EXPECT_EQ(b.key.content_hash, hash);
  EXPECT_EQ(b.ids.size(), 2u);
  EXPECT_EQ(b.page_url, "https://a.test/");
  const auto again = parse_beacon(beacon_to_json(b), Timestamp{});
  EXPECT_EQ(again.key, b.key);
  EXPECT_EQ(again.ids, b.ids);
  EXPECT_EQ(again.page_url, b.page_url);
}

TEST(Beacon, RejectsBadInput) {
  const std::string hash = sha256_hex("x");
  const std::string key = R"("key":{"url":"u","hash":")" + hash + R"("})";
  EXPECT_THROW(parse_beacon("not json", {}), MalformedBeacon);
  EXPECT_THROW(parse_beacon("[]", {}), MalformedBeacon);
  EXPECT_THROW(parse_beacon("{" + key + R"(,"ids":[]})", {}), MalformedBeacon);
  EXPECT_THROW(parse_beacon(R"({"v":"1",)" + key + R"(,"ids":[]})", {}), MalformedBeacon);
  EXPECT_THROW(parse_beacon(R"({"v":2,)" + key + R"(,"ids":[]})", {}), UnsupportedVersion);
  EXPECT_THROW(parse_beacon(R"({"v":1,"key":{"url":"u","hash":"ABC"},"ids":[]})", {}), MalformedBeacon);
  EXPECT_THROW(parse_beacon(R"({"v":1,"key":{"url":"u","hash":")" + std::string(64, 'A') + R"("},"ids":[]})", {}),
               MalformedBeacon);
  EXPECT_THROW(parse_beacon(R"({"v":1,)" + key + R"(,"ids":["xyz"]})", {}), MalformedBeacon);
  EXPECT_THROW(parse_beacon(R"({"v":1,)" + key + R"(,"ids":[12]})", {}), MalformedBeacon);
  EXPECT_THROW(parse_beacon(R"({"v":1,)" + key + R"(,"ids":{}})", {}), MalformedBeacon);
  EXPECT_NO_THROW(parse_beacon(R"({"v":1,)" + key + R"(,"ids":[],"page":null,"extra":true})", {}));
}

TEST(CoverageStore, RecordsUnionAndCounts) {
  CoverageStore store;
  const auto k = key_n(1);
  store.record_beacon(beacon(k, {id_n(1), id_n(2)}, "https://p/", 10));
  const auto r = store.record_beacon(beacon(k, {id_n(2), id_n(3)}, {}, 20));
  EXPECT_EQ(r.beacon_count, 2u);
  EXPECT_EQ(r.executed, (std::set<FunctionId>{id_n(1), id_n(2), id_n(3)}));
  EXPECT_EQ(r.first_beacon.at(id_n(1)), 1u);
  EXPECT_EQ(r.first_beacon.at(id_n(3)), 2u);
  EXPECT_EQ(r.new_ids_in_beacon(1), 2u);
  EXPECT_EQ(r.new_ids_in_beacon(2), 1u);
  EXPECT_EQ(r.new_ids_in_beacon(3), 0u);
  EXPECT_EQ(r.late_ids(), 1u);
  EXPECT_EQ(r.first_seen.time_since_epoch().count(), 10);
  EXPECT_EQ(r.last_updated.time_since_epoch().count(), 20);
  EXPECT_EQ(r.pages, (std::set<std::string>{"https://p/"}));
  EXPECT_EQ(store.executed_ids(key_n(2)), std::set<FunctionId>{});
  EXPECT_FALSE(store.record(key_n(2)));
}

TEST(CoverageStore, EmptyBeaconStillCounts) {
  CoverageStore store;
  const auto r = store.record_beacon(beacon(key_n(1), {}));
  EXPECT_EQ(r.beacon_count, 1u);
  EXPECT_TRUE(r.executed.empty());
}

TEST(CoverageStoreProperty, BeaconOrderDoesNotMatter) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto beacons = random_beacons(rng, 1 + static_cast<int>(rng() % 30));
    CoverageStore a;
    for (const auto& b : beacons) a.record_beacon(b);
    std::shuffle(beacons.begin(), beacons.end(), rng);
    CoverageStore b;
    for (const auto& x : beacons) b.record_beacon(x);
    const auto ra = a.records();
    const auto rb = b.records();
    ASSERT_EQ(ra.size(), rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
      EXPECT_EQ(ra[i].key, rb[i].key);
      EXPECT_EQ(ra[i].executed, rb[i].executed);
      EXPECT_EQ(ra[i].beacon_count, rb[i].beacon_count);
      EXPECT_EQ(ra[i].pages, rb[i].pages);
      EXPECT_EQ(a.phase(ra[i].key, {}), b.phase(rb[i].key, {}));
    }
  }
}

TEST(CoverageStoreProperty, ExecutedSetOnlyGrows) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    CoverageStore store;
    std::map<ResourceKey, std::set<FunctionId>> expected;
    for (const auto& b : random_beacons(rng, 40)) {
      const auto before = store.executed_ids(b.key);
      const auto rec = store.record_beacon(b);
      expected[b.key].insert(b.ids.begin(), b.ids.end());
      EXPECT_TRUE(std::includes(rec.executed.begin(), rec.executed.end(), before.begin(), before.end()));
      EXPECT_EQ(rec.executed, expected[b.key]);
    }
  }
}

TEST(CoverageStore, PhaseFlipsAtMinBeacons) {
  CoverageStore store;
  const auto k = key_n(7);
  EXPECT_EQ(store.phase(k, {}), ResourcePhase::kLearning);
  for (int i = 1; i <= 6; ++i) {
    store.record_beacon(beacon(k, {id_n(i)}));
    EXPECT_EQ(store.phase(k, {}), i >= 5 ? ResourcePhase::kElided : ResourcePhase::kLearning) << i;
    EXPECT_EQ(store.phase(k, {5, true}), ResourcePhase::kLearning);
    EXPECT_EQ(store.phase(k, {3, false}), i >= 3 ? ResourcePhase::kElided : ResourcePhase::kLearning);
  }
  EXPECT_EQ(PhasePolicy{}.min_beacons, 5u);
  EXPECT_EQ(phase_of(nullptr, {}), ResourcePhase::kLearning);
}

TEST(CoverageStore, SerializeRoundTrip) {
  std::mt19937_64 rng(5);
  CoverageStore store;
  for (const auto& b : random_beacons(rng, 50)) store.record_beacon(b);
  store.record_beacon(beacon({"https://site.test/\xC3\xBC.js?a=\"b\"", sha256_hex("u")}, {id_n(1)}, "p\n"));
  const std::string text = store.serialize();
  EXPECT_TRUE(text.starts_with("jscov-coverage-store 1\n"));
  CoverageStore copy;
  copy.deserialize(text);
  EXPECT_EQ(copy.records(), store.records());
  EXPECT_EQ(copy.serialize(), text);
}

TEST(CoverageStoreProperty, TruncationIsAlwaysDetected) {
  std::mt19937_64 rng(6);
  CoverageStore store;
  for (const auto& b : random_beacons(rng, 12)) store.record_beacon(b);
  const std::string text = store.serialize();
  for (std::size_t len = 0; len < text.size(); ++len) {
    CoverageStore target;
    target.record_beacon(beacon(key_n(99), {id_n(1)}));
    EXPECT_THROW(target.deserialize(std::string_view(text).substr(0, len)), CorruptState) << len;
    // a failed load leaves the previous contents alone
    EXPECT_EQ(target.size(), 1u);
  }
}

TEST(CoverageStoreProperty, ByteFlipsAreDetected) {
  std::mt19937_64 rng(8);
  CoverageStore store;
  for (const auto& b : random_beacons(rng, 12)) store.record_beacon(b);
  const std::string text = store.serialize();
  for (int i = 0; i < 500; ++i) {
    std::string bad = text;
    const std::size_t at = rng() % bad.size();
    bad[at] = static_cast<char>(bad[at] ^ (1 + rng() % 255));
    CoverageStore target;
    EXPECT_THROW(target.deserialize(bad), CorruptState) << at;
  }
}

TEST(CoverageStore, PersistsEveryBeaconAtomically) {
  testing::TempDir dir;
  const fs::path path = dir.path() / "store";
  {
    CoverageStore store(path);
    for (int i = 0; i < 5; ++i) {
      store.record_beacon(beacon(key_n(1), {id_n(i)}));
      // durable as soon as record_beacon returns
      const auto loaded = CoverageStore::load(path);
      EXPECT_EQ(loaded->record(key_n(1))->beacon_count, static_cast<std::uint64_t>(i + 1));
    }
  }
  // no temporary files left behind
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1);
  CoverageStore reopened(path);
  EXPECT_EQ(reopened.phase(key_n(1), {}), ResourcePhase::kElided);
  EXPECT_EQ(reopened.executed_ids(key_n(1)).size(), 5u);
}

TEST(CoverageStore, InjectedTruncationOnDiskIsRejected) {
  testing::TempDir dir;
  const fs::path path = dir.path() / "store";
  {
    CoverageStore store(path);
    for (int i = 0; i < 4; ++i) store.record_beacon(beacon(key_n(i), {id_n(i)}));
  }
  const std::string full = read_file(path);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const std::size_t len = rng() % full.size();
    {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out.write(full.data(), static_cast<std::streamsize>(len));
    }
    EXPECT_THROW(CoverageStore::load(path), CorruptState) << len;
    EXPECT_THROW(CoverageStore{path}, CorruptState) << len;
  }
  write_file_atomic(path, full);
  EXPECT_EQ(CoverageStore::load(path)->size(), 4u);
}

TEST(CoverageStore, MissingFileStartsEmptyButLoadFails) {
  testing::TempDir dir;
  CoverageStore store(dir.path() / "absent");
  EXPECT_EQ(store.size(), 0u);
  EXPECT_THROW(CoverageStore::load(dir.path() / "absent"), IoError);
}

TEST(CoverageStore, ConcurrentBeaconsAreAllCounted) {
  testing::TempDir dir;
  for (const bool on_disk : {false, true}) {
    std::unique_ptr<CoverageStore> store =
        on_disk ? std::make_unique<CoverageStore>(dir.path() / "s") : std::make_unique<CoverageStore>();
    const int threads = 8;
    const int per_thread = on_disk ? 25 : 500;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int i = 0; i < per_thread; ++i) {
          store->record_beacon(beacon(key_n(i % 3), {id_n(t * 1000 + i)}));
          (void)store->executed_ids(key_n(i % 3));
        }
      });
    }
    for (auto& th : pool) th.join();
    std::uint64_t beacons = 0;
    std::size_t ids = 0;
    for (const auto& r : store->records()) {
      beacons += r.beacon_count;
      ids += r.executed.size();
      for (const auto& [id, n] : r.first_beacon) {
        EXPECT_GE(n, 1u);
        EXPECT_LE(n, r.beacon_count);
      }
    }
    EXPECT_EQ(beacons, static_cast<std::uint64_t>(threads * per_thread));
    EXPECT_EQ(ids, static_cast<std::size_t>(threads * per_thread));
    if (on_disk) EXPECT_EQ(CoverageStore::load(dir.path() / "s")->records(), store->records());
  }
}

}  // namespace
}  // namespace jscov
