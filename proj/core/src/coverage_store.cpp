#include "jscov/coverage_store.hpp"

#include <algorithm>

#include "json.hpp"
#include "jscov/digest.hpp"
#include "jscov/fsutil.hpp"

namespace jscov {

namespace {

using json = nlohmann::json;

constexpr std::string_view kHeader = "jscov-coverage-store 1\n";
constexpr std::string_view kFooterPrefix = "#checksum sha256 ";

bool is_lower_hex(std::string_view s, std::size_t len) {
  return s.size() == len && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

std::int64_t to_ms(Timestamp t) { return t.time_since_epoch().count(); }
Timestamp from_ms(std::int64_t ms) { return Timestamp(std::chrono::milliseconds(ms)); }

json record_to_json(const CoverageRecord& r) {
  json ids = json::array();
  for (const auto& id : r.executed) {
    const auto it = r.first_beacon.find(id);
    ids.push_back({id, it == r.first_beacon.end() ? 0 : it->second});
  }
  json j;
  j["url"] = r.key.url;
  j["hash"] = r.key.content_hash;
  j["beacons"] = r.beacon_count;
  j["first_seen"] = to_ms(r.first_seen);
  j["last_updated"] = to_ms(r.last_updated);
  j["ids"] = std::move(ids);
  j["pages"] = r.pages;
  return j;
}

CoverageRecord record_from_json(const json& j) {
  CoverageRecord r;
  r.key.url = j.at("url").get<std::string>();
  r.key.content_hash = j.at("hash").get<std::string>();
  r.beacon_count = j.at("beacons").get<std::uint64_t>();
  r.first_seen = from_ms(j.at("first_seen").get<std::int64_t>());
  r.last_updated = from_ms(j.at("last_updated").get<std::int64_t>());
  for (const auto& entry : j.at("ids")) {
    const auto id = entry.at(0).get<std::string>();
    const auto first = entry.at(1).get<std::uint64_t>();
    if (first < 1 || first > r.beacon_count) throw CorruptState("first beacon index out of range for " + id);
    r.executed.insert(id);
    r.first_beacon[id] = first;
  }
  for (const auto& page : j.at("pages")) r.pages.insert(page.get<std::string>());
  return r;
}

}  // namespace

Timestamp now_ms() { return std::chrono::time_point_cast<std::chrono::milliseconds>(Clock::now()); }

CoverageBeacon parse_beacon(std::string_view body, Timestamp received_at) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw MalformedBeacon("beacon is not a JSON object");
  const auto v = j.find("v");
  if (v == j.end() || !v->is_number_integer()) throw MalformedBeacon("beacon has no integer version");
  if (v->get<std::int64_t>() != 1) throw UnsupportedVersion("unsupported beacon version " + v->dump());

  CoverageBeacon beacon;
  beacon.version = 1;
  beacon.received_at = received_at;
  const auto key = j.find("key");
  if (key == j.end() || !key->is_object()) throw MalformedBeacon("beacon has no key");
  const auto url = key->find("url");
  const auto hash = key->find("hash");
  if (url == key->end() || !url->is_string() || hash == key->end() || !hash->is_string()) {
    throw MalformedBeacon("beacon key needs string url and hash");
  }
  beacon.key.url = url->get<std::string>();
  beacon.key.content_hash = hash->get<std::string>();
  if (!is_lower_hex(beacon.key.content_hash, 64)) throw MalformedBeacon("beacon hash is not a sha256 hex digest");

  const auto ids = j.find("ids");
  if (ids == j.end() || !ids->is_array()) throw MalformedBeacon("beacon ids is not a list");
  beacon.ids.reserve(ids->size());
  for (const auto& id : *ids) {
    if (!id.is_string() || !is_lower_hex(id.get_ref<const std::string&>(), 16)) {
      throw MalformedBeacon("beacon id is not a function id: " + id.dump());
    }
    beacon.ids.push_back(id.get<std::string>());
  }
  const auto page = j.find("page");
  if (page != j.end() && page->is_string()) beacon.page_url = page->get<std::string>();
  return beacon;
}

std::string beacon_to_json(const CoverageBeacon& beacon) {
  nlohmann::ordered_json j;
  j["v"] = beacon.version;
  j["key"] = {{"url", beacon.key.url}, {"hash", beacon.key.content_hash}};
  j["ids"] = beacon.ids;
  j["page"] = beacon.page_url ? nlohmann::ordered_json(*beacon.page_url) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

std::size_t CoverageRecord::new_ids_in_beacon(std::uint64_t n) const {
  return static_cast<std::size_t>(std::count_if(first_beacon.begin(), first_beacon.end(),
                                                [n](const auto& e) { return e.second == n; }));
}

std::size_t CoverageRecord::late_ids() const {
  return static_cast<std::size_t>(std::count_if(first_beacon.begin(), first_beacon.end(),
                                                [](const auto& e) { return e.second >= 2; }));
}

ResourcePhase phase_of(const CoverageRecord* record, const PhasePolicy& policy) {
  if (policy.freeze || record == nullptr) return ResourcePhase::kLearning;
  return record->beacon_count >= std::max<std::uint64_t>(policy.min_beacons, 1) ? ResourcePhase::kElided
                                                                                : ResourcePhase::kLearning;
}

CoverageStore::CoverageStore(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(*path_)) deserialize(read_file(*path_));
}

CoverageRecord CoverageStore::record_beacon(const CoverageBeacon& beacon) {
  if (beacon.version != 1) throw UnsupportedVersion("unsupported beacon version " + std::to_string(beacon.version));
  CoverageRecord snapshot;
  {
    std::unique_lock lock(mutex_);
    auto [it, inserted] = records_.try_emplace(beacon.key);
    CoverageRecord& r = it->second;
    if (inserted) {
      r.key = beacon.key;
      r.first_seen = beacon.received_at;
    }
    ++r.beacon_count;
    r.last_updated = std::max(r.last_updated, beacon.received_at);
    for (const auto& id : beacon.ids) {
      if (r.executed.insert(id).second) r.first_beacon[id] = r.beacon_count;
    }
    if (beacon.page_url) r.pages.insert(*beacon.page_url);
    ++version_;
    snapshot = r;
  }
  persist();
  return snapshot;
}

void CoverageStore::persist() {
  if (!path_) return;
  std::lock_guard guard(persist_mutex_);
  std::string text;
  std::uint64_t version = 0;
  {
    std::shared_lock lock(mutex_);
    if (version_ == persisted_version_) return;  // a later writer already saved our update
    version = version_;
    text = serialize();
  }
  write_file_atomic(*path_, text);
  persisted_version_ = version;
}

std::set<FunctionId> CoverageStore::executed_ids(const ResourceKey& key) const {
  std::shared_lock lock(mutex_);
  const auto it = records_.find(key);
  return it == records_.end() ? std::set<FunctionId>{} : it->second.executed;
}

std::optional<CoverageRecord> CoverageStore::record(const ResourceKey& key) const {
  std::shared_lock lock(mutex_);
  const auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<CoverageRecord> CoverageStore::records() const {
  std::shared_lock lock(mutex_);
  std::vector<CoverageRecord> out;
  out.reserve(records_.size());
  for (const auto& [key, r] : records_) out.push_back(r);
  return out;
}

std::size_t CoverageStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

ResourcePhase CoverageStore::phase(const ResourceKey& key, const PhasePolicy& policy) const {
  std::shared_lock lock(mutex_);
  const auto it = records_.find(key);
  return phase_of(it == records_.end() ? nullptr : &it->second, policy);
}

std::string CoverageStore::serialize() const {
  std::string body(kHeader);
  for (const auto& [key, r] : records_) {
    body += record_to_json(r).dump(-1, ' ', true);
    body += '\n';
  }
  body += kFooterPrefix;
  body += sha256_hex(body.substr(0, body.size() - kFooterPrefix.size()));
  body += " records ";
  body += std::to_string(records_.size());
  body += '\n';
  return body;
}

void CoverageStore::deserialize(std::string_view text) {
  if (!text.starts_with(kHeader)) throw CorruptState("coverage store header missing or unsupported");
  if (!text.ends_with('\n')) throw CorruptState("coverage store is truncated");
  const std::size_t footer = text.rfind(kFooterPrefix);
  if (footer == std::string_view::npos || (footer > 0 && text[footer - 1] != '\n')) {
    throw CorruptState("coverage store footer missing");
  }
  const std::string_view payload = text.substr(0, footer);
  std::string_view tail = text.substr(footer + kFooterPrefix.size());
  tail.remove_suffix(1);
  const std::size_t space = tail.find(' ');
  if (space == std::string_view::npos || !tail.substr(space).starts_with(" records ")) {
    throw CorruptState("coverage store footer malformed");
  }
  if (tail.substr(0, space) != sha256_hex(payload)) throw CorruptState("coverage store checksum mismatch");
  std::size_t expected = 0;
  try {
    expected = std::stoull(std::string(tail.substr(space + 9)));
  } catch (const std::exception&) {
    throw CorruptState("coverage store record count malformed");
  }

  std::map<ResourceKey, CoverageRecord> loaded;
  std::size_t pos = kHeader.size();
  while (pos < payload.size()) {
    const std::size_t nl = payload.find('\n', pos);
    if (nl == std::string_view::npos) throw CorruptState("coverage store record line unterminated");
    try {
      CoverageRecord r = record_from_json(json::parse(payload.substr(pos, nl - pos)));
      ResourceKey key = r.key;
      if (!loaded.emplace(std::move(key), std::move(r)).second) throw CorruptState("duplicate record");
    } catch (const json::exception& e) {
      throw CorruptState(std::string("coverage store record unreadable: ") + e.what());
    }
    pos = nl + 1;
  }
  if (loaded.size() != expected) throw CorruptState("coverage store record count mismatch");

  std::unique_lock lock(mutex_);
  records_ = std::move(loaded);
  ++version_;
}

void CoverageStore::save(const std::filesystem::path& path) const {
  std::string text;
  {
    std::shared_lock lock(mutex_);
    text = serialize();
  }
  write_file_atomic(path, text);
}

std::unique_ptr<CoverageStore> CoverageStore::load(const std::filesystem::path& path) {
  auto store = std::make_unique<CoverageStore>();
  store->deserialize(read_file(path));
  return store;
}

}  // namespace jscov
