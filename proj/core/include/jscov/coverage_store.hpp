#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "jscov/analyzer.hpp"

namespace jscov {

using Clock = std::chrono::system_clock;
using Timestamp = std::chrono::time_point<Clock, std::chrono::milliseconds>;

Timestamp now_ms();

struct CoverageBeacon {
  int version = 1;
  ResourceKey key;
  std::vector<FunctionId> ids;
  std::optional<std::string> page_url;
  Timestamp received_at{};
};

// Parses the wire format {"v":1,"key":{"url":..,"hash":..},"ids":[..],"page":..}.
// Throws UnsupportedVersion or MalformedBeacon.
CoverageBeacon parse_beacon(std::string_view body, Timestamp received_at);
std::string beacon_to_json(const CoverageBeacon& beacon);

struct CoverageRecord {
  ResourceKey key;
  std::set<FunctionId> executed;
  std::uint64_t beacon_count = 0;
  Timestamp first_seen{};
  Timestamp last_updated{};
  // 1-based index of the beacon that first reported each executed id.
  std::map<FunctionId, std::uint64_t> first_beacon;
  std::set<std::string> pages;

  // Ids first reported by beacon n (1-based); 0 when n is out of range.
  std::size_t new_ids_in_beacon(std::uint64_t n) const;
  // Ids first reported by beacon 2 or later.
  std::size_t late_ids() const;

  friend bool operator==(const CoverageRecord&, const CoverageRecord&) = default;
};

enum class ResourcePhase { kLearning, kElided };

struct PhasePolicy {
  std::uint64_t min_beacons = 5;
  bool freeze = false;
};

ResourcePhase phase_of(const CoverageRecord* record, const PhasePolicy& policy);

class CoverageStore {
 public:
  // In-memory store; nothing is persisted.
  CoverageStore() = default;
  // Loads `path` if it exists and rewrites it after every beacon.
  explicit CoverageStore(std::filesystem::path path);

  CoverageStore(const CoverageStore&) = delete;
  CoverageStore& operator=(const CoverageStore&) = delete;

  // Returns the updated record once it is durable. Throws UnsupportedVersion,
  // or IoError when persisting fails.
  CoverageRecord record_beacon(const CoverageBeacon& beacon);

  std::set<FunctionId> executed_ids(const ResourceKey& key) const;
  std::optional<CoverageRecord> record(const ResourceKey& key) const;
  std::vector<CoverageRecord> records() const;
  std::size_t size() const;
  ResourcePhase phase(const ResourceKey& key, const PhasePolicy& policy) const;

  // Throws IoError.
  void save(const std::filesystem::path& path) const;
  // Throws IoError, or CorruptState on any checksum or format problem, in
  // which case nothing is loaded.
  static std::unique_ptr<CoverageStore> load(const std::filesystem::path& path);

  std::string serialize() const;
  // Replaces the contents. Throws CorruptState.
  void deserialize(std::string_view text);

 private:
  void persist();

  mutable std::shared_mutex mutex_;
  std::map<ResourceKey, CoverageRecord> records_;
  std::uint64_t version_ = 0;

  std::optional<std::filesystem::path> path_;
  std::mutex persist_mutex_;
  std::uint64_t persisted_version_ = 0;
};

}  // namespace jscov
