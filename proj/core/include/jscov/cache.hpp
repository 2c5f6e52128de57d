#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jscov/analyzer.hpp"
#include "jscov/codec.hpp"
#include "jscov/coverage_store.hpp"

namespace jscov {

using HeaderList = std::vector<std::pair<std::string, std::string>>;

// Case-insensitive lookup of the first header with this name.
std::optional<std::string> find_header(const HeaderList& headers, std::string_view name);

struct CachedResource {
  ResourceKey key;
  std::string url;
  int status = 200;
  HeaderList headers;  // as received from the origin
  std::string decoded_body;
  Encoding original_encoding = Encoding::kIdentity;
  // The body could not be decoded; decoded_body holds the raw bytes and the
  // resource is passed through untouched.
  bool opaque = false;
  std::string content_type;
  Timestamp fetched_at{};

  bool is_javascript() const;
  bool is_css() const;
};

// Resources by URL and by key, mirrored to
// <dir>/<content_hash>/{original,instrumented,elided,meta}. When one body is
// served under several URLs, the first URL's variants sit directly in the
// hash directory and the others under alt/<url digest>/.
class ResourceCache {
 public:
  ResourceCache() = default;
  // Loads every resource already present under `dir`. Throws IoError or
  // CorruptState.
  explicit ResourceCache(std::filesystem::path dir);

  std::shared_ptr<const CachedResource> find_url(std::string_view url) const;
  std::shared_ptr<const CachedResource> find(const ResourceKey& key) const;
  // Any resource with this body hash.
  std::shared_ptr<const CachedResource> find_hash(std::string_view content_hash) const;
  std::vector<std::shared_ptr<const CachedResource>> all() const;
  std::size_t size() const;

  // Replaces any entry for the same URL. Throws IoError.
  void put(std::shared_ptr<const CachedResource> resource);
  // Throws IoError. No-ops for an in-memory cache.
  void put_variant(const ResourceKey& key, std::string_view name, std::string_view body);
  void put_sidecar(const ResourceKey& key, const FunctionId& id, std::string_view text);

  std::optional<std::filesystem::path> variant_path(const ResourceKey& key, std::string_view name) const;
  const std::optional<std::filesystem::path>& dir() const { return dir_; }

 private:
  void load_dir();
  void write_meta(const std::string& hash);

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const CachedResource>, std::less<>> by_url_;
  std::map<ResourceKey, std::shared_ptr<const CachedResource>> by_key_;
  // Insertion order per hash; the first URL owns the top-level variants.
  std::map<std::string, std::vector<std::shared_ptr<const CachedResource>>, std::less<>> by_hash_;
  // Disk writes for one hash directory are serialized.
  std::mutex write_mutex_;
};

}  // namespace jscov
