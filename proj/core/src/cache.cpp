#include "jscov/cache.hpp"

#include <algorithm>
#include <cctype>

#include "json.hpp"
#include "jscov/digest.hpp"
#include "jscov/fsutil.hpp"

namespace jscov {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view url_path(std::string_view url) {
  const std::size_t scheme = url.find("://");
  const std::size_t start = url.find('/', scheme == std::string_view::npos ? 0 : scheme + 3);
  if (start == std::string_view::npos) return "/";
  std::string_view path = url.substr(start);
  return path.substr(0, path.find_first_of("?#"));
}

bool is_content_hash(std::string_view s) {
  return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

json resource_to_json(const CachedResource& r) {
  json headers = json::array();
  for (const auto& [k, v] : r.headers) headers.push_back({k, v});
  json j;
  j["url"] = r.url;
  j["status"] = r.status;
  j["encoding"] = to_string(r.original_encoding);
  j["opaque"] = r.opaque;
  j["content_type"] = r.content_type;
  j["fetched_at"] = r.fetched_at.time_since_epoch().count();
  j["headers"] = std::move(headers);
  return j;
}

}  // namespace

std::optional<std::string> find_header(const HeaderList& headers, std::string_view name) {
  for (const auto& [k, v] : headers) {
    if (k.size() == name.size() &&
        std::equal(k.begin(), k.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        })) {
      return v;
    }
  }
  return std::nullopt;
}

bool CachedResource::is_javascript() const {
  const std::string ct = lower(content_type);
  if (ct.find("javascript") != std::string::npos || ct.find("ecmascript") != std::string::npos) return true;
  if (!ct.empty() && ct.find("octet-stream") == std::string::npos) return false;
  const std::string_view path = url_path(url);
  return path.ends_with(".js") || path.ends_with(".mjs");
}

bool CachedResource::is_css() const {
  const std::string ct = lower(content_type);
  if (ct.find("text/css") != std::string::npos) return true;
  return ct.empty() && url_path(url).ends_with(".css");
}

ResourceCache::ResourceCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(*dir_, ec);
  if (ec) throw IoError("cannot create cache directory " + dir_->string() + ": " + ec.message());
  load_dir();
}

void ResourceCache::load_dir() {
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(*dir_)) {
    if (entry.is_directory() && is_content_hash(entry.path().filename().string()) &&
        fs::exists(entry.path() / "meta")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& d : dirs) {
    const std::string hash = d.filename().string();
    const std::string original = read_file(d / "original");
    if (sha256_hex(original) != hash) throw CorruptState("cache entry " + d.string() + " does not match its hash");
    json meta;
    try {
      meta = json::parse(read_file(d / "meta"));
      if (meta.at("hash").get<std::string>() != hash) throw CorruptState("cache meta hash mismatch in " + d.string());
      for (const auto& jr : meta.at("resources")) {
        auto r = std::make_shared<CachedResource>();
        r->url = jr.at("url").get<std::string>();
        r->key = {r->url, hash};
        r->status = jr.at("status").get<int>();
        r->original_encoding = parse_encoding(jr.at("encoding").get<std::string>());
        r->opaque = jr.at("opaque").get<bool>();
        r->content_type = jr.at("content_type").get<std::string>();
        r->fetched_at = Timestamp(std::chrono::milliseconds(jr.at("fetched_at").get<std::int64_t>()));
        for (const auto& h : jr.at("headers")) r->headers.emplace_back(h.at(0).get<std::string>(), h.at(1).get<std::string>());
        r->decoded_body = original;
        std::shared_ptr<const CachedResource> cr = r;
        by_key_[cr->key] = cr;
        by_hash_[hash].push_back(cr);
        auto& slot = by_url_[cr->url];
        if (!slot || slot->fetched_at <= cr->fetched_at) slot = cr;
      }
    } catch (const json::exception& e) {
      throw CorruptState("cache meta unreadable in " + d.string() + ": " + e.what());
    } catch (const UnsupportedEncoding& e) {
      throw CorruptState("cache meta unreadable in " + d.string() + ": " + e.what());
    }
  }
}

std::shared_ptr<const CachedResource> ResourceCache::find_url(std::string_view url) const {
  std::shared_lock lock(mutex_);
  const auto it = by_url_.find(url);
  return it == by_url_.end() ? nullptr : it->second;
}

std::shared_ptr<const CachedResource> ResourceCache::find(const ResourceKey& key) const {
  std::shared_lock lock(mutex_);
  const auto it = by_key_.find(key);
  return it == by_key_.end() ? nullptr : it->second;
}

std::shared_ptr<const CachedResource> ResourceCache::find_hash(std::string_view content_hash) const {
  std::shared_lock lock(mutex_);
  const auto it = by_hash_.find(content_hash);
  return it == by_hash_.end() || it->second.empty() ? nullptr : it->second.front();
}

std::vector<std::shared_ptr<const CachedResource>> ResourceCache::all() const {
  std::shared_lock lock(mutex_);
  std::vector<std::shared_ptr<const CachedResource>> out;
  out.reserve(by_key_.size());
  for (const auto& [key, r] : by_key_) out.push_back(r);
  return out;
}

std::size_t ResourceCache::size() const {
  std::shared_lock lock(mutex_);
  return by_key_.size();
}

void ResourceCache::put(std::shared_ptr<const CachedResource> resource) {
  const std::string hash = resource->key.content_hash;
  {
    std::unique_lock lock(mutex_);
    by_url_[resource->url] = resource;
    auto& list = by_hash_[hash];
    const auto same = std::find_if(list.begin(), list.end(),
                                   [&](const auto& r) { return r->url == resource->url; });
    if (same != list.end()) {
      *same = resource;
    } else {
      list.push_back(resource);
    }
    by_key_[resource->key] = resource;
  }
  if (!dir_) return;
  std::lock_guard guard(write_mutex_);
  const fs::path d = *dir_ / hash;
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw IoError("cannot create " + d.string() + ": " + ec.message());
  if (!fs::exists(d / "original")) write_file_atomic(d / "original", resource->decoded_body);
  write_meta(hash);
}

void ResourceCache::write_meta(const std::string& hash) {
  json resources = json::array();
  {
    std::shared_lock lock(mutex_);
    for (const auto& r : by_hash_.at(hash)) resources.push_back(resource_to_json(*r));
  }
  json meta;
  meta["hash"] = hash;
  meta["resources"] = std::move(resources);
  write_file_atomic(*dir_ / hash / "meta", meta.dump(2) + "\n");
}

std::optional<fs::path> ResourceCache::variant_path(const ResourceKey& key, std::string_view name) const {
  if (!dir_) return std::nullopt;
  const fs::path d = *dir_ / key.content_hash;
  std::shared_lock lock(mutex_);
  const auto it = by_hash_.find(key.content_hash);
  if (it == by_hash_.end() || it->second.empty() || it->second.front()->url == key.url) return d / std::string(name);
  return d / "alt" / sha256_hex(key.url).substr(0, 16) / std::string(name);
}

void ResourceCache::put_variant(const ResourceKey& key, std::string_view name, std::string_view body) {
  const auto path = variant_path(key, name);
  if (!path) return;
  std::lock_guard guard(write_mutex_);
  std::error_code ec;
  fs::create_directories(path->parent_path(), ec);
  if (ec) throw IoError("cannot create " + path->parent_path().string() + ": " + ec.message());
  write_file_atomic(*path, body);
}

void ResourceCache::put_sidecar(const ResourceKey& key, const FunctionId& id, std::string_view text) {
  if (!dir_) return;
  const fs::path d = *dir_ / key.content_hash / "sidecars";
  std::lock_guard guard(write_mutex_);
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec) throw IoError("cannot create " + d.string() + ": " + ec.message());
  write_file_atomic(d / id, text);
}

}  // namespace jscov
