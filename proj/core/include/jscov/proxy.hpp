#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "jscov/analyzer.hpp"
#include "jscov/cache.hpp"
#include "jscov/coverage_store.hpp"
#include "jscov/party.hpp"
#include "jscov/runtime.hpp"
#include "jscov/transformer.hpp"
#include "jscov/url.hpp"

namespace jscov {

class CertificateAuthority;

enum class ServeMode { kOriginal, kAuto, kForcedElided };

std::string_view to_string(ServeMode mode);
// "original", "auto" or "forced-elided". Throws Error.
ServeMode parse_serve_mode(std::string_view text);

struct HttpRequest {
  std::string method = "GET";
  std::string scheme = "http";  // of the listener that received the request
  std::string target = "/";     // origin-form or absolute-form
  HeaderList headers;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  HeaderList headers;
  std::string body;
};

struct OriginResponse {
  int status = 0;
  HeaderList headers;
  std::string body;  // still content-encoded
};

// Performs one origin request. Throws OriginUnreachable when no response
// arrives.
using OriginFetcher = std::function<OriginResponse(const std::string& method, const std::string& url,
                                                   const HeaderList& headers, const std::string& body)>;

struct UpstreamOptions {
  // "host" or "host:port" -> "scheme://addr:port"; requests for the host are
  // sent there with the original Host header.
  std::map<std::string, std::string> origin_map;
  bool verify_tls = true;
  std::chrono::seconds timeout{30};
};

// Real HTTP(S) client built on cpp-httplib.
OriginFetcher make_http_fetcher(UpstreamOptions options);

using LogSink = std::function<void(std::string_view)>;

struct ProxyConfig {
  ServeMode mode = ServeMode::kAuto;
  PhasePolicy phase;
  ElisionPolicy elision;
  std::vector<std::string> first_party;
  RuntimeTemplates runtime = RuntimeTemplates::defaults();
  LogSink log;
};

struct ProxyCounters {
  std::uint64_t origin_requests = 0;
  std::uint64_t beacons = 0;
  std::uint64_t sidecars = 0;
  std::uint64_t transforms = 0;       // instrument/elide computations
  std::uint64_t transform_failures = 0;
};

// Request routing and resource handling, independent of sockets.
class Proxy {
 public:
  Proxy(ProxyConfig config, CoverageStore& store, ResourceCache& cache, OriginFetcher fetcher);

  HttpResponse serve(const HttpRequest& request);
  HttpResponse serve(const HttpRequest& request, ServeMode mode);

  // Cached copy of a GET for `url`, fetching it on first use. Concurrent
  // callers for the same URL share one origin request. Non-200 responses
  // are returned but not cached. Throws OriginUnreachable (also for 5xx).
  // `refresh` skips the cache; a changed body gets a new ResourceKey and so
  // starts with no coverage.
  std::shared_ptr<const CachedResource> fetch_origin(const std::string& url, const HeaderList& headers = {},
                                                     bool refresh = false);

  // Variant bodies; nullopt when the resource cannot be transformed.
  std::optional<std::string> instrumented_body(const CachedResource& resource);
  std::optional<std::string> elided_body(const CachedResource& resource);
  std::optional<std::string> sidecar_body(std::string_view content_hash, std::string_view id);

  ProxyCounters counters() const;
  const ProxyConfig& config() const { return config_; }

 private:
  struct FetchSlot {
    std::mutex mutex;
  };
  struct TransformSlot {
    std::mutex mutex;
    bool analyzed = false;
    std::shared_ptr<const ResourceAnalysis> analysis;  // null when parsing failed
    std::optional<std::string> instrumented;
    std::optional<std::string> elided;
    std::set<FunctionId> elided_for;
  };

  HttpResponse serve_beacon(const HttpRequest& request);
  HttpResponse serve_sidecar(std::string_view path);
  HttpResponse serve_resource(const HttpRequest& request, const std::string& url, ServeMode mode);
  std::shared_ptr<TransformSlot> slot_for(const ResourceKey& key);
  // Caller holds slot.mutex.
  const ResourceAnalysis* analysis_locked(TransformSlot& slot, const CachedResource& resource);
  void log(std::string_view message) const;

  ProxyConfig config_;
  CoverageStore& store_;
  ResourceCache& cache_;
  OriginFetcher fetcher_;

  std::mutex slots_mutex_;
  std::map<std::string, std::shared_ptr<FetchSlot>, std::less<>> fetch_slots_;
  std::map<ResourceKey, std::shared_ptr<TransformSlot>> transform_slots_;

  std::atomic<std::uint64_t> origin_requests_{0};
  std::atomic<std::uint64_t> beacons_{0};
  std::atomic<std::uint64_t> sidecars_{0};
  std::atomic<std::uint64_t> transforms_{0};
  std::atomic<std::uint64_t> transform_failures_{0};
};

// Sockets: serves a Proxy over HTTP and, with a CA, over HTTPS.
class ProxyServer {
 public:
  explicit ProxyServer(Proxy& proxy);
  ~ProxyServer();
  ProxyServer(const ProxyServer&) = delete;
  ProxyServer& operator=(const ProxyServer&) = delete;

  // Binds; port 0 picks a free port. Returns the bound port or throws Error.
  int bind_http(const std::string& host, int port);
  int bind_https(const std::string& host, int port, std::shared_ptr<CertificateAuthority> ca);
  // Starts the accept loops on background threads.
  void start();
  void stop();
  // Blocks until stop() is called from elsewhere.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace jscov
