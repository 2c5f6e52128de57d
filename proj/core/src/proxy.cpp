#include "jscov/proxy.hpp"

#include <algorithm>
#include <cctype>

namespace jscov {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) { return a.size() == b.size() && lower(a) == lower(b); }

bool is_lower_hex(std::string_view s, std::size_t len) {
  return s.size() == len && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

constexpr std::string_view kForwardedRequestHeaders[] = {
    "user-agent", "accept", "accept-language", "cookie", "referer", "authorization", "origin", "content-type",
};

constexpr std::string_view kHopByHop[] = {
    "connection", "keep-alive", "proxy-authenticate", "proxy-authorization", "proxy-connection",
    "te",         "trailer",    "transfer-encoding",  "upgrade",             "content-length",
};

// Validators and caching hints that describe the origin bytes, not ours.
constexpr std::string_view kOriginBodyHeaders[] = {
    "etag", "last-modified", "content-md5", "digest", "cache-control", "expires", "age", "content-range", "accept-ranges",
};

template <std::size_t N>
bool in_list(std::string_view name, const std::string_view (&list)[N]) {
  const std::string l = lower(name);
  return std::find(std::begin(list), std::end(list), l) != std::end(list);
}

HeaderList forward_headers(const HeaderList& in) {
  HeaderList out;
  for (const auto& [k, v] : in) {
    if (in_list(k, kForwardedRequestHeaders)) out.emplace_back(k, v);
  }
  out.emplace_back("Accept-Encoding", "gzip, br");
  out.emplace_back("Via", "1.1 jscov");
  return out;
}

void add_cors(HttpResponse& res) {
  res.headers.emplace_back("Access-Control-Allow-Origin", "*");
  res.headers.emplace_back("Access-Control-Allow-Methods", "POST, OPTIONS");
  res.headers.emplace_back("Access-Control-Allow-Headers", "Content-Type");
  res.headers.emplace_back("Access-Control-Max-Age", "86400");
}

HttpResponse text_response(int status, std::string_view text) {
  HttpResponse res;
  res.status = status;
  res.headers.emplace_back("Content-Type", "text/plain; charset=utf-8");
  res.body = std::string(text);
  res.body += '\n';
  return res;
}

bool accepts_encoding(const HeaderList& headers, Encoding encoding) {
  if (encoding == Encoding::kIdentity) return true;
  const auto header = find_header(headers, "accept-encoding");
  if (!header) return false;
  const std::string wanted(to_string(encoding));
  std::size_t pos = 0;
  const std::string h = lower(*header);
  while (pos <= h.size()) {
    std::size_t comma = h.find(',', pos);
    if (comma == std::string::npos) comma = h.size();
    std::string item = h.substr(pos, comma - pos);
    pos = comma + 1;
    std::string q;
    if (const auto semi = item.find(';'); semi != std::string::npos) {
      q = item.substr(semi + 1);
      item = item.substr(0, semi);
    }
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    q.erase(std::remove_if(q.begin(), q.end(), [](unsigned char c) { return std::isspace(c); }), q.end());
    const bool zero = q == "q=0" || q == "q=0.0" || q == "q=0.00" || q == "q=0.000";
    if ((item == wanted || (item == "x-gzip" && encoding == Encoding::kGzip) || item == "*") && !zero) return true;
  }
  return false;
}

// A hard reload asks for a fresh copy from the origin.
bool wants_refresh(const HeaderList& headers) {
  const auto cc = find_header(headers, "cache-control");
  if (cc && lower(*cc).find("no-cache") != std::string::npos) return true;
  const auto pragma = find_header(headers, "pragma");
  return pragma && lower(*pragma).find("no-cache") != std::string::npos;
}

std::string path_of(std::string_view target) {
  if (const auto scheme = target.find("://"); scheme != std::string_view::npos && target.substr(0, scheme).find('/') == std::string_view::npos) {
    const auto slash = target.find('/', scheme + 3);
    target = slash == std::string_view::npos ? std::string_view("/") : target.substr(slash);
  }
  return std::string(target.substr(0, target.find('?')));
}

}  // namespace

std::string_view to_string(ServeMode mode) {
  switch (mode) {
    case ServeMode::kOriginal: return "original";
    case ServeMode::kAuto: return "auto";
    case ServeMode::kForcedElided: return "forced-elided";
  }
  return "auto";
}

ServeMode parse_serve_mode(std::string_view text) {
  if (text == "original") return ServeMode::kOriginal;
  if (text == "auto") return ServeMode::kAuto;
  if (text == "forced-elided") return ServeMode::kForcedElided;
  throw Error("unknown serve mode '" + std::string(text) + "'");
}

Proxy::Proxy(ProxyConfig config, CoverageStore& store, ResourceCache& cache, OriginFetcher fetcher)
    : config_(std::move(config)), store_(store), cache_(cache), fetcher_(std::move(fetcher)) {}

void Proxy::log(std::string_view message) const {
  if (config_.log) config_.log(message);
}

ProxyCounters Proxy::counters() const {
  return {origin_requests_.load(), beacons_.load(), sidecars_.load(), transforms_.load(),
          transform_failures_.load()};
}

HttpResponse Proxy::serve(const HttpRequest& request) { return serve(request, config_.mode); }

HttpResponse Proxy::serve(const HttpRequest& request, ServeMode mode) {
  if (const auto via = find_header(request.headers, "via"); via && lower(*via).find("jscov") != std::string::npos) {
    return text_response(508, "request loops through jscov");
  }
  const std::string path = path_of(request.target);

  if (path == kBeaconPath) {
    if (request.method == "OPTIONS") {
      HttpResponse res;
      res.status = 204;
      add_cors(res);
      return res;
    }
    if (request.method != "POST") return text_response(405, "beacon endpoint accepts POST");
    return serve_beacon(request);
  }
  if (path.starts_with(kSidecarPathPrefix)) {
    if (request.method != "GET" && request.method != "HEAD") return text_response(405, "sidecar endpoint accepts GET");
    return serve_sidecar(path);
  }

  std::string url;
  UrlParts parts;
  if (request.target.starts_with("http://") || request.target.starts_with("https://")) {
    url = request.target;
  } else {
    const auto host = find_header(request.headers, "host");
    if (!host || host->empty()) return text_response(400, "request has no Host header");
    url = request.scheme + "://" + lower(*host) + request.target;
  }
  if (!parse_url(url, parts)) return text_response(400, "cannot parse request URL " + url);
  try {
    normalize_host(parts.host);
  } catch (const InvalidHost& e) {
    return text_response(400, e.what());
  }
  const int default_port = parts.scheme == "https" ? 443 : 80;
  url = parts.scheme + "://" + parts.host + (parts.port == default_port ? "" : ":" + std::to_string(parts.port)) +
        parts.target;

  if (request.method == "GET" || request.method == "HEAD") return serve_resource(request, url, mode);

  // Everything else is relayed untouched and never cached.
  try {
    ++origin_requests_;
    HeaderList headers = forward_headers(request.headers);
    const OriginResponse o = fetcher_(request.method, url, headers, request.body);
    HttpResponse res;
    res.status = o.status;
    for (const auto& [k, v] : o.headers) {
      if (!in_list(k, kHopByHop)) res.headers.emplace_back(k, v);
    }
    res.body = o.body;
    return res;
  } catch (const OriginUnreachable& e) {
    log(std::string("origin unreachable: ") + e.what());
    return text_response(502, e.what());
  }
}

HttpResponse Proxy::serve_beacon(const HttpRequest& request) {
  HttpResponse res;
  try {
    const CoverageBeacon beacon = parse_beacon(request.body, now_ms());
    const CoverageRecord record = store_.record_beacon(beacon);
    ++beacons_;
    log("beacon " + beacon.key.url + " ids=" + std::to_string(beacon.ids.size()) +
        " beacons=" + std::to_string(record.beacon_count) + " executed=" + std::to_string(record.executed.size()));
    res.status = 204;
  } catch (const MalformedBeacon& e) {
    res = text_response(400, e.what());
  } catch (const UnsupportedVersion& e) {
    res = text_response(400, e.what());
  } catch (const IoError& e) {
    log(std::string("cannot persist beacon: ") + e.what());
    res = text_response(500, e.what());
  }
  add_cors(res);
  return res;
}

HttpResponse Proxy::serve_sidecar(std::string_view path) {
  const std::string_view rest = path.substr(kSidecarPathPrefix.size());
  const auto slash = rest.find('/');
  if (slash == std::string_view::npos) return text_response(404, "unknown sidecar");
  const std::string_view hash = rest.substr(0, slash);
  const std::string_view id = rest.substr(slash + 1);
  if (!is_lower_hex(hash, 64) || !is_lower_hex(id, 16)) return text_response(404, "unknown sidecar");
  const auto body = sidecar_body(hash, id);
  if (!body) return text_response(404, "unknown sidecar");
  ++sidecars_;
  HttpResponse res;
  res.headers.emplace_back("Content-Type", "application/javascript");
  res.headers.emplace_back("Cache-Control", "no-store");
  res.body = *body;
  return res;
}

std::shared_ptr<const CachedResource> Proxy::fetch_origin(const std::string& url, const HeaderList& headers,
                                                          bool refresh) {
  if (auto hit = cache_.find_url(url); hit && !refresh) return hit;
  std::shared_ptr<FetchSlot> slot;
  {
    std::lock_guard lock(slots_mutex_);
    auto& s = fetch_slots_[url];
    if (!s) s = std::make_shared<FetchSlot>();
    slot = s;
  }
  std::lock_guard fetch_lock(slot->mutex);
  if (auto hit = cache_.find_url(url); hit && !refresh) return hit;

  ++origin_requests_;
  const OriginResponse o = fetcher_("GET", url, forward_headers(headers), "");
  if (o.status >= 500) throw OriginUnreachable("origin answered " + std::to_string(o.status) + " for " + url);

  auto r = std::make_shared<CachedResource>();
  r->url = url;
  r->status = o.status;
  r->headers = o.headers;
  r->content_type = find_header(o.headers, "content-type").value_or("");
  r->fetched_at = now_ms();
  r->decoded_body = o.body;
  r->opaque = o.status != 200;
  if (!r->opaque) {
    try {
      // Codings are listed in the order they were applied.
      const std::string codings = find_header(o.headers, "content-encoding").value_or("");
      std::vector<Encoding> chain;
      std::size_t pos = 0;
      while (pos <= codings.size()) {
        std::size_t comma = codings.find(',', pos);
        if (comma == std::string::npos) comma = codings.size();
        const Encoding e = parse_encoding(codings.substr(pos, comma - pos));
        if (e != Encoding::kIdentity) chain.push_back(e);
        pos = comma + 1;
      }
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) r->decoded_body = decode(r->decoded_body, *it);
      r->original_encoding = chain.size() == 1 ? chain.front() : Encoding::kIdentity;
    } catch (const Error& e) {
      log("storing " + url + " as opaque: " + e.what());
      r->decoded_body = o.body;
      r->opaque = true;
    }
  }
  r->key = make_resource_key(url, r->decoded_body);
  std::shared_ptr<const CachedResource> resource = r;
  if (resource->status == 200) {
    try {
      cache_.put(resource);
    } catch (const IoError& e) {
      log(std::string("cache write failed: ") + e.what());
    }
  }
  return resource;
}

std::shared_ptr<Proxy::TransformSlot> Proxy::slot_for(const ResourceKey& key) {
  std::lock_guard lock(slots_mutex_);
  auto& slot = transform_slots_[key];
  if (!slot) slot = std::make_shared<TransformSlot>();
  return slot;
}

const ResourceAnalysis* Proxy::analysis_locked(TransformSlot& slot, const CachedResource& resource) {
  if (!slot.analyzed) {
    slot.analyzed = true;
    try {
      slot.analysis = std::make_shared<ResourceAnalysis>(analyze_or_throw(resource.decoded_body, resource.key));
    } catch (const ParseError& e) {
      ++transform_failures_;
      log("serving " + resource.url + " unmodified: " + e.what());
    } catch (const Error& e) {
      ++transform_failures_;
      log("serving " + resource.url + " unmodified: " + e.what());
    }
  }
  return slot.analysis.get();
}

std::optional<std::string> Proxy::instrumented_body(const CachedResource& resource) {
  if (resource.opaque || !resource.is_javascript()) return std::nullopt;
  const auto slot = slot_for(resource.key);
  std::lock_guard lock(slot->mutex);
  if (slot->instrumented) return slot->instrumented;
  const ResourceAnalysis* analysis = analysis_locked(*slot, resource);
  if (analysis == nullptr) return std::nullopt;
  try {
    slot->instrumented = instrument(resource.decoded_body, *analysis, config_.runtime, kBeaconPath).body;
  } catch (const Error& e) {
    ++transform_failures_;
    log("serving " + resource.url + " unmodified: " + e.what());
    return std::nullopt;
  }
  ++transforms_;
  try {
    cache_.put_variant(resource.key, "instrumented", *slot->instrumented);
  } catch (const IoError& e) {
    log(std::string("cache write failed: ") + e.what());
  }
  return slot->instrumented;
}

std::optional<std::string> Proxy::elided_body(const CachedResource& resource) {
  if (resource.opaque || !resource.is_javascript()) return std::nullopt;
  const auto slot = slot_for(resource.key);
  std::set<FunctionId> executed = store_.executed_ids(resource.key);
  std::lock_guard lock(slot->mutex);
  if (slot->elided && slot->elided_for == executed) return slot->elided;
  const ResourceAnalysis* analysis = analysis_locked(*slot, resource);
  if (analysis == nullptr) return std::nullopt;
  ElisionResult result;
  try {
    result = elide(resource.decoded_body, *analysis, executed, config_.elision, sidecar_url_base(resource.key),
                   config_.runtime);
  } catch (const Error& e) {
    ++transform_failures_;
    log("serving " + resource.url + " unmodified: " + e.what());
    return std::nullopt;
  }
  ++transforms_;
  log("elided " + resource.url + ": " + std::to_string(result.stats.elided_functions) + "/" +
      std::to_string(result.stats.total_functions) + " functions, " + std::to_string(result.stats.elided_bytes) +
      "/" + std::to_string(result.stats.total_bytes) + " bytes");
  slot->elided = std::move(result.body);
  slot->elided_for = std::move(executed);
  try {
    cache_.put_variant(resource.key, "elided", *slot->elided);
    for (const auto& [id, text] : result.sidecars) cache_.put_sidecar(resource.key, id, text);
  } catch (const IoError& e) {
    log(std::string("cache write failed: ") + e.what());
  }
  return slot->elided;
}

std::optional<std::string> Proxy::sidecar_body(std::string_view content_hash, std::string_view id) {
  const auto resource = cache_.find_hash(content_hash);
  if (!resource || resource->opaque) return std::nullopt;
  const auto slot = slot_for(resource->key);
  std::lock_guard lock(slot->mutex);
  const ResourceAnalysis* analysis = analysis_locked(*slot, *resource);
  if (analysis == nullptr) return std::nullopt;
  const FunctionUnit* unit = analysis->find(id);
  if (unit == nullptr) return std::nullopt;
  return sidecar_for(resource->decoded_body, *unit, config_.runtime);
}

HttpResponse Proxy::serve_resource(const HttpRequest& request, const std::string& url, ServeMode mode) {
  std::shared_ptr<const CachedResource> resource;
  try {
    resource = fetch_origin(url, request.headers, wants_refresh(request.headers));
  } catch (const OriginUnreachable& e) {
    log(std::string("origin unreachable: ") + e.what());
    return text_response(502, e.what());
  }

  HttpResponse res;
  res.status = resource->status;
  if (resource->opaque) {
    for (const auto& [k, v] : resource->headers) {
      if (!in_list(k, kHopByHop)) res.headers.emplace_back(k, v);
    }
    res.body = resource->decoded_body;
    return res;
  }

  std::string_view variant = "original";
  std::optional<std::string> transformed;
  if (resource->is_javascript() && mode != ServeMode::kOriginal) {
    bool want_elided = false;
    if (mode == ServeMode::kAuto) {
      want_elided = store_.phase(resource->key, config_.phase) == ResourcePhase::kElided;
    } else {
      want_elided = store_.record(resource->key).has_value();
    }
    transformed = want_elided ? elided_body(*resource) : instrumented_body(*resource);
    if (transformed) variant = want_elided ? "elided" : "instrumented";
  }

  for (const auto& [k, v] : resource->headers) {
    if (in_list(k, kHopByHop) || iequals(k, "content-encoding") || iequals(k, "vary")) continue;
    if (transformed && in_list(k, kOriginBodyHeaders)) continue;
    res.headers.emplace_back(k, v);
  }
  const std::string& body = transformed ? *transformed : resource->decoded_body;
  const Encoding encoding =
      accepts_encoding(request.headers, resource->original_encoding) ? resource->original_encoding : Encoding::kIdentity;
  res.body = transcode(body, encoding);
  if (encoding != Encoding::kIdentity) res.headers.emplace_back("Content-Encoding", std::string(to_string(encoding)));
  res.headers.emplace_back("Vary", "Accept-Encoding");
  if (transformed) res.headers.emplace_back("Cache-Control", "no-store");
  res.headers.emplace_back("X-Jscov-Variant", std::string(variant));

  if (resource->is_javascript()) {
    if (const auto referer = find_header(request.headers, "referer")) {
      const std::string page_host = url_host(*referer);
      UrlParts parts;
      if (!page_host.empty() && parse_url(url, parts)) {
        try {
          res.headers.emplace_back("X-Jscov-Party",
                                   std::string(to_string(classify_party(parts.host, page_host, config_.first_party))));
        } catch (const InvalidHost&) {
        }
      }
    }
  }
  return res;
}

}  // namespace jscov
