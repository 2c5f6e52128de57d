#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "proxy_loop.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <regex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "jscov/analyzer.hpp"
#include "jscov/cache.hpp"
#include "jscov/codec.hpp"
#include "jscov/fsutil.hpp"
#include "jscov/runtime.hpp"
#include "jscov/transformer.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace jscov::testing {

namespace {

constexpr std::string_view kSiteHost = "site.test";

struct FixtureScript {
  std::string path;  // with query
  std::string file;
  std::string encoding;
  std::vector<std::string> executed;
  std::map<int, std::vector<std::string>> late;
};

struct Fixture {
  std::string page_path;
  std::string page_html;
  std::vector<FixtureScript> scripts;
  std::map<std::string, std::string> bodies;  // by file name
};

Fixture load_fixture() {
  const fs::path dir = corpus_dir().parent_path() / "fixtures" / "site";
  const json manifest = json::parse(read_file(dir / "manifest.json"));
  Fixture f;
  f.page_path = manifest.at("page").get<std::string>();
  f.page_html = read_file(dir / "index.html");
  for (const auto& s : manifest.at("scripts")) {
    FixtureScript script;
    script.path = s.at("path").get<std::string>();
    const std::string no_query = script.path.substr(0, script.path.find('?'));
    script.file = no_query.substr(no_query.rfind('/') + 1);
    script.encoding = s.at("encoding").get<std::string>();
    script.executed = s.at("executed").get<std::vector<std::string>>();
    for (const auto& [cycle, names] : s.at("late").items()) {
      script.late[std::stoi(cycle)] = names.get<std::vector<std::string>>();
    }
    f.bodies[script.file] = read_file(dir / script.file);
    f.scripts.push_back(std::move(script));
  }
  return f;
}

// Origin that counts every request per path.
class Origin {
 public:
  explicit Origin(const Fixture& fixture) {
    server_.Get(".*", [this, &fixture](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mutex_);
        ++hits_[req.path];
      }
      if (req.path == fixture.page_path) {
        res.set_content(fixture.page_html, "text/html; charset=utf-8");
        return;
      }
      for (const auto& s : fixture.scripts) {
        if (s.path.substr(0, s.path.find('?')) != req.path) continue;
        const std::string& body = fixture.bodies.at(s.file);
        res.status = 200;
        res.body = transcode(body, s.encoding);
        res.set_header("Content-Type", "application/javascript; charset=utf-8");
        res.set_header("ETag", "\"" + s.file + "\"");
        if (s.encoding != "identity") res.set_header("Content-Encoding", s.encoding);
        return;
      }
      res.status = 404;
      res.set_content("not found", "text/plain");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Origin() {
    server_.stop();
    thread_.join();
  }
  int port() const { return port_; }
  int hits(const std::string& path) {
    std::lock_guard lock(mutex_);
    return hits_[path];
  }
  int total_hits() {
    std::lock_guard lock(mutex_);
    int n = 0;
    for (const auto& [p, c] : hits_) n += c;
    return n;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  std::map<std::string, int> hits_;
};

// Proxy stack on fresh objects over the same store file and cache directory.
struct ProxyStack {
  ProxyStack(const LoopOptions& options, int origin_port)
      : store(options.workdir / "coverage.store"), cache(options.workdir / "cache") {
    UpstreamOptions upstream;
    upstream.origin_map[std::string(kSiteHost)] = "http://127.0.0.1:" + std::to_string(origin_port);
    ProxyConfig config;
    config.mode = ServeMode::kAuto;
    config.phase = options.phase;
    proxy = std::make_unique<Proxy>(config, store, cache, make_http_fetcher(upstream));
    server = std::make_unique<ProxyServer>(*proxy);
    port = server->bind_http("127.0.0.1", 0);
    server->start();
  }
  ~ProxyStack() { server->stop(); }

  CoverageStore store;
  ResourceCache cache;
  std::unique_ptr<Proxy> proxy;
  std::unique_ptr<ProxyServer> server;
  int port = 0;
};

struct Fetched {
  int status = 0;
  std::string variant;
  std::string content_type;
  std::string body;  // decoded
};

Fetched get(httplib::Client& client, const std::string& path, const std::string& page_url,
            std::vector<std::string>& problems) {
  httplib::Headers headers{{"Host", std::string(kSiteHost)}, {"Accept-Encoding", "gzip, br"}};
  if (!page_url.empty()) headers.emplace("Referer", page_url);
  Fetched out;
  auto res = client.Get(path, headers);
  if (!res) {
    problems.push_back("no response for " + path + ": " + httplib::to_string(res.error()));
    return out;
  }
  out.status = res->status;
  out.variant = res->get_header_value("X-Jscov-Variant");
  out.content_type = res->get_header_value("Content-Type");
  const std::string encoding = res->get_header_value("Content-Encoding");
  try {
    out.body = encoding.empty() ? res->body : decode(res->body, parse_encoding(encoding));
  } catch (const Error& e) {
    problems.push_back("cannot decode " + path + " (" + encoding + "): " + e.what());
  }
  return out;
}

// The {"url":..,"hash":..} literal the prologue hands to the runtime.
std::optional<ResourceKey> key_from_prologue(const std::string& body) {
  const auto start = body.find("{\"url\":");
  if (start == std::string::npos) return std::nullopt;
  bool in_string = false;
  for (std::size_t i = start; i < body.size(); ++i) {
    const char c = body[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '}') {
      const json j = json::parse(body.substr(start, i + 1 - start));
      return ResourceKey{j.at("url").get<std::string>(), j.at("hash").get<std::string>()};
    }
  }
  return std::nullopt;
}

std::set<std::string> marker_ids(const std::string& body) {
  static const std::regex marker(R"re(\.push\("([0-9a-f]{16})"\))re");
  std::set<std::string> ids;
  for (std::sregex_iterator it(body.begin(), body.end(), marker), end; it != end; ++it) ids.insert((*it)[1]);
  return ids;
}

std::vector<std::string> sidecar_paths(const std::string& body) {
  static const std::regex url(R"re("(/__jscov__/body/[0-9a-f]{64}/[0-9a-f]{16})")re");
  std::vector<std::string> out;
  for (std::sregex_iterator it(body.begin(), body.end(), url), end; it != end; ++it) out.push_back((*it)[1]);
  return out;
}

// "name" picks units by name, "@n" the n-th unit in source order.
std::vector<FunctionId> pick_ids(const ResourceAnalysis& analysis, const std::vector<std::string>& wanted,
                                 std::vector<std::string>& problems) {
  std::vector<FunctionId> ids;
  for (const auto& w : wanted) {
    bool found = false;
    if (w.starts_with("@")) {
      const std::size_t n = std::stoul(w.substr(1));
      if (n < analysis.units.size()) {
        ids.push_back(analysis.units[n].id);
        found = true;
      }
    } else {
      for (const auto& u : analysis.units) {
        if (u.name && *u.name == w) {
          ids.push_back(u.id);
          found = true;
        }
      }
    }
    if (!found) problems.push_back("no unit '" + w + "' in " + analysis.key.url);
  }
  return ids;
}

}  // namespace

LoopResult run_proxy_loop(const LoopOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const Fixture fixture = load_fixture();
  LoopResult result;
  Origin origin(fixture);
  const std::string page_url = "http://" + std::string(kSiteHost) + fixture.page_path;

  std::map<std::string, std::size_t> script_index;
  for (const auto& s : fixture.scripts) {
    LoopScript ls;
    ls.url = "http://" + std::string(kSiteHost) + s.path;
    ls.encoding = s.encoding;
    ls.original_bytes = fixture.bodies.at(s.file).size();
    script_index[s.path] = result.scripts.size();
    result.scripts.push_back(std::move(ls));
  }

  {
    ProxyStack stack(options, origin.port());
    httplib::Client client("127.0.0.1", stack.port);
    client.set_decompress(false);
    client.set_read_timeout(std::chrono::seconds(20));

    for (int cycle = 1; cycle <= options.cycles; ++cycle) {
      const Fetched page = get(client, fixture.page_path, "", result.problems);
      if (page.status != 200) result.problems.push_back("page status " + std::to_string(page.status));
      for (const auto& s : fixture.scripts) {
        LoopScript& ls = result.scripts[script_index[s.path]];
        const Fetched f = get(client, s.path, page_url, result.problems);
        ls.variants_seen.push_back(f.variant);
        if (f.status != 200) {
          result.problems.push_back(s.path + " status " + std::to_string(f.status));
          continue;
        }
        const auto key = key_from_prologue(f.body);
        if (!key) {
          result.problems.push_back(s.path + " cycle " + std::to_string(cycle) + ": no coverage key in body");
          continue;
        }
        const std::string original = strip_instrumentation(f.body);
        if (original != fixture.bodies.at(s.file)) {
          result.problems.push_back(s.path + ": stripped body differs from the origin's");
        }
        const ResourceAnalysis analysis = analyze(original, *key);
        std::vector<std::string> wanted = s.executed;
        for (const auto& [from, names] : s.late) {
          if (cycle >= from) wanted.insert(wanted.end(), names.begin(), names.end());
        }
        const auto ids = pick_ids(analysis, wanted, result.problems);
        const auto markers = marker_ids(f.body);
        for (const auto& id : ids) {
          if (!markers.contains(id)) result.problems.push_back(s.path + ": no marker for " + id);
        }
        json beacon{{"v", 1}, {"key", {{"url", key->url}, {"hash", key->content_hash}}}, {"ids", ids},
                    {"page", page_url}};
        httplib::Headers headers{{"Host", std::string(kSiteHost)}, {"Origin", "http://site.test"}};
        auto res = client.Post(std::string(kBeaconPath), headers, beacon.dump(), "text/plain;charset=UTF-8");
        if (res && res->status == 204) {
          ++result.beacons_accepted;
        } else {
          ++result.beacons_rejected;
          result.problems.push_back(s.path + ": beacon rejected");
        }
      }
    }

    for (const auto& s : fixture.scripts) {
      LoopScript& ls = result.scripts[script_index[s.path]];
      const Fetched f = get(client, s.path, page_url, result.problems);
      ls.final_variant = f.variant;
      ls.final_bytes = f.body.size();
      const ResourceKey key = make_resource_key(ls.url, f.body);
      ls.final_parses = analyze(f.body, key).parse_ok;
      for (const auto& path : sidecar_paths(f.body)) {
        ++ls.replaced_units;
        const Fetched side = get(client, path, "", result.problems);
        ++ls.sidecars_fetched;
        if (side.status != 200 || side.content_type.find("javascript") == std::string::npos ||
            !analyze(side.body, make_resource_key(path, side.body)).parse_ok) {
          ls.sidecars_ok = false;
          result.problems.push_back("sidecar " + path + " not served correctly");
        }
      }
      const ResourceKey original_key = make_resource_key(ls.url, fixture.bodies.at(s.file));
      if (const auto rec = stack.store.record(original_key)) ls.executed_reported = rec->executed.size();
      ls.origin_fetches = origin.hits(s.path.substr(0, s.path.find('?')));
    }
    result.page_origin_fetches = origin.hits(fixture.page_path);
  }

  // Same store and cache, new process state: nothing should go to the origin.
  {
    const int before = origin.total_hits();
    ProxyStack stack(options, origin.port());
    httplib::Client client("127.0.0.1", stack.port);
    client.set_decompress(false);
    for (const auto& s : fixture.scripts) {
      result.restart_variants["http://" + std::string(kSiteHost) + s.path] =
          get(client, s.path, page_url, result.problems).variant;
    }
    result.restart_origin_fetches = origin.total_hits() - before;
  }

  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace jscov::testing
