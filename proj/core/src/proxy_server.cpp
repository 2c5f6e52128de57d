#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <thread>

#include "jscov/proxy.hpp"
#include "jscov/tls.hpp"

namespace jscov {

namespace {

constexpr std::size_t kMaxRequestBody = 64 * 1024 * 1024;

HttpRequest to_request(const httplib::Request& req, const char* scheme) {
  HttpRequest out;
  out.method = req.method;
  out.scheme = scheme;
  out.target = req.target.empty() ? "/" : req.target;
  for (const auto& [k, v] : req.headers) {
    if (k == "REMOTE_ADDR" || k == "REMOTE_PORT" || k == "LOCAL_ADDR" || k == "LOCAL_PORT") continue;
    out.headers.emplace_back(k, v);
  }
  out.body = req.body;
  return out;
}

void to_response(HttpResponse in, httplib::Response& res) {
  res.status = in.status;
  for (auto& [k, v] : in.headers) res.headers.emplace(std::move(k), std::move(v));
  res.body = std::move(in.body);
}

void install_routes(httplib::Server& server, Proxy& proxy, const char* scheme) {
  auto handler = [&proxy, scheme](const httplib::Request& req, httplib::Response& res) {
    HttpResponse out;
    try {
      out = proxy.serve(to_request(req, scheme));
    } catch (const std::exception& e) {
      out.status = 500;
      out.headers.emplace_back("Content-Type", "text/plain; charset=utf-8");
      out.body = std::string("jscov: ") + e.what() + "\n";
    }
    to_response(std::move(out), res);
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Patch(".*", handler);
  server.Delete(".*", handler);
  server.Options(".*", handler);
  server.set_payload_max_length(kMaxRequestBody);
}

}  // namespace

OriginFetcher make_http_fetcher(UpstreamOptions options) {
  return [options = std::move(options)](const std::string& method, const std::string& url, const HeaderList& headers,
                                        const std::string& body) -> OriginResponse {
    UrlParts parts;
    if (!parse_url(url, parts)) throw OriginUnreachable("cannot parse origin URL " + url);
    const int default_port = parts.scheme == "https" ? 443 : 80;
    const std::string authority = parts.host + (parts.port == default_port ? "" : ":" + std::to_string(parts.port));
    std::string base = parts.scheme + "://" + parts.host + ":" + std::to_string(parts.port);
    if (auto it = options.origin_map.find(authority); it != options.origin_map.end()) {
      base = it->second;
    } else if (auto host_it = options.origin_map.find(parts.host); host_it != options.origin_map.end()) {
      base = host_it->second;
    }

    httplib::Client client(base);
    if (!client.is_valid()) throw OriginUnreachable("cannot create client for " + base);
    client.set_connection_timeout(options.timeout);
    client.set_read_timeout(options.timeout);
    client.set_write_timeout(options.timeout);
    client.set_follow_location(false);
    client.set_decompress(false);
    client.set_url_encode(false);
    client.enable_server_certificate_verification(options.verify_tls);

    httplib::Request req;
    req.method = method;
    req.path = parts.target;
    for (const auto& [k, v] : headers) req.headers.emplace(k, v);
    req.headers.emplace("Host", authority);
    req.body = body;
    auto result = client.send(req);
    if (!result) {
      throw OriginUnreachable("cannot reach " + url + ": " + httplib::to_string(result.error()));
    }
    OriginResponse out;
    out.status = result->status;
    for (const auto& [k, v] : result->headers) out.headers.emplace_back(k, v);
    out.body = std::move(result->body);
    return out;
  };
}

struct ProxyServer::Impl {
  explicit Impl(Proxy& p) : proxy(p) {}

  Proxy& proxy;
  std::unique_ptr<httplib::Server> http;
  std::unique_ptr<httplib::SSLServer> https;
  std::shared_ptr<CertificateAuthority> ca;
  std::vector<std::thread> threads;
};

ProxyServer::ProxyServer(Proxy& proxy) : impl_(std::make_unique<Impl>(proxy)) {}

ProxyServer::~ProxyServer() { stop(); }

int ProxyServer::bind_http(const std::string& host, int port) {
  impl_->http = std::make_unique<httplib::Server>();
  install_routes(*impl_->http, impl_->proxy, "http");
  const int bound = port == 0 ? impl_->http->bind_to_any_port(host) : (impl_->http->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

int ProxyServer::bind_https(const std::string& host, int port, std::shared_ptr<CertificateAuthority> ca) {
  impl_->ca = std::move(ca);
  CertificateAuthority* authority = impl_->ca.get();
  impl_->https = std::make_unique<httplib::SSLServer>([authority](SSL_CTX& ctx) { return authority->install(ctx); });
  if (!impl_->https->is_valid()) throw Error("cannot set up TLS context");
  install_routes(*impl_->https, impl_->proxy, "https");
  const int bound =
      port == 0 ? impl_->https->bind_to_any_port(host) : (impl_->https->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void ProxyServer::start() {
  if (impl_->http) impl_->threads.emplace_back([s = impl_->http.get()] { s->listen_after_bind(); });
  if (impl_->https) impl_->threads.emplace_back([s = impl_->https.get()] { s->listen_after_bind(); });
  if (impl_->http) impl_->http->wait_until_ready();
  if (impl_->https) impl_->https->wait_until_ready();
}

void ProxyServer::stop() {
  if (impl_->http) impl_->http->stop();
  if (impl_->https) impl_->https->stop();
  wait();
}

void ProxyServer::wait() {
  for (auto& t : impl_->threads) {
    if (t.joinable()) t.join();
  }
  impl_->threads.clear();
}

}  // namespace jscov
