#include <csignal>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <pthread.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "jscov/analyzer.hpp"
#include "jscov/cache.hpp"
#include "jscov/coverage_store.hpp"
#include "jscov/fsutil.hpp"
#include "jscov/party.hpp"
#include "jscov/proxy.hpp"
#include "jscov/reporter.hpp"
#include "jscov/runtime.hpp"
#include "jscov/tls.hpp"
#include "jscov/transformer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void emit(const std::string& out_path, std::string_view data) {
  if (out_path.empty() || out_path == "-") {
    std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
    std::cout.flush();
  } else {
    jscov::write_file_atomic(out_path, data);
  }
}

json unit_json(const jscov::FunctionUnit& u) {
  json j;
  j["id"] = u.id;
  j["kind"] = jscov::to_string(u.kind);
  j["name"] = u.name ? json(*u.name) : json(nullptr);
  j["span"] = {u.span.start, u.span.end};
  j["body_span"] = {u.body_span.start, u.body_span.end};
  j["depth"] = u.depth;
  j["anonymous"] = u.is_anonymous;
  j["async"] = u.is_async;
  j["generator"] = u.is_generator;
  j["expression_body"] = u.expression_body;
  return j;
}

json stats_json(const jscov::ElisionStats& s) {
  json j;
  j["total_functions"] = s.total_functions;
  j["elided_functions"] = s.elided_functions;
  j["skipped_functions"] = s.skipped_functions;
  j["total_anonymous"] = s.total_anonymous;
  j["elided_anonymous"] = s.elided_anonymous;
  j["total_bytes"] = s.total_bytes;
  j["elided_bytes"] = s.elided_bytes;
  return j;
}

std::set<jscov::FunctionId> read_ids(const fs::path& path) {
  std::set<jscov::FunctionId> ids;
  std::istringstream in(jscov::read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    ids.insert(line);
  }
  return ids;
}

jscov::ResourceAnalysis analyze_file(const std::string& source, const std::string& url) {
  return jscov::analyze_or_throw(source, jscov::make_resource_key(url, source));
}

int run_analyze(const std::vector<std::string>& files, const std::string& url, const std::string& format) {
  int status = 0;
  for (const auto& file : files) {
    const std::string source = jscov::read_file(file);
    const std::string key_url = url.empty() ? file : url;
    if (format == "lines") {
      // Compact form used by the differential test against a reference parser.
      try {
        const auto a = analyze_file(source, key_url);
        std::cout << "FILE " << file << " OK " << a.units.size() << "\n";
        for (const auto& u : a.units) {
          std::cout << jscov::to_string(u.kind) << ' ' << u.span.start << ' ' << u.span.end << ' '
                    << u.body_span.start << ' ' << u.body_span.end << ' ' << (u.name ? *u.name : "-")
                    << "\n";
        }
      } catch (const jscov::ParseError& e) {
        std::cout << "FILE " << file << " ERR " << e.what() << "\n";
        status = 1;
      }
      continue;
    }
    const auto a = jscov::analyze(source, jscov::make_resource_key(key_url, source));
    json j;
    j["url"] = a.key.url;
    j["hash"] = a.key.content_hash;
    j["parse_ok"] = a.parse_ok;
    j["source_len"] = a.source_len;
    j["prologue_offset"] = a.prologue_offset;
    j["units"] = json::array();
    for (const auto& u : a.units) j["units"].push_back(unit_json(u));
    std::cout << j.dump(2) << "\n";
    if (!a.parse_ok) status = 1;
  }
  return status;
}

void log_line(std::string_view message) {
  static std::mutex mutex;
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::lock_guard lock(mutex);
  std::cerr << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << message << std::endl;
}

// "host:port" or ":port" or "port".
std::pair<std::string, int> split_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  std::string host = colon == std::string::npos ? "127.0.0.1" : addr.substr(0, colon);
  const std::string port = colon == std::string::npos ? addr : addr.substr(colon + 1);
  if (host.empty()) host = "0.0.0.0";
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  try {
    std::size_t used = 0;
    const int p = std::stoi(port, &used);
    if (used != port.size() || p < 0 || p > 65535) throw std::out_of_range(port);
    return {host, p};
  } catch (const std::exception&) {
    throw jscov::Error("invalid listen address '" + addr + "'");
  }
}

struct ServeOptions {
  std::string listen = "127.0.0.1:8080";
  std::string tls_listen;
  std::string mode = "auto";
  std::string store;
  std::string cache;
  std::string ca_cert;
  std::string ca_key;
  std::vector<std::string> first_party;
  std::uint64_t min_beacons = 5;
  bool freeze = false;
  std::vector<std::string> origin_map;
  bool insecure_upstream = false;
  bool permissive = false;
  std::size_t min_body_bytes = 0;
};

int run_serve(const ServeOptions& o) {
  if (o.ca_cert.empty() != o.ca_key.empty()) throw jscov::Error("--ca-cert and --ca-key go together");
  if (!o.tls_listen.empty() && o.ca_cert.empty()) throw jscov::Error("--tls-listen needs --ca-cert and --ca-key");
  if (o.min_beacons < 1) throw jscov::Error("--min-beacons must be at least 1");

  // Signals are taken synchronously by the main thread below.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  jscov::CoverageStore store{fs::path(o.store)};
  jscov::ResourceCache cache{fs::path(o.cache)};

  jscov::UpstreamOptions upstream;
  upstream.verify_tls = !o.insecure_upstream;
  for (const auto& entry : o.origin_map) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
      throw jscov::Error("--origin-map expects host=scheme://addr, got '" + entry + "'");
    }
    upstream.origin_map[entry.substr(0, eq)] = entry.substr(eq + 1);
  }

  jscov::ProxyConfig config;
  config.mode = jscov::parse_serve_mode(o.mode);
  config.phase.min_beacons = o.min_beacons;
  config.phase.freeze = o.freeze;
  config.elision = o.permissive ? jscov::ElisionPolicy::permissive() : jscov::ElisionPolicy{};
  config.elision.min_body_bytes = o.min_body_bytes;
  config.first_party = o.first_party;
  config.log = log_line;
  jscov::Proxy proxy(config, store, cache, jscov::make_http_fetcher(upstream));
  jscov::ProxyServer server(proxy);

  std::shared_ptr<jscov::CertificateAuthority> ca;
  if (!o.ca_cert.empty()) ca = jscov::CertificateAuthority::load(o.ca_cert, o.ca_key);

  const auto [host, port] = split_address(o.listen);
  if (ca && o.tls_listen.empty()) {
    const int bound = server.bind_https(host, port, ca);
    log_line("listening on https://" + host + ":" + std::to_string(bound));
  } else {
    const int bound = server.bind_http(host, port);
    log_line("listening on http://" + host + ":" + std::to_string(bound));
    if (ca) {
      const auto [tls_host, tls_port] = split_address(o.tls_listen);
      const int tls_bound = server.bind_https(tls_host, tls_port, ca);
      log_line("listening on https://" + tls_host + ":" + std::to_string(tls_bound));
    }
  }
  log_line("mode " + std::string(jscov::to_string(config.mode)) + ", min beacons " + std::to_string(o.min_beacons) +
           (o.freeze ? ", frozen" : "") + ", " + std::to_string(store.size()) + " coverage records, " +
           std::to_string(cache.size()) + " cached resources");
  server.start();

  int sig = 0;
  sigwait(&signals, &sig);
  log_line("stopping on signal " + std::to_string(sig));
  server.stop();
  const auto c = proxy.counters();
  log_line("origin requests " + std::to_string(c.origin_requests) + ", beacons " + std::to_string(c.beacons) +
           ", sidecars " + std::to_string(c.sidecars) + ", transforms " + std::to_string(c.transforms) +
           ", transform failures " + std::to_string(c.transform_failures));
  return 0;
}

struct ReportCliOptions {
  std::string store;
  std::string cache;
  std::string out;
  std::string cdf;
  std::string new_ids;
  std::vector<std::string> pages;
  std::vector<std::string> first_party;
  std::string psl;
  bool compressed = false;
};

constexpr int kExitEmptyReport = 3;

int run_report(const ReportCliOptions& o) {
  const auto store = jscov::CoverageStore::load(o.store);
  const jscov::ResourceCache cache{fs::path(o.cache)};
  std::optional<jscov::PublicSuffixList> psl;
  if (!o.psl.empty()) psl = jscov::PublicSuffixList::from_file(o.psl);

  jscov::ReportOptions options;
  options.party.first_party = o.first_party;
  options.party.psl = psl ? &*psl : nullptr;
  options.compressed = o.compressed;

  std::vector<std::string> skipped;
  std::vector<jscov::PageReport> reports;
  const std::vector<std::string> pages = o.pages.empty() ? jscov::known_pages(*store) : o.pages;
  std::size_t resources = 0;
  for (const auto& page : pages) {
    reports.push_back(jscov::page_report(*store, cache, page, options, &skipped));
    resources += reports.back().resources.size();
    if (reports.back().resources.empty()) log_line("page " + page + ": no resources");
    else if (reports.back().first_party.empty()) log_line("page " + page + ": no first-party resources");
  }
  if (o.pages.empty()) {
    auto orphans = jscov::orphan_report(*store, cache, options, &skipped);
    if (!orphans.resources.empty()) {
      resources += orphans.resources.size();
      reports.push_back(std::move(orphans));
    }
  }
  for (const auto& s : skipped) log_line("skipped " + s);

  emit(o.out, jscov::report_csv(reports));
  if (!o.cdf.empty()) emit(o.cdf, jscov::cdf_csv(reports));
  if (!o.new_ids.empty()) emit(o.new_ids, jscov::new_id_csv(jscov::new_id_rate(*store)));
  return resources == 0 ? kExitEmptyReport : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jscov: learn which JS functions run and elide the rest"};
  app.require_subcommand(1);

  std::string url;
  std::string out_path;

  auto* analyze = app.add_subcommand("analyze", "List the function units of JS files");
  std::vector<std::string> analyze_files;
  std::string analyze_format = "json";
  analyze->add_option("files", analyze_files, "JS files")->required()->check(CLI::ExistingFile);
  analyze->add_option("--url", url, "Resource URL used for the key (default: the file path)");
  analyze->add_option("--format", analyze_format, "json or lines")
      ->check(CLI::IsMember({"json", "lines"}));

  auto* instrument = app.add_subcommand("instrument", "Write the learning-phase variant of a JS file");
  std::string instrument_file;
  std::string beacon_url(jscov::kBeaconPath);
  instrument->add_option("file", instrument_file, "JS file")->required()->check(CLI::ExistingFile);
  instrument->add_option("--url", url, "Resource URL used for the key (default: the file path)");
  instrument->add_option("--beacon-url", beacon_url, "Beacon endpoint path");
  instrument->add_option("-o,--out", out_path, "Output file (default: stdout)");

  auto* elide = app.add_subcommand("elide", "Write the elided variant of a JS file");
  std::string elide_file;
  std::string coverage_file;
  std::string sidecar_dir;
  std::string stats_path;
  bool permissive = false;
  std::size_t min_body_bytes = 0;
  elide->add_option("file", elide_file, "JS file")->required()->check(CLI::ExistingFile);
  elide->add_option("--coverage", coverage_file, "File with one executed function id per line")
      ->required()
      ->check(CLI::ExistingFile);
  elide->add_option("--url", url, "Resource URL used for the key (default: the file path)");
  elide->add_option("-o,--out", out_path, "Output file (default: stdout)");
  elide->add_option("--sidecar-dir", sidecar_dir, "Write one sidecar file per elided function here");
  elide->add_option("--stats", stats_path, "Write elision statistics as JSON here");
  elide->add_flag("--permissive", permissive, "Elide every kind and ignore the size guard");
  elide->add_option("--min-body-bytes", min_body_bytes, "Extra margin over the stub size");

  auto* serve = app.add_subcommand("serve", "Run the intercepting proxy");
  ServeOptions serve_opts;
  serve->add_option("--listen", serve_opts.listen, "Listen address host:port")->capture_default_str();
  serve->add_option("--tls-listen", serve_opts.tls_listen,
                    "Separate HTTPS listener; without it --listen speaks TLS when a CA is given");
  serve->add_option("--mode", serve_opts.mode, "original, auto or forced-elided")
      ->check(CLI::IsMember({"original", "auto", "forced-elided"}))
      ->capture_default_str();
  serve->add_option("--store", serve_opts.store, "Coverage store file")->required();
  serve->add_option("--cache", serve_opts.cache, "Resource cache directory")->required();
  serve->add_option("--ca-cert", serve_opts.ca_cert, "CA certificate (PEM) for minting leaf certificates");
  serve->add_option("--ca-key", serve_opts.ca_key, "CA private key (PEM)");
  serve->add_option("--first-party", serve_opts.first_party, "Host pattern treated as first party (*.example.com)");
  serve->add_option("--min-beacons", serve_opts.min_beacons, "Beacons before a resource is elided")
      ->capture_default_str();
  serve->add_flag("--freeze", serve_opts.freeze, "Stay in the learning phase");
  serve->add_option("--origin-map", serve_opts.origin_map, "Send requests for a host elsewhere: host=scheme://addr");
  serve->add_flag("--insecure-upstream", serve_opts.insecure_upstream, "Skip origin certificate verification");
  serve->add_flag("--permissive", serve_opts.permissive, "Elide every kind and ignore the size guard");
  serve->add_option("--min-body-bytes", serve_opts.min_body_bytes, "Extra margin over the stub size");

  auto* report = app.add_subcommand("report", "Write superfluous-code statistics as CSV");
  ReportCliOptions report_opts;
  report->add_option("--store", report_opts.store, "Coverage store file")->required()->check(CLI::ExistingFile);
  report->add_option("--cache", report_opts.cache, "Resource cache directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", report_opts.out, "Per-resource and per-page CSV (- for stdout)")->required();
  report->add_option("--cdf", report_opts.cdf, "Sorted values with cumulative fractions");
  report->add_option("--new-ids", report_opts.new_ids, "Per-resource share of ids first seen after beacon 1");
  report->add_option("--page", report_opts.pages, "Restrict to these page URLs");
  report->add_option("--first-party", report_opts.first_party, "Host pattern treated as first party");
  report->add_option("--psl", report_opts.psl, "Public suffix list file (ASCII rules)")->check(CLI::ExistingFile);
  report->add_flag("--compressed", report_opts.compressed, "Add gzip sizes of original and elided bodies");

  auto* ca = app.add_subcommand("ca", "Create a local CA for TLS interception");
  std::string ca_cert_out;
  std::string ca_key_out;
  std::string ca_name = "jscov local CA";
  ca->add_option("--cert", ca_cert_out, "Certificate output (PEM)")->required();
  ca->add_option("--key", ca_key_out, "Private key output (PEM)")->required();
  ca->add_option("--name", ca_name, "Common name")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return run_analyze(analyze_files, url, analyze_format);

    if (instrument->parsed()) {
      const std::string source = jscov::read_file(instrument_file);
      const auto a = analyze_file(source, url.empty() ? instrument_file : url);
      const auto result = jscov::instrument(source, a, jscov::RuntimeTemplates::defaults(), beacon_url);
      emit(out_path, result.body);
      std::cerr << "markers: " << result.marker_count << "\n";
      return 0;
    }

    if (elide->parsed()) {
      const std::string source = jscov::read_file(elide_file);
      const auto a = analyze_file(source, url.empty() ? elide_file : url);
      jscov::ElisionPolicy policy = permissive ? jscov::ElisionPolicy::permissive() : jscov::ElisionPolicy{};
      policy.min_body_bytes = min_body_bytes;
      const auto result = jscov::elide(source, a, read_ids(coverage_file), policy,
                                       jscov::sidecar_url_base(a.key));
      emit(out_path, result.body);
      if (!sidecar_dir.empty()) {
        fs::create_directories(sidecar_dir);
        for (const auto& [id, text] : result.sidecars) jscov::write_file_atomic(fs::path(sidecar_dir) / id, text);
      }
      const std::string stats = stats_json(result.stats).dump(2) + "\n";
      if (!stats_path.empty()) {
        jscov::write_file_atomic(stats_path, stats);
      } else {
        std::cerr << stats;
      }
      return 0;
    }
    if (serve->parsed()) return run_serve(serve_opts);
    if (report->parsed()) return run_report(report_opts);
    if (ca->parsed()) {
      jscov::CertificateAuthority::generate(ca_name)->save(ca_cert_out, ca_key_out);
      return 0;
    }
  } catch (const jscov::Error& e) {
    std::cerr << "jscov: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
