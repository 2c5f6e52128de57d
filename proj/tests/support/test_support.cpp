#include "test_support.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "json.hpp"
#include "jscov/fsutil.hpp"

namespace fs = std::filesystem;

namespace jscov::testing {

fs::path corpus_dir() { return fs::path(JSCOV_TEST_CORPUS_DIR); }

std::vector<CorpusFile> load_corpus() {
  std::vector<CorpusFile> files;
  for (const auto& entry : fs::directory_iterator(corpus_dir() / "js")) {
    if (entry.path().extension() != ".js") continue;
    CorpusFile f;
    f.name = entry.path().stem().string();
    f.url = "https://corpus.test/" + entry.path().filename().string();
    f.source = read_file(entry.path());
    const auto labels = nlohmann::json::parse(read_file(corpus_dir() / "labels" / (f.name + ".json")));
    for (const auto& j : labels) {
      LabelledUnit u;
      u.kind = j.at("kind").get<std::string>();
      u.start = j.at("start").get<std::size_t>();
      u.end = j.at("end").get<std::size_t>();
      u.body_start = j.at("body_start").get<std::size_t>();
      u.body_end = j.at("body_end").get<std::size_t>();
      if (!j.at("name").is_null()) u.name = j.at("name").get<std::string>();
      u.is_async = j.at("async").get<bool>();
      u.is_generator = j.at("generator").get<bool>();
      f.labels.push_back(std::move(u));
    }
    files.push_back(std::move(f));
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  if (files.empty()) throw std::runtime_error("empty corpus at " + corpus_dir().string());
  return files;
}

std::vector<CssGolden> load_css_goldens() {
  const fs::path dir = corpus_dir().parent_path() / "fixtures" / "css";
  std::vector<CssGolden> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_directory()) continue;
    CssGolden g;
    g.name = entry.path().filename().string();
    g.input = read_file(entry.path() / "input.css");
    g.expected = read_file(entry.path() / "expected.css");
    for (const auto& r : nlohmann::json::parse(read_file(entry.path() / "ranges.json"))) {
      g.ranges.push_back({r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>()});
    }
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  if (out.empty()) throw std::runtime_error("no css goldens at " + dir.string());
  return out;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("jscov-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

ElisionExpectation expected_elision(std::string_view source, const ResourceAnalysis& analysis,
                                    const std::set<FunctionId>& executed, const ElisionPolicy& policy,
                                    std::string_view sidecar_url_base, const RuntimeTemplates& runtime) {
  const auto& units = analysis.units;
  const std::size_t n = units.size();
  std::vector<bool> replaceable(n), replaced(n), elided(n);
  std::vector<std::string> stubs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FunctionUnit& u = units[i];
    if (executed.contains(u.id) || !policy_allows(policy, u)) continue;
    stubs[i] = stub_for(source, u, sidecar_url_base, runtime);
    replaceable[i] = !policy.size_guard || u.body_span.size() > stubs[i].size() + policy.min_body_bytes;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!replaceable[i]) continue;
    bool has_replaceable_ancestor = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && replaceable[j] && units[j].body_span.contains(units[i].span)) has_replaceable_ancestor = true;
    }
    replaced[i] = !has_replaceable_ancestor;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (replaced[j] && (i == j || units[j].body_span.contains(units[i].span))) elided[i] = true;
    }
  }

  ElisionExpectation e;
  e.stats.total_functions = n;
  e.stats.total_bytes = source.size();
  for (std::size_t i = 0; i < n; ++i) {
    const FunctionUnit& u = units[i];
    if (u.is_anonymous) ++e.stats.total_anonymous;
    if (elided[i]) {
      ++e.stats.elided_functions;
      if (u.is_anonymous) ++e.stats.elided_anonymous;
    } else if (!executed.contains(u.id)) {
      ++e.stats.skipped_functions;
    }
    if (replaced[i]) {
      e.stats.elided_bytes += u.body_span.size();
      e.replaced.push_back(u.body_span);
      e.replaced_ids.insert(u.id);
    }
  }
  std::sort(e.replaced.begin(), e.replaced.end(), [](auto& a, auto& b) { return a.start < b.start; });

  std::size_t pos = 0;
  for (const auto& span : e.replaced) {
    e.body.append(source.substr(pos, span.start - pos));
    for (std::size_t i = 0; i < n; ++i) {
      if (replaced[i] && units[i].body_span == span) e.body += stubs[i];
    }
    pos = span.end;
  }
  e.body.append(source.substr(pos));
  return e;
}

std::set<FunctionId> random_subset(const ResourceAnalysis& analysis, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution pick(p);
  std::set<FunctionId> out;
  for (const auto& u : analysis.units) {
    if (pick(rng)) out.insert(u.id);
  }
  return out;
}

}  // namespace jscov::testing
