#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "jscov/analyzer.hpp"
#include "jscov/transformer.hpp"

namespace jscov::testing {

std::filesystem::path corpus_dir();

// One unit as labelled by the reference parser.
struct LabelledUnit {
  std::string kind;
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t body_start = 0;
  std::size_t body_end = 0;
  std::optional<std::string> name;
  bool is_async = false;
  bool is_generator = false;
};

struct CorpusFile {
  std::string name;  // file stem
  std::string url;
  std::string source;
  std::vector<LabelledUnit> labels;
};

// Every js/*.js file with its labels/<stem>.json, sorted by name.
std::vector<CorpusFile> load_corpus();

// fixtures/css/<name>/{input.css,ranges.json,expected.css}, sorted by name.
struct CssGolden {
  std::string name;
  std::string input;
  std::vector<SourceSpan> ranges;
  std::string expected;
};
std::vector<CssGolden> load_css_goldens();

// Removes itself on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Expected elision computed unit by unit from the definitions: a unit is
// replaceable when it is not executed, the policy allows it and its stub is
// small enough; it is replaced when no other replaceable unit's body
// contains it; it is elided when some replaced body contains it.
struct ElisionExpectation {
  ElisionStats stats;
  std::vector<SourceSpan> replaced;  // ascending
  std::string body;                  // source with each replaced body swapped for its stub
  std::set<FunctionId> replaced_ids;
};

ElisionExpectation expected_elision(std::string_view source, const ResourceAnalysis& analysis,
                                    const std::set<FunctionId>& executed, const ElisionPolicy& policy,
                                    std::string_view sidecar_url_base,
                                    const RuntimeTemplates& runtime = RuntimeTemplates::defaults());

// Each unit independently with probability p.
std::set<FunctionId> random_subset(const ResourceAnalysis& analysis, double p, std::mt19937_64& rng);

}  // namespace jscov::testing
