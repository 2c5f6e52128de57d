#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jscov/analyzer.hpp"
#include "jscov/cache.hpp"
#include "jscov/coverage_store.hpp"
#include "jscov/party.hpp"

namespace jscov {

struct ResourceStats {
  ResourceKey key;
  std::optional<Party> party;  // unknown when no page is associated
  std::size_t total_functions = 0;
  std::size_t executed_functions = 0;
  std::size_t superfluous_functions = 0;
  double superfluous_pct = 0;
  std::size_t total_anonymous = 0;
  double anonymous_pct = 0;
  std::size_t total_bytes = 0;
  std::size_t superfluous_bytes = 0;  // union of never-executed body spans
  double superfluous_bytes_pct = 0;
  std::size_t new_ids_after_first_beacon = 0;
  std::uint64_t beacon_count = 0;
  // Filled only when compressed sizes are requested.
  std::optional<std::size_t> original_gzip_bytes;
  std::optional<std::size_t> elided_gzip_bytes;

  friend bool operator==(const ResourceStats&, const ResourceStats&) = default;
};

// Counts only ids of analyzed units as executed. Throws KeyMismatch when the
// record belongs to another resource.
ResourceStats resource_stats(const ResourceAnalysis& analysis, const CoverageRecord& record,
                             std::optional<Party> party);

struct AggregateStats {
  std::size_t resources = 0;
  std::size_t total_functions = 0;
  std::size_t executed_functions = 0;
  std::size_t superfluous_functions = 0;
  std::size_t total_anonymous = 0;
  std::size_t total_bytes = 0;
  std::size_t superfluous_bytes = 0;
  std::size_t new_ids_after_first_beacon = 0;
  std::uint64_t beacon_count = 0;

  void add(const ResourceStats& s);
  bool empty() const { return resources == 0; }
  // nullopt for an empty aggregate.
  std::optional<double> superfluous_pct() const;
  std::optional<double> anonymous_pct() const;
  std::optional<double> superfluous_bytes_pct() const;  // byte-weighted
};

struct PageReport {
  std::string page_url;
  std::vector<ResourceStats> resources;
  AggregateStats first_party;
  AggregateStats third_party;
  AggregateStats all;

  std::optional<double> page_superfluous_pct() const { return all.superfluous_bytes_pct(); }
};

struct PartyConfig {
  std::vector<std::string> first_party;
  const PublicSuffixList* psl = nullptr;  // builtin when null
};

struct ReportOptions {
  PartyConfig party;
  bool compressed = false;
};

// Resources whose records list `page_url`. Resources missing from the cache
// or failing to parse are skipped and named in `skipped`.
PageReport page_report(const CoverageStore& store, const ResourceCache& cache, std::string_view page_url,
                       const ReportOptions& options, std::vector<std::string>* skipped = nullptr);

// Every page mentioned by any record, sorted.
std::vector<std::string> known_pages(const CoverageStore& store);

// Resources with no page at all, reported with an unknown party.
PageReport orphan_report(const CoverageStore& store, const ResourceCache& cache, const ReportOptions& options,
                         std::vector<std::string>* skipped = nullptr);

struct NewIdEntry {
  ResourceKey key;
  std::size_t executed = 0;
  std::size_t late = 0;  // first seen in beacon 2 or later
  double fraction = 0;
  std::uint64_t beacon_count = 0;
};

struct NewIdRate {
  std::vector<NewIdEntry> resources;
  std::size_t resources_with_late_ids = 0;
  double share_with_late_ids = 0;  // fraction of resources, in [0,1]
};

NewIdRate new_id_rate(const CoverageStore& store);

// CSV output. Column order is fixed; see kResourceCsvColumns.
extern const std::vector<std::string_view> kResourceCsvColumns;
std::string report_csv(const std::vector<PageReport>& pages);
std::string cdf_csv(const std::vector<PageReport>& pages);
std::string new_id_csv(const NewIdRate& rate);

// One parsed row of report_csv output.
struct ReportRow {
  std::string row_type;  // resource, page_first, page_third, page_all
  std::string page_url;
  ResourceStats stats;  // for page rows: aggregate counts with pct fields
  std::size_t resources = 0;
  bool pct_defined = true;
};

// Throws Error on malformed input.
std::vector<ReportRow> parse_report_csv(std::string_view csv);

// RFC 4180 fields; exposed for tests.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string format_double(double value);

}  // namespace jscov
