#include "jscov/reporter.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "jscov/codec.hpp"
#include "jscov/transformer.hpp"
#include "jscov/url.hpp"

namespace jscov {

namespace {

double pct(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::optional<double> opt_pct(std::size_t part, std::size_t whole, bool empty) {
  if (empty) return std::nullopt;
  return pct(part, whole);
}

std::size_t union_of_unexecuted_bodies(const ResourceAnalysis& analysis, const std::set<FunctionId>& executed) {
  std::vector<SourceSpan> spans;
  for (const auto& unit : analysis.units) {
    if (!executed.contains(unit.id)) spans.push_back(unit.body_span);
  }
  std::sort(spans.begin(), spans.end(), [](const SourceSpan& a, const SourceSpan& b) {
    return a.start != b.start ? a.start < b.start : a.end > b.end;
  });
  std::size_t total = 0;
  std::size_t covered_to = 0;
  for (const auto& s : spans) {
    if (s.end <= covered_to) continue;
    const std::size_t from = std::max(s.start, covered_to);
    total += s.end - from;
    covered_to = s.end;
  }
  return total;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  line += '\n';
  return line;
}

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string opt_size(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }

std::optional<std::string> party_text(const std::optional<Party>& p) {
  if (!p) return std::nullopt;
  return std::string(to_string(*p));
}

ResourceStats stats_for(const CachedResource& resource, const CoverageRecord& record, std::optional<Party> party,
                        const ReportOptions& options, bool& ok) {
  ok = false;
  const ResourceAnalysis analysis = analyze(resource.decoded_body, resource.key);
  if (!analysis.parse_ok) return {};
  ResourceStats s = resource_stats(analysis, record, party);
  if (options.compressed) {
    s.original_gzip_bytes = transcode(resource.decoded_body, Encoding::kGzip).size();
    const ElisionResult elided =
        elide(resource.decoded_body, analysis, record.executed, ElisionPolicy{}, sidecar_url_base(resource.key));
    s.elided_gzip_bytes = transcode(elided.body, Encoding::kGzip).size();
  }
  ok = true;
  return s;
}

std::size_t parse_size(const std::string& s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error("bad integer in report csv: '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error("bad number in report csv: '" + s + "'");
  return v;
}

}  // namespace

const std::vector<std::string_view> kResourceCsvColumns = {
    "row_type",
    "page_url",
    "url",
    "content_hash",
    "party",
    "resources",
    "total_functions",
    "executed_functions",
    "superfluous_functions",
    "superfluous_pct",
    "total_anonymous",
    "anonymous_pct",
    "total_bytes",
    "superfluous_bytes",
    "superfluous_bytes_pct",
    "new_ids_after_first_beacon",
    "beacon_count",
    "original_gzip_bytes",
    "elided_gzip_bytes",
};

std::string format_double(double value) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

ResourceStats resource_stats(const ResourceAnalysis& analysis, const CoverageRecord& record,
                             std::optional<Party> party) {
  if (!(record.key == analysis.key)) {
    throw KeyMismatch("coverage record " + record.key.url + " does not belong to " + analysis.key.url);
  }
  ResourceStats s;
  s.key = analysis.key;
  s.party = party;
  s.total_functions = analysis.units.size();
  for (const auto& unit : analysis.units) {
    if (record.executed.contains(unit.id)) {
      ++s.executed_functions;
      const auto it = record.first_beacon.find(unit.id);
      if (it != record.first_beacon.end() && it->second >= 2) ++s.new_ids_after_first_beacon;
    }
    if (unit.is_anonymous) ++s.total_anonymous;
  }
  s.superfluous_functions = s.total_functions - s.executed_functions;
  s.superfluous_pct = pct(s.superfluous_functions, s.total_functions);
  s.anonymous_pct = pct(s.total_anonymous, s.total_functions);
  s.total_bytes = analysis.source_len;
  s.superfluous_bytes = union_of_unexecuted_bodies(analysis, record.executed);
  s.superfluous_bytes_pct = pct(s.superfluous_bytes, s.total_bytes);
  s.beacon_count = record.beacon_count;
  return s;
}

void AggregateStats::add(const ResourceStats& s) {
  ++resources;
  total_functions += s.total_functions;
  executed_functions += s.executed_functions;
  superfluous_functions += s.superfluous_functions;
  total_anonymous += s.total_anonymous;
  total_bytes += s.total_bytes;
  superfluous_bytes += s.superfluous_bytes;
  new_ids_after_first_beacon += s.new_ids_after_first_beacon;
  beacon_count += s.beacon_count;
}

std::optional<double> AggregateStats::superfluous_pct() const {
  return opt_pct(superfluous_functions, total_functions, empty());
}
std::optional<double> AggregateStats::anonymous_pct() const { return opt_pct(total_anonymous, total_functions, empty()); }
std::optional<double> AggregateStats::superfluous_bytes_pct() const {
  return opt_pct(superfluous_bytes, total_bytes, empty());
}

std::vector<std::string> known_pages(const CoverageStore& store) {
  std::set<std::string> pages;
  for (const auto& r : store.records()) pages.insert(r.pages.begin(), r.pages.end());
  return {pages.begin(), pages.end()};
}

PageReport page_report(const CoverageStore& store, const ResourceCache& cache, std::string_view page_url,
                       const ReportOptions& options, std::vector<std::string>* skipped) {
  PageReport report;
  report.page_url = std::string(page_url);
  const PublicSuffixList& psl = options.party.psl ? *options.party.psl : PublicSuffixList::builtin();
  const std::string page_host = url_host(page_url);
  for (const auto& record : store.records()) {
    if (!record.pages.contains(report.page_url)) continue;
    const auto resource = cache.find(record.key);
    if (!resource) {
      if (skipped) skipped->push_back(record.key.url + " (not in cache)");
      continue;
    }
    std::optional<Party> party;
    try {
      party = classify_party(url_host(record.key.url), page_host, options.party.first_party, psl);
    } catch (const InvalidHost&) {
      party = std::nullopt;
    }
    bool ok = false;
    ResourceStats s = stats_for(*resource, record, party, options, ok);
    if (!ok) {
      if (skipped) skipped->push_back(record.key.url + " (does not parse)");
      continue;
    }
    if (s.party == Party::kFirst) report.first_party.add(s);
    if (s.party == Party::kThird) report.third_party.add(s);
    report.all.add(s);
    report.resources.push_back(std::move(s));
  }
  return report;
}

PageReport orphan_report(const CoverageStore& store, const ResourceCache& cache, const ReportOptions& options,
                         std::vector<std::string>* skipped) {
  PageReport report;
  for (const auto& record : store.records()) {
    if (!record.pages.empty()) continue;
    const auto resource = cache.find(record.key);
    if (!resource) {
      if (skipped) skipped->push_back(record.key.url + " (not in cache)");
      continue;
    }
    bool ok = false;
    ResourceStats s = stats_for(*resource, record, std::nullopt, options, ok);
    if (!ok) {
      if (skipped) skipped->push_back(record.key.url + " (does not parse)");
      continue;
    }
    report.all.add(s);
    report.resources.push_back(std::move(s));
  }
  return report;
}

NewIdRate new_id_rate(const CoverageStore& store) {
  NewIdRate rate;
  for (const auto& r : store.records()) {
    NewIdEntry e;
    e.key = r.key;
    e.executed = r.executed.size();
    e.late = r.late_ids();
    e.fraction = e.executed == 0 ? 0.0 : static_cast<double>(e.late) / static_cast<double>(e.executed);
    e.beacon_count = r.beacon_count;
    if (e.late > 0) ++rate.resources_with_late_ids;
    rate.resources.push_back(std::move(e));
  }
  rate.share_with_late_ids =
      rate.resources.empty() ? 0.0
                             : static_cast<double>(rate.resources_with_late_ids) / static_cast<double>(rate.resources.size());
  return rate;
}

std::string report_csv(const std::vector<PageReport>& pages) {
  std::vector<std::string> header(kResourceCsvColumns.begin(), kResourceCsvColumns.end());
  std::string out = join_row(header);
  for (const auto& page : pages) {
    for (const auto& s : page.resources) {
      out += join_row({"resource", page.page_url, s.key.url, s.key.content_hash, party_text(s.party).value_or(""), "1",
                       std::to_string(s.total_functions), std::to_string(s.executed_functions),
                       std::to_string(s.superfluous_functions), format_double(s.superfluous_pct),
                       std::to_string(s.total_anonymous), format_double(s.anonymous_pct), std::to_string(s.total_bytes),
                       std::to_string(s.superfluous_bytes), format_double(s.superfluous_bytes_pct),
                       std::to_string(s.new_ids_after_first_beacon), std::to_string(s.beacon_count),
                       opt_size(s.original_gzip_bytes), opt_size(s.elided_gzip_bytes)});
    }
    const std::pair<const char*, const AggregateStats*> groups[] = {
        {"first", &page.first_party}, {"third", &page.third_party}, {"all", &page.all}};
    for (const auto& [name, agg] : groups) {
      std::optional<std::size_t> original_gzip;
      std::optional<std::size_t> elided_gzip;
      for (const auto& s : page.resources) {
        const bool member = std::string_view(name) == "all" || party_text(s.party) == std::string(name);
        if (!member || !s.original_gzip_bytes) continue;
        original_gzip = original_gzip.value_or(0) + *s.original_gzip_bytes;
        elided_gzip = elided_gzip.value_or(0) + s.elided_gzip_bytes.value_or(0);
      }
      out += join_row({std::string("page_") + name, page.page_url, "", "", name, std::to_string(agg->resources),
                       std::to_string(agg->total_functions), std::to_string(agg->executed_functions),
                       std::to_string(agg->superfluous_functions), opt_double(agg->superfluous_pct()),
                       std::to_string(agg->total_anonymous), opt_double(agg->anonymous_pct()),
                       std::to_string(agg->total_bytes), std::to_string(agg->superfluous_bytes),
                       opt_double(agg->superfluous_bytes_pct()), std::to_string(agg->new_ids_after_first_beacon),
                       std::to_string(agg->beacon_count), opt_size(original_gzip), opt_size(elided_gzip)});
    }
  }
  return out;
}

std::string cdf_csv(const std::vector<PageReport>& pages) {
  // (metric, party) -> values
  std::map<std::pair<std::string, std::string>, std::vector<double>> series;
  for (const auto& page : pages) {
    for (const auto& s : page.resources) {
      for (const std::string party : {party_text(s.party).value_or("unknown"), std::string("all")}) {
        series[{"resource_superfluous_pct", party}].push_back(s.superfluous_pct);
        series[{"resource_superfluous_bytes_pct", party}].push_back(s.superfluous_bytes_pct);
        series[{"resource_anonymous_pct", party}].push_back(s.anonymous_pct);
      }
    }
    if (page.page_url.empty()) continue;
    const std::pair<const char*, const AggregateStats*> groups[] = {
        {"first", &page.first_party}, {"third", &page.third_party}, {"all", &page.all}};
    for (const auto& [name, agg] : groups) {
      if (const auto v = agg->superfluous_bytes_pct()) series[{"page_superfluous_bytes_pct", name}].push_back(*v);
    }
  }
  std::string out = join_row({"metric", "party", "value", "cumulative_fraction"});
  for (auto& [id, values] : series) {
    std::sort(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double frac = static_cast<double>(i + 1) / static_cast<double>(values.size());
      out += join_row({id.first, id.second, format_double(values[i]), format_double(frac)});
    }
  }
  return out;
}

std::string new_id_csv(const NewIdRate& rate) {
  std::string out = join_row({"row_type", "url", "content_hash", "beacon_count", "executed", "late", "fraction"});
  for (const auto& e : rate.resources) {
    out += join_row({"resource", e.key.url, e.key.content_hash, std::to_string(e.beacon_count),
                     std::to_string(e.executed), std::to_string(e.late), format_double(e.fraction)});
  }
  out += join_row({"summary", "", "", "", std::to_string(rate.resources.size()),
                   std::to_string(rate.resources_with_late_ids), format_double(rate.share_with_late_ids)});
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      field_started = false;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw Error("unterminated quoted csv field");
  if (field_started || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ReportRow> parse_report_csv(std::string_view csv) {
  const auto rows = parse_csv(csv);
  if (rows.empty()) throw Error("empty report csv");
  if (rows[0].size() != kResourceCsvColumns.size() ||
      !std::equal(rows[0].begin(), rows[0].end(), kResourceCsvColumns.begin())) {
    throw Error("unexpected report csv header");
  }
  std::vector<ReportRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != kResourceCsvColumns.size()) throw Error("report csv row " + std::to_string(i) + " has wrong arity");
    ReportRow r;
    r.row_type = f[0];
    r.page_url = f[1];
    r.stats.key = {f[2], f[3]};
    if (f[4] == "first") r.stats.party = Party::kFirst;
    if (f[4] == "third") r.stats.party = Party::kThird;
    r.resources = parse_size(f[5]);
    r.stats.total_functions = parse_size(f[6]);
    r.stats.executed_functions = parse_size(f[7]);
    r.stats.superfluous_functions = parse_size(f[8]);
    r.pct_defined = !f[9].empty();
    if (r.pct_defined) {
      r.stats.superfluous_pct = parse_double(f[9]);
      r.stats.anonymous_pct = parse_double(f[11]);
      r.stats.superfluous_bytes_pct = parse_double(f[14]);
    }
    r.stats.total_anonymous = parse_size(f[10]);
    r.stats.total_bytes = parse_size(f[12]);
    r.stats.superfluous_bytes = parse_size(f[13]);
    r.stats.new_ids_after_first_beacon = parse_size(f[15]);
    r.stats.beacon_count = parse_size(f[16]);
    if (!f[17].empty()) r.stats.original_gzip_bytes = parse_size(f[17]);
    if (!f[18].empty()) r.stats.elided_gzip_bytes = parse_size(f[18]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace jscov
