#include "jscov/transformer.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "jscov/digest.hpp"

namespace jscov {

namespace {

void check_analysis(std::string_view source, const ResourceAnalysis& analysis) {
  if (!analysis.parse_ok) throw AnalysisMismatch("analysis did not parse");
  if (analysis.source_len != source.size() || sha256_hex(source) != analysis.key.content_hash) {
    throw AnalysisMismatch("source does not match analysis for " + analysis.key.url);
  }
}

std::string wrap_insert(std::string_view text) {
  std::string out;
  out.reserve(kInsertOpen.size() + text.size() + kInsertClose.size());
  out += kInsertOpen;
  out += text;
  out += kInsertClose;
  return out;
}

struct Insertion {
  std::size_t offset;
  // At equal offsets: arrow closings first, innermost first.
  int group;
  std::size_t inner_rank;
  std::string text;
  bool is_prologue = false;
};

}  // namespace

ElisionPolicy ElisionPolicy::permissive() {
  ElisionPolicy policy;
  policy.skip_kinds.clear();
  policy.skip_async = false;
  policy.skip_generators = false;
  policy.size_guard = false;
  return policy;
}

InstrumentedResource instrument(std::string_view source, const ResourceAnalysis& analysis,
                                const RuntimeTemplates& runtime, std::string_view beacon_url) {
  check_analysis(source, analysis);
  if (source.find(kInsertOpen) != std::string_view::npos ||
      source.find(kInsertClose) != std::string_view::npos) {
    throw Error("source already carries jscov instrumentation: " + analysis.key.url);
  }

  const std::string global = coverage_global_name(analysis.key);
  std::vector<Insertion> inserts;
  inserts.reserve(analysis.units.size() + 1);
  inserts.push_back({analysis.prologue_offset, 1, 0,
                     wrap_insert(render(runtime.prologue, {{"GLOBAL", global},
                                                           {"KEY_JSON", key_json(analysis.key)},
                                                           {"BEACON_URL", js_string_literal(beacon_url)}})),
                     true});

  for (const auto& unit : analysis.units) {
    const std::string marker =
        render(runtime.marker, {{"GLOBAL", global}, {"FID", js_string_literal(unit.id)}});
    if (unit.expression_body) {
      inserts.push_back({unit.body_span.start, 1, 0,
                         wrap_insert(render(runtime.arrow_open, {{"MARKER", marker}}))});
      // Larger body start means more deeply nested; those close first.
      inserts.push_back({unit.body_span.end, 0, ~unit.body_span.start,
                         wrap_insert(render(runtime.arrow_close, {}))});
    } else {
      inserts.push_back({unit.statements_start, 1, 0, wrap_insert(marker)});
    }
  }
  std::stable_sort(inserts.begin(), inserts.end(), [](const Insertion& a, const Insertion& b) {
    return std::tie(a.offset, a.group, a.inner_rank) < std::tie(b.offset, b.group, b.inner_rank);
  });

  InstrumentedResource result;
  result.key = analysis.key;
  result.marker_count = analysis.units.size();
  std::size_t extra = 0;
  for (const auto& ins : inserts) extra += ins.text.size();
  result.body.reserve(source.size() + extra);
  std::size_t pos = 0;
  for (const auto& ins : inserts) {
    result.body.append(source.substr(pos, ins.offset - pos));
    pos = ins.offset;
    if (ins.is_prologue) result.prologue_span = {result.body.size(), result.body.size() + ins.text.size()};
    result.body += ins.text;
  }
  result.body.append(source.substr(pos));
  return result;
}

std::string strip_instrumentation(std::string_view instrumented) {
  std::string out;
  out.reserve(instrumented.size());
  std::size_t pos = 0;
  while (pos < instrumented.size()) {
    const std::size_t open = instrumented.find(kInsertOpen, pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = instrumented.find(kInsertClose, open + kInsertOpen.size());
    if (close == std::string_view::npos) break;
    out.append(instrumented.substr(pos, open - pos));
    pos = close + kInsertClose.size();
  }
  out.append(instrumented.substr(pos));
  return out;
}

bool policy_allows(const ElisionPolicy& policy, const FunctionUnit& unit) {
  if (unit.redeclares_parameter) return false;
  if (policy.skip_kinds.contains(unit.kind)) return false;
  if (policy.skip_async && unit.is_async) return false;
  if (policy.skip_generators && unit.is_generator) return false;
  return true;
}

std::string stub_for(std::string_view source, const FunctionUnit& unit,
                     std::string_view sidecar_url_base, const RuntimeTemplates& runtime) {
  std::string url(sidecar_url_base);
  url += '/';
  url += unit.id;
  const std::string url_literal = js_string_literal(url);
  if (unit.expression_body) return render(runtime.expression_stub, {{"BODY_URL", url_literal}});
  const std::string_view directives =
      source.substr(unit.body_span.start + 1, unit.statements_start - unit.body_span.start - 1);
  return render(unit.is_generator ? runtime.generator_stub : runtime.stub,
                {{"DIRECTIVES", directives}, {"BODY_URL", url_literal}});
}

std::string sidecar_for(std::string_view source, const FunctionUnit& unit,
                        const RuntimeTemplates& runtime) {
  const std::string_view body = unit.body_span.slice(source);
  const std::string& wrapper = unit.is_generator ? (unit.is_async ? runtime.async_generator_sidecar_wrapper
                                                                  : runtime.generator_sidecar_wrapper)
                               : unit.is_async   ? runtime.async_sidecar_wrapper
                                                 : runtime.sidecar_wrapper;
  if (!unit.expression_body) return render(wrapper, {{"ORIGINAL_BODY", body}});
  std::string paren;
  paren.reserve(body.size() + 2);
  paren += '(';
  paren += body;
  paren += ')';
  return render(wrapper, {{"ORIGINAL_BODY", paren}});
}

ElisionResult elide(std::string_view source, const ResourceAnalysis& analysis,
                    const std::set<FunctionId>& executed, const ElisionPolicy& policy,
                    std::string_view sidecar_url_base, const RuntimeTemplates& runtime) {
  check_analysis(source, analysis);

  ElisionResult result;
  result.key = analysis.key;
  ElisionStats& stats = result.stats;
  stats.total_functions = analysis.units.size();
  stats.total_bytes = source.size();

  // Replaced body spans keyed by start; they never overlap.
  std::map<std::size_t, std::size_t> replaced;
  std::map<std::size_t, std::string> stubs;
  auto inside_replaced = [&](const SourceSpan& span) {
    auto it = replaced.upper_bound(span.start);
    if (it == replaced.begin()) return false;
    --it;
    return span.end <= it->second;
  };

  for (const auto& unit : analysis.units) {
    if (unit.is_anonymous) ++stats.total_anonymous;
    if (inside_replaced(unit.span)) {
      ++stats.elided_functions;
      if (unit.is_anonymous) ++stats.elided_anonymous;
      continue;
    }
    if (executed.contains(unit.id)) continue;
    if (!policy_allows(policy, unit)) {
      ++stats.skipped_functions;
      continue;
    }
    std::string stub = stub_for(source, unit, sidecar_url_base, runtime);
    if (policy.size_guard && unit.body_span.size() <= stub.size() + policy.min_body_bytes) {
      ++stats.skipped_functions;
      continue;
    }
    replaced.emplace(unit.body_span.start, unit.body_span.end);
    stubs.emplace(unit.body_span.start, std::move(stub));
    result.sidecars.emplace(unit.id, sidecar_for(source, unit, runtime));
    ++stats.elided_functions;
    if (unit.is_anonymous) ++stats.elided_anonymous;
    stats.elided_bytes += unit.body_span.size();
  }

  result.body.reserve(source.size());
  std::size_t pos = 0;
  for (const auto& [start, end] : replaced) {
    result.body.append(source.substr(pos, start - pos));
    result.body += stubs.at(start);
    result.replaced.push_back({start, end});
    pos = end;
  }
  result.body.append(source.substr(pos));
  return result;
}

std::string elide_css(std::string_view css, std::span<const SourceSpan> used_ranges) {
  std::size_t total = 0;
  std::size_t prev_end = 0;
  for (std::size_t i = 0; i < used_ranges.size(); ++i) {
    const SourceSpan& r = used_ranges[i];
    if (r.start > r.end || r.end > css.size()) {
      throw RangeError("css range " + std::to_string(i) + " [" + std::to_string(r.start) + "," +
                       std::to_string(r.end) + ") is out of bounds");
    }
    if (i > 0 && r.start < prev_end) {
      throw RangeError("css range " + std::to_string(i) + " overlaps or precedes the previous range");
    }
    prev_end = r.end;
    total += r.size();
  }
  std::string out;
  out.reserve(total);
  for (const auto& r : used_ranges) out.append(r.slice(css));
  return out;
}

}  // namespace jscov
