#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jscov/analyzer.hpp"
#include "jscov/runtime.hpp"

namespace jscov {

struct InstrumentedResource {
  ResourceKey key;
  std::string body;
  std::size_t marker_count = 0;
  SourceSpan prologue_span;  // within body, sentinel comments included
};

struct ElisionPolicy {
  // Extra margin: a body is elided only when it is longer than its stub
  // plus this many bytes.
  std::size_t min_body_bytes = 0;
  std::set<UnitKind> skip_kinds{UnitKind::kGetter, UnitKind::kSetter, UnitKind::kConstructor};
  bool skip_async = true;
  bool skip_generators = true;
  // Refuse to elide when the stub would not be smaller than the body.
  bool size_guard = true;

  // Nothing is skipped and the size guard is off.
  static ElisionPolicy permissive();
};

struct ElisionStats {
  std::size_t total_functions = 0;
  // Units whose code left the main body: replaced units plus every unit
  // nested inside a replaced body.
  std::size_t elided_functions = 0;
  // Not executed, not inside an elided unit, but kept because of the policy
  // or because the stub would not be smaller.
  std::size_t skipped_functions = 0;
  std::size_t total_anonymous = 0;
  std::size_t elided_anonymous = 0;
  std::size_t total_bytes = 0;
  std::size_t elided_bytes = 0;  // sum of replaced body spans

  friend bool operator==(const ElisionStats&, const ElisionStats&) = default;
};

struct ElisionResult {
  ResourceKey key;
  std::string body;
  std::map<FunctionId, std::string> sidecars;
  ElisionStats stats;
  // Body spans of the source that were replaced, ascending.
  std::vector<SourceSpan> replaced;
};

// Throws AnalysisMismatch when the source does not hash to the analysis key
// or the analysis did not parse, and Error when the source already carries
// instrumentation.
InstrumentedResource instrument(std::string_view source, const ResourceAnalysis& analysis,
                                const RuntimeTemplates& runtime, std::string_view beacon_url);

// Removes every sentinel-wrapped insertion.
std::string strip_instrumentation(std::string_view instrumented);

ElisionResult elide(std::string_view source, const ResourceAnalysis& analysis,
                    const std::set<FunctionId>& executed, const ElisionPolicy& policy,
                    std::string_view sidecar_url_base,
                    const RuntimeTemplates& runtime = RuntimeTemplates::defaults());

// Stub text that would replace the unit's body.
std::string stub_for(std::string_view source, const FunctionUnit& unit,
                     std::string_view sidecar_url_base, const RuntimeTemplates& runtime);

// Directly evaluable sidecar text for the unit's body.
std::string sidecar_for(std::string_view source, const FunctionUnit& unit,
                        const RuntimeTemplates& runtime);

bool policy_allows(const ElisionPolicy& policy, const FunctionUnit& unit);

// Keeps only the used ranges, in order. Throws RangeError when the ranges are
// out of bounds, unsorted or overlapping.
std::string elide_css(std::string_view css, std::span<const SourceSpan> used_ranges);

}  // namespace jscov
