#include "jscov/analyzer.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include "js/parser.hpp"
#include "jscov/digest.hpp"

namespace jscov {

namespace {

constexpr std::array<std::string_view, 7> kKindNames = {
    "declaration", "expression", "arrow", "method", "getter", "setter", "constructor",
};

constexpr std::size_t kFunctionIdLength = 16;

}  // namespace

std::string_view to_string(UnitKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<UnitKind> unit_kind_from_string(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text) return static_cast<UnitKind>(i);
  }
  return std::nullopt;
}

ResourceKey make_resource_key(std::string_view url, std::string_view body) {
  const auto hash = url.find('#');
  if (hash != std::string_view::npos) url = url.substr(0, hash);
  return {std::string(url), sha256_hex(body)};
}

const FunctionUnit* ResourceAnalysis::find(std::string_view id) const {
  for (const auto& unit : units) {
    if (unit.id == id) return &unit;
  }
  return nullptr;
}

FunctionId function_id(const ResourceKey& key, std::size_t unit_start, UnitKind kind) {
  std::string material = key.content_hash;
  material += ':';
  material += std::to_string(unit_start);
  material += ':';
  material += to_string(kind);
  return sha256_hex(material).substr(0, kFunctionIdLength);
}

ResourceAnalysis analyze_or_throw(std::string_view source, const ResourceKey& key) {
  js::ParseOutput parsed = js::parse_units(source);
  std::sort(parsed.units.begin(), parsed.units.end(),
            [](const js::RawUnit& a, const js::RawUnit& b) {
              if (a.span.start != b.span.start) return a.span.start < b.span.start;
              return a.span.end > b.span.end;
            });

  ResourceAnalysis analysis;
  analysis.key = key;
  analysis.source_len = source.size();
  analysis.prologue_offset = parsed.prologue_offset;
  analysis.units.reserve(parsed.units.size());

  std::vector<std::size_t> open_ends;
  std::unordered_set<std::string> seen;
  for (auto& raw : parsed.units) {
    while (!open_ends.empty() && open_ends.back() <= raw.span.start) open_ends.pop_back();
    FunctionUnit unit;
    unit.kind = raw.kind;
    unit.span = raw.span;
    unit.body_span = raw.body_span;
    unit.name = std::move(raw.name);
    unit.is_anonymous = !unit.name.has_value();
    unit.is_async = raw.is_async;
    unit.is_generator = raw.is_generator;
    unit.expression_body = raw.expression_body;
    unit.statements_start = raw.statements_start;
    unit.redeclares_parameter = raw.redeclares_parameter;
    unit.depth = static_cast<int>(open_ends.size());
    unit.id = function_id(key, unit.span.start, unit.kind);
    if (!seen.insert(unit.id).second) {
      throw Error("function id collision at byte " + std::to_string(unit.span.start));
    }
    open_ends.push_back(unit.span.end);
    analysis.units.push_back(std::move(unit));
  }
  analysis.parse_ok = true;
  return analysis;
}

ResourceAnalysis analyze(std::string_view source, const ResourceKey& key) {
  try {
    return analyze_or_throw(source, key);
  } catch (const ParseError&) {
    ResourceAnalysis analysis;
    analysis.key = key;
    analysis.source_len = source.size();
    analysis.parse_ok = false;
    return analysis;
  }
}

}  // namespace jscov
