#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jscov/errors.hpp"

namespace jscov {

// Half-open byte range [start, end) into a decoded resource body.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool contains(const SourceSpan& other) const {
    return start <= other.start && other.end <= end;
  }
  std::string_view slice(std::string_view text) const {
    return text.substr(start, end - start);
  }
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class UnitKind {
  kDeclaration,
  kExpression,
  kArrow,
  kMethod,
  kGetter,
  kSetter,
  kConstructor,
};

std::string_view to_string(UnitKind kind);
std::optional<UnitKind> unit_kind_from_string(std::string_view text);

using FunctionId = std::string;

struct FunctionUnit {
  FunctionId id;
  UnitKind kind = UnitKind::kDeclaration;
  std::optional<std::string> name;
  SourceSpan span;
  // Includes the braces, or is the bare expression for `x => expr`.
  SourceSpan body_span;
  bool is_anonymous = true;
  bool is_async = false;
  bool is_generator = false;
  // 0 for units not nested in any other unit.
  int depth = 0;
  // True when body_span is an expression rather than a `{...}` block.
  bool expression_body = false;
  // End of the directive prologue ("use strict" etc.) inside a block body;
  // equals body_span.start + 1 when the body has no directives.
  std::size_t statements_start = 0;
  // The body var-declares one of the parameter names. Such bodies are never
  // elided: the sidecar's own `var` would start out undefined instead of
  // holding the argument.
  bool redeclares_parameter = false;
};

struct ResourceKey {
  std::string url;
  std::string content_hash;

  friend bool operator==(const ResourceKey&, const ResourceKey&) = default;
  friend auto operator<=>(const ResourceKey&, const ResourceKey&) = default;
};

// Strips the fragment; the url is otherwise taken as given.
ResourceKey make_resource_key(std::string_view url, std::string_view body);

struct ResourceAnalysis {
  ResourceKey key;
  std::vector<FunctionUnit> units;  // ascending span.start
  std::size_t source_len = 0;
  bool parse_ok = false;
  // End of the top-level directive prologue (and hashbang line), where a
  // prologue may be inserted without changing program semantics.
  std::size_t prologue_offset = 0;

  const FunctionUnit* find(std::string_view id) const;
};

// Never throws on bad input: unparseable sources come back with
// parse_ok == false and no units.
ResourceAnalysis analyze(std::string_view source, const ResourceKey& key);

// Throws ParseError with an offset on syntax errors.
ResourceAnalysis analyze_or_throw(std::string_view source, const ResourceKey& key);

FunctionId function_id(const ResourceKey& key, std::size_t unit_start, UnitKind kind);

}  // namespace jscov
