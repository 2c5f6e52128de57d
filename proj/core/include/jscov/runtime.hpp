#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

#include "jscov/analyzer.hpp"

namespace jscov {

inline constexpr std::string_view kBeaconPath = "/__jscov__/beacon";
inline constexpr std::string_view kSidecarPathPrefix = "/__jscov__/body/";

// Every fragment inserted by instrument() is wrapped in these comments so the
// instrumentation can be removed mechanically.
inline constexpr std::string_view kInsertOpen = "/*@jscov{*/";
inline constexpr std::string_view kInsertClose = "/*}@jscov*/";

// Browser-side code injected into JS resources. Placeholders are written
// @NAME@: GLOBAL, KEY_JSON, BEACON_URL, FID, BODY_URL, DIRECTIVES,
// ORIGINAL_BODY.
struct RuntimeTemplates {
  // Declares the per-resource coverage array and schedules the beacon.
  std::string prologue;
  // Records one function id; must never throw.
  std::string marker;
  // Opening and closing halves used to turn `x => expr` into a block body.
  std::string arrow_open;
  std::string arrow_close;
  // Replacement for a block body: fetch the sidecar synchronously and
  // evaluate it in the function's own scope.
  std::string stub;
  // Same, as an expression, for concise arrow bodies.
  std::string expression_stub;
  // Generator bodies delegate to the generator the sidecar creates.
  std::string generator_stub;
  // Sidecar text: evaluates the original body in the caller's scope.
  std::string sidecar_wrapper;
  std::string async_sidecar_wrapper;
  std::string generator_sidecar_wrapper;
  std::string async_generator_sidecar_wrapper;

  static const RuntimeTemplates& defaults();
};

using TemplateValues = std::initializer_list<std::pair<std::string_view, std::string_view>>;

// Substitutes @NAME@ placeholders. Throws std::invalid_argument when a
// placeholder has no value.
std::string render(std::string_view tpl, TemplateValues values);

// Collision-safe identifier for a resource's coverage array.
std::string coverage_global_name(const ResourceKey& key);

// {"url":...,"hash":...} with non-ASCII escaped, usable as a JS literal.
std::string key_json(const ResourceKey& key);

// JSON string literal, ASCII-only; valid as a JS string literal.
std::string js_string_literal(std::string_view text);

// "/__jscov__/body/<content_hash>"
std::string sidecar_url_base(const ResourceKey& key);

}  // namespace jscov
