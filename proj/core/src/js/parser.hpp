#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "js/lexer.hpp"
#include "jscov/analyzer.hpp"

namespace jscov::js {

struct RawUnit {
  UnitKind kind = UnitKind::kDeclaration;
  SourceSpan span;
  SourceSpan body_span;
  std::optional<std::string> name;
  bool is_async = false;
  bool is_generator = false;
  bool expression_body = false;
  // The body declares `var x` where x is also a parameter.
  bool redeclares_parameter = false;
  std::size_t statements_start = 0;
};

struct ParseOutput {
  std::vector<RawUnit> units;  // in completion order
  std::size_t prologue_offset = 0;
};

// Recursive-descent recognizer for ECMAScript 2022 scripts and modules. It
// builds no tree; it validates syntax and reports every function-like unit.
// Throws ParseError.
ParseOutput parse_units(std::string_view source);

}  // namespace jscov::js
