#include "js/parser.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "jscov/errors.hpp"

namespace jscov::js {

namespace {

constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);
constexpr int kMaxNesting = 800;

// What an expression syntactically was, as far as the cover grammar cares.
enum class Shape {
  kOther,
  kLiteral,
  kIdentifier,
  kMember,
  kCall,
  kParenCover,      // (...) that may turn out to be arrow parameters
  kAsyncCallCover,  // async(...) that may turn out to be async arrow params
  kObjectLit,
  kArrayLit,
};

struct Expr {
  std::size_t start = 0;
  std::size_t end = 0;
  Shape shape = Shape::kOther;
  bool cover_init = false;     // holds `{a = 1}`, legal only as a pattern
  bool must_be_arrow = false;  // `()` or `(a, ...b)`
};

constexpr std::array<std::string_view, 36> kReserved = {
    "break",    "case",       "catch",  "class",  "const",  "continue", "debugger", "default",
    "delete",   "do",         "else",   "enum",   "export", "extends",  "false",    "finally",
    "for",      "function",   "if",     "import", "in",     "instanceof", "new",    "null",
    "return",   "super",      "switch", "this",   "throw",  "true",     "try",      "typeof",
    "var",      "void",       "while",  "with",
};

bool is_reserved(std::string_view word) {
  return std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

constexpr std::array<std::string_view, 16> kAssignOps = {
    "=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=",
    "&&=", "||=", "?\?=",
};

bool is_assign_op(const Token& t) {
  return t.type == Tok::kPunct &&
         std::find(kAssignOps.begin(), kAssignOps.end(), t.text) != kAssignOps.end();
}

constexpr int kExponentPrecedence = 12;

int punct_precedence(std::string_view op) {
  struct Entry {
    std::string_view op;
    int prec;
  };
  static constexpr std::array<Entry, 21> kTable = {{
      {"??", 1},  {"||", 2},  {"&&", 3},  {"|", 4},   {"^", 5},   {"&", 6},  {"==", 7},
      {"!=", 7},  {"===", 7}, {"!==", 7}, {"<", 8},   {">", 8},   {"<=", 8}, {">=", 8},
      {"<<", 9},  {">>", 9},  {">>>", 9}, {"+", 10},  {"-", 10},  {"*", 11}, {"**", 12},
  }};
  for (const auto& e : kTable) {
    if (e.op == op) return e.prec;
  }
  if (op == "/" || op == "%") return 11;
  return 0;
}

struct FunctionContext {
  bool is_async = false;
  bool is_generator = false;
  // Parameter names and body `var` names, to flag bodies that redeclare a
  // parameter. Nested functions keep their own lists.
  std::vector<std::string> params;
  std::vector<std::string> vars;
  bool params_unknown = false;
};

enum class Binding { kNone, kParam, kVar };

struct PropertyKey {
  std::optional<std::string> name;
  bool identifier = false;
  bool computed = false;
  bool is_private = false;
};

struct Body {
  SourceSpan span;
  std::size_t statements_start = 0;
};

class Parser {
 public:
  Parser(std::string_view source, bool module_goal)
      : src_(source), lex_(source), is_module_(module_goal) {
    lex_.set_html_comments(!module_goal);
  }

  ParseOutput run() {
    std::size_t base = lex_.hashbang_length();
    if (base > 0) {
      base += line_terminator_at(src_, base);
    } else if (src_.starts_with("\xEF\xBB\xBF")) {
      base = 3;
    }
    cur_ = lex_.next();
    const std::size_t directives_end = parse_directives();
    out_.prologue_offset = directives_end != kNoOffset ? directives_end : base;
    while (cur_.type != Tok::kEof) parse_statement_list_item();
    return std::move(out_);
  }

 private:
  class NestingGuard {
   public:
    explicit NestingGuard(Parser& p) : p_(p) {
      if (++p_.nesting_ > kMaxNesting) p_.fail("nesting too deep");
    }
    ~NestingGuard() { --p_.nesting_; }
    NestingGuard(const NestingGuard&) = delete;
    NestingGuard& operator=(const NestingGuard&) = delete;

   private:
    Parser& p_;
  };

  class FunctionScope {
   public:
    FunctionScope(Parser& p, FunctionContext ctx)
        : p_(p), saved_(std::move(p.fn_)), saved_binding_(p.binding_) {
      p_.fn_ = std::move(ctx);
      p_.binding_ = Binding::kNone;
      ++p_.function_depth_;
    }
    ~FunctionScope() {
      p_.fn_ = std::move(saved_);
      p_.binding_ = saved_binding_;
      --p_.function_depth_;
    }
    FunctionScope(const FunctionScope&) = delete;
    FunctionScope& operator=(const FunctionScope&) = delete;

   private:
    Parser& p_;
    FunctionContext saved_;
    Binding saved_binding_;
  };

  class BindingMode {
   public:
    BindingMode(Parser& p, Binding mode) : p_(p), saved_(p.binding_) { p_.binding_ = mode; }
    ~BindingMode() { p_.binding_ = saved_; }
    BindingMode(const BindingMode&) = delete;
    BindingMode& operator=(const BindingMode&) = delete;

   private:
    Parser& p_;
    Binding saved_;
  };

  // ---- token plumbing ----------------------------------------------------

  void advance() {
    last_end_ = cur_.end;
    cur_ = lex_.next();
  }

  Token peek() {
    const std::size_t save = lex_.pos();
    Token t = lex_.next();
    lex_.reset(save);
    return t;
  }

  Token peek2() {
    const std::size_t save = lex_.pos();
    lex_.next();
    Token t = lex_.next();
    lex_.reset(save);
    return t;
  }

  bool at(std::string_view punct) const { return cur_.is(punct); }
  bool at_name(std::string_view name) const { return cur_.is_name(name); }

  bool eat(std::string_view punct) {
    if (!at(punct)) return false;
    advance();
    return true;
  }

  void expect(std::string_view punct) {
    if (!eat(punct)) fail("expected '" + std::string(punct) + "'");
  }

  void expect_name(std::string_view name) {
    if (!at_name(name)) fail("expected '" + std::string(name) + "'");
    advance();
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, cur_.start);
  }

  [[noreturn]] void unexpected() const {
    if (cur_.type == Tok::kEof) fail("unexpected end of input");
    fail("unexpected token '" + std::string(cur_.text.substr(0, 32)) + "'");
  }

  void consume_semicolon() {
    if (eat(";")) return;
    if (at("}") || cur_.type == Tok::kEof || cur_.nl_before) return;
    fail("missing semicolon");
  }

  bool await_is_operator() const {
    return fn_.is_async || (function_depth_ == 0 && is_module_);
  }

  void check_binding_name(const Token& t) const {
    if (t.type != Tok::kName) unexpected();
    if (!t.escaped && is_reserved(t.text)) fail("reserved word used as binding");
    if (fn_.is_generator && t.is_name("yield")) fail("yield used as binding in generator");
  }

  void reject_cover(const Expr& e) const {
    if (e.cover_init) throw ParseError("invalid shorthand property initializer", e.start);
    if (e.must_be_arrow) throw ParseError("arrow parameters without '=>'", e.start);
  }

  void note_binding(const Token& t) {
    if (binding_ == Binding::kNone) return;
    std::string name = t.escaped ? decode_identifier(t.text) : std::string(t.text);
    (binding_ == Binding::kParam ? fn_.params : fn_.vars).push_back(std::move(name));
  }

  bool body_redeclares_parameter() const {
    if (fn_.vars.empty()) return false;
    if (fn_.params_unknown) return true;
    for (const std::string& v : fn_.vars) {
      if (std::find(fn_.params.begin(), fn_.params.end(), v) != fn_.params.end()) return true;
    }
    return false;
  }

  // Arrow parameters are parsed as an expression, so their names are
  // re-lexed from the source. Every name token counts, which over-approximates.
  void collect_arrow_params(std::size_t start, std::size_t end) {
    try {
      Lexer lex(src_.substr(0, end));
      lex.set_html_comments(false);
      lex.reset(start);
      for (Token t = lex.next(); t.type != Tok::kEof; t = lex.next()) {
        if (t.type == Tok::kName) {
          fn_.params.push_back(t.escaped ? decode_identifier(t.text) : std::string(t.text));
        }
      }
    } catch (const ParseError&) {
      fn_.params_unknown = true;
    }
  }

  void record(RawUnit unit) { out_.units.push_back(std::move(unit)); }

  // ---- statements --------------------------------------------------------

  // A string token starts a directive when the statement is only that string.
  bool string_is_whole_statement() {
    const Token next = peek();
    if (next.type == Tok::kEof || next.is(";") || next.is("}")) return true;
    if (!next.nl_before) return false;
    if (next.type == Tok::kTemplate) return false;
    if (next.type == Tok::kName) return !(next.is_name("in") || next.is_name("instanceof"));
    if (next.type == Tok::kPunct) {
      return next.is("{") || next.is("++") || next.is("--") || next.is("!") || next.is("~");
    }
    return true;
  }

  // Returns the end offset of the last directive, or kNoOffset.
  std::size_t parse_directives() {
    std::size_t end = kNoOffset;
    while (cur_.type == Tok::kString && string_is_whole_statement()) {
      advance();
      eat(";");
      end = last_end_;
    }
    return end;
  }

  bool let_starts_declaration() {
    const Token next = peek();
    if (next.is("[") || next.is("{")) return true;
    return next.type == Tok::kName && !next.is_name("in") && !next.is_name("instanceof") &&
           !next.is_name("of");
  }

  bool async_function_ahead() {
    if (!at_name("async")) return false;
    const Token next = peek();
    return next.is_name("function") && !next.nl_before;
  }

  void parse_statement_list_item() {
    NestingGuard guard(*this);
    if (cur_.type == Tok::kName && !cur_.escaped) {
      const std::string_view word = cur_.text;
      if (word == "function") {
        parse_function(cur_.start, false, false, false);
        return;
      }
      if (word == "async" && async_function_ahead()) {
        const std::size_t start = cur_.start;
        advance();
        parse_function(start, true, false, false);
        return;
      }
      if (word == "class") {
        parse_class(cur_.start, true, false);
        return;
      }
      if (word == "const" || (word == "let" && let_starts_declaration())) {
        advance();
        parse_var_declarations(false);
        consume_semicolon();
        return;
      }
      if (word == "import") {
        const Token next = peek();
        if (!next.is("(") && !next.is(".")) {
          parse_import_declaration();
          return;
        }
      }
      if (word == "export") {
        parse_export_declaration();
        return;
      }
    }
    parse_statement();
  }

  void parse_statement() {
    if (at("{")) {
      parse_block();
      return;
    }
    if (eat(";")) return;
    if (cur_.type == Tok::kName && !cur_.escaped) {
      const std::string_view word = cur_.text;
      if (word == "var") {
        advance();
        parse_var_declarations(false, true);
        consume_semicolon();
        return;
      }
      if (word == "if") {
        advance();
        parse_paren_expression();
        parse_statement_list_item();
        if (at_name("else")) {
          advance();
          parse_statement_list_item();
        }
        return;
      }
      if (word == "for") {
        parse_for();
        return;
      }
      if (word == "while" || word == "with") {
        advance();
        parse_paren_expression();
        parse_statement_list_item();
        return;
      }
      if (word == "do") {
        advance();
        parse_statement_list_item();
        expect_name("while");
        parse_paren_expression();
        eat(";");
        return;
      }
      if (word == "continue" || word == "break") {
        advance();
        if (cur_.type == Tok::kName && !cur_.nl_before && !is_reserved(cur_.text)) advance();
        consume_semicolon();
        return;
      }
      if (word == "return") {
        if (function_depth_ == 0) fail("return outside of function");
        advance();
        if (!at(";") && !at("}") && cur_.type != Tok::kEof && !cur_.nl_before) {
          parse_expression(false);
        }
        consume_semicolon();
        return;
      }
      if (word == "throw") {
        advance();
        if (cur_.nl_before) fail("line break after throw");
        parse_expression(false);
        consume_semicolon();
        return;
      }
      if (word == "switch") {
        parse_switch();
        return;
      }
      if (word == "try") {
        parse_try();
        return;
      }
      if (word == "debugger") {
        advance();
        consume_semicolon();
        return;
      }
      if (word == "function" || word == "class" || word == "const" || async_function_ahead()) {
        parse_statement_list_item();
        return;
      }
      if (!is_reserved(word) && peek().is(":")) {
        advance();
        advance();
        parse_statement_list_item();
        return;
      }
    }
    parse_expression(false);
    consume_semicolon();
  }

  void parse_paren_expression() {
    expect("(");
    parse_expression(false);
    expect(")");
  }

  void parse_block() {
    expect("{");
    while (!at("}")) {
      if (cur_.type == Tok::kEof) unexpected();
      parse_statement_list_item();
    }
    advance();
  }

  void parse_var_declarations(bool no_in, bool is_var = false) {
    for (;;) {
      {
        BindingMode mode(*this, is_var ? Binding::kVar : Binding::kNone);
        parse_binding_target();
      }
      if (eat("=")) parse_assignment_value(no_in);
      if (!eat(",")) break;
    }
  }

  void parse_for() {
    advance();
    if (at_name("await")) advance();
    expect("(");
    if (at(";")) {
      advance();
      parse_for_classic_rest();
      return;
    }
    bool pattern_init = false;
    if (at_name("var") || at_name("const") || (at_name("let") && let_starts_declaration())) {
      const bool is_var = at_name("var");
      advance();
      parse_var_declarations(true, is_var);
    } else {
      const Expr init = parse_expression_allowing_pattern(true);
      pattern_init = init.cover_init;
    }
    if (at_name("of") || at_name("in")) {
      const bool is_of = at_name("of");
      advance();
      if (is_of) {
        parse_assignment_value(false);
      } else {
        parse_expression(false);
      }
      expect(")");
      parse_statement_list_item();
      return;
    }
    if (pattern_init) fail("invalid shorthand property initializer");
    expect(";");
    parse_for_classic_rest();
  }

  void parse_for_classic_rest() {
    if (!at(";")) parse_expression(false);
    expect(";");
    if (!at(")")) parse_expression(false);
    expect(")");
    parse_statement_list_item();
  }

  void parse_switch() {
    advance();
    parse_paren_expression();
    expect("{");
    while (!at("}")) {
      if (at_name("case")) {
        advance();
        parse_expression(false);
      } else if (at_name("default")) {
        advance();
      } else {
        unexpected();
      }
      expect(":");
      while (!at("}") && !at_name("case") && !at_name("default")) {
        if (cur_.type == Tok::kEof) unexpected();
        parse_statement_list_item();
      }
    }
    advance();
  }

  void parse_try() {
    advance();
    parse_block();
    bool handled = false;
    if (at_name("catch")) {
      advance();
      if (eat("(")) {
        parse_binding_target();
        expect(")");
      }
      parse_block();
      handled = true;
    }
    if (at_name("finally")) {
      advance();
      parse_block();
      handled = true;
    }
    if (!handled) fail("try without catch or finally");
  }

  void expect_module_specifier() {
    if (cur_.type != Tok::kString) fail("expected module specifier");
    advance();
    if (at_name("with") || (at_name("assert") && !cur_.nl_before)) {
      advance();
      const Expr attrs = parse_object_literal();
      reject_cover(attrs);
    }
  }

  void parse_module_name() {
    if (cur_.type != Tok::kName && cur_.type != Tok::kString) unexpected();
    advance();
  }

  void parse_named_specifiers() {
    expect("{");
    while (!at("}")) {
      parse_module_name();
      if (at_name("as")) {
        advance();
        parse_module_name();
      }
      if (!at("}")) expect(",");
    }
    advance();
  }

  void parse_import_declaration() {
    set_module_goal();
    advance();
    if (cur_.type == Tok::kString) {
      expect_module_specifier();
      consume_semicolon();
      return;
    }
    bool need_more = true;
    if (cur_.type == Tok::kName && !at_name("from")) {
      check_binding_name(cur_);
      advance();
      need_more = eat(",");
    } else if (at_name("from") && peek().is_name("from")) {
      advance();  // default import literally named `from`
      need_more = false;
    }
    if (need_more) {
      if (eat("*")) {
        expect_name("as");
        check_binding_name(cur_);
        advance();
      } else if (at("{")) {
        parse_named_specifiers();
      } else {
        unexpected();
      }
    }
    expect_name("from");
    expect_module_specifier();
    consume_semicolon();
  }

  void parse_export_declaration() {
    set_module_goal();
    advance();
    if (at_name("default")) {
      advance();
      if (at_name("function")) {
        parse_function(cur_.start, false, false, true);
        return;
      }
      if (async_function_ahead()) {
        const std::size_t start = cur_.start;
        advance();
        parse_function(start, true, false, true);
        return;
      }
      if (at_name("class")) {
        parse_class(cur_.start, true, true);
        return;
      }
      parse_assignment_value(false);
      consume_semicolon();
      return;
    }
    if (eat("*")) {
      if (at_name("as")) {
        advance();
        parse_module_name();
      }
      expect_name("from");
      expect_module_specifier();
      consume_semicolon();
      return;
    }
    if (at("{")) {
      parse_named_specifiers();
      if (at_name("from")) {
        advance();
        expect_module_specifier();
      }
      consume_semicolon();
      return;
    }
    if (at_name("var") || at_name("let") || at_name("const") || at_name("function") ||
        at_name("class") || async_function_ahead()) {
      if (at_name("var")) {
        advance();
        parse_var_declarations(false);
        consume_semicolon();
      } else if (at_name("let")) {
        advance();
        parse_var_declarations(false);
        consume_semicolon();
      } else {
        parse_statement_list_item();
      }
      return;
    }
    unexpected();
  }

  // ---- functions and classes ----------------------------------------------

  Body parse_function_body() {
    Body body;
    body.span.start = cur_.start;
    expect("{");
    body.statements_start = body.span.start + 1;
    const std::size_t directives_end = parse_directives();
    if (directives_end != kNoOffset) body.statements_start = directives_end;
    while (!at("}")) {
      if (cur_.type == Tok::kEof) unexpected();
      parse_statement_list_item();
    }
    body.span.end = cur_.end;
    advance();
    return body;
  }

  void parse_formal_parameters() {
    BindingMode mode(*this, Binding::kParam);
    expect("(");
    while (!at(")")) {
      if (eat("...")) {
        parse_binding_target();
        break;
      }
      parse_binding_element();
      if (!at(")")) expect(",");
    }
    expect(")");
  }

  void parse_binding_target() {
    if (at("[")) {
      parse_array_pattern();
    } else if (at("{")) {
      parse_object_pattern();
    } else {
      check_binding_name(cur_);
      note_binding(cur_);
      advance();
    }
  }

  void parse_binding_element() {
    parse_binding_target();
    if (eat("=")) parse_assignment_value(false);
  }

  void parse_array_pattern() {
    expect("[");
    while (!at("]")) {
      if (eat(",")) continue;
      if (eat("...")) {
        parse_binding_target();
        break;
      }
      parse_binding_element();
      if (!at("]")) expect(",");
    }
    expect("]");
  }

  void parse_object_pattern() {
    expect("{");
    while (!at("}")) {
      if (eat("...")) {
        check_binding_name(cur_);
        note_binding(cur_);
        advance();
      } else {
        const Token key_token = cur_;
        const PropertyKey key = parse_property_key(false);
        if (eat(":")) {
          parse_binding_element();
        } else {
          if (!key.identifier) unexpected();
          check_binding_name(key_token);
          note_binding(key_token);
          if (eat("=")) parse_assignment_value(false);
        }
      }
      if (!at("}")) expect(",");
    }
    expect("}");
  }

  // cur_ is `function`; `start` covers a preceding `async`.
  Expr parse_function(std::size_t start, bool is_async, bool is_expression, bool name_optional) {
    advance();
    const bool is_generator = eat("*");
    RawUnit unit;
    unit.kind = is_expression ? UnitKind::kExpression : UnitKind::kDeclaration;
    unit.is_async = is_async;
    unit.is_generator = is_generator;
    if (cur_.type == Tok::kName) {
      check_binding_name(cur_);
      unit.name = cur_.escaped ? decode_identifier(cur_.text) : std::string(cur_.text);
      advance();
    } else if (!is_expression && !name_optional) {
      fail("function name expected");
    }
    {
      FunctionScope scope(*this, {is_async, is_generator});
      parse_formal_parameters();
      const Body body = parse_function_body();
      unit.body_span = body.span;
      unit.statements_start = body.statements_start;
      unit.redeclares_parameter = body_redeclares_parameter();
    }
    unit.span = {start, last_end_};
    record(std::move(unit));
    return {start, last_end_, Shape::kOther};
  }

  // cur_ is the `(` of the parameter list.
  void parse_method(std::size_t start, UnitKind kind, std::optional<std::string> name,
                    bool is_async, bool is_generator) {
    RawUnit unit;
    unit.kind = kind;
    unit.name = std::move(name);
    unit.is_async = is_async;
    unit.is_generator = is_generator;
    {
      FunctionScope scope(*this, {is_async, is_generator});
      parse_formal_parameters();
      const Body body = parse_function_body();
      unit.body_span = body.span;
      unit.statements_start = body.statements_start;
      unit.redeclares_parameter = body_redeclares_parameter();
    }
    unit.span = {start, last_end_};
    record(std::move(unit));
  }

  // Cursor is just past `=>`.
  Expr parse_arrow_body(std::size_t start, bool is_async, bool no_in) {
    RawUnit unit;
    unit.kind = UnitKind::kArrow;
    unit.is_async = is_async;
    {
      // Arrows see the enclosing generator's `yield` as an identifier.
      FunctionScope scope(*this, {is_async, false});
      collect_arrow_params(start, last_end_ - 2);
      if (at("{")) {
        const Body body = parse_function_body();
        unit.body_span = body.span;
        unit.statements_start = body.statements_start;
        unit.redeclares_parameter = body_redeclares_parameter();
      } else {
        const Expr e = parse_assignment_value(no_in);
        unit.body_span = {e.start, e.end};
        unit.statements_start = e.start;
        unit.expression_body = true;
      }
    }
    unit.span = {start, last_end_};
    record(std::move(unit));
    return {start, last_end_, Shape::kOther};
  }

  void set_module_goal() {
    is_module_ = true;
    lex_.set_html_comments(false);
  }

  PropertyKey parse_property_key(bool allow_private) {
    PropertyKey key;
    switch (cur_.type) {
      case Tok::kName:
        key.name = cur_.escaped ? decode_identifier(cur_.text) : std::string(cur_.text);
        key.identifier = true;
        advance();
        break;
      case Tok::kString:
        key.name = std::string(cur_.text.substr(1, cur_.text.size() - 2));
        advance();
        break;
      case Tok::kNumber:
        key.name = std::string(cur_.text);
        advance();
        break;
      case Tok::kPrivateName:
        if (!allow_private) unexpected();
        key.name = cur_.escaped ? decode_identifier(cur_.text) : std::string(cur_.text);
        key.is_private = true;
        advance();
        break;
      case Tok::kPunct:
        if (at("[")) {
          advance();
          parse_assignment_value(false);
          expect("]");
          key.computed = true;
          break;
        }
        unexpected();
      default:
        unexpected();
    }
    return key;
  }

  Expr parse_class(std::size_t start, bool is_declaration, bool name_optional) {
    advance();
    if (cur_.type == Tok::kName && !at_name("extends")) {
      check_binding_name(cur_);
      advance();
    } else if (is_declaration && !name_optional) {
      fail("class name expected");
    }
    if (at_name("extends")) {
      advance();
      const Expr heritage = parse_lhs();
      reject_cover(heritage);
    }
    expect("{");
    while (!at("}")) {
      if (cur_.type == Tok::kEof) unexpected();
      if (eat(";")) continue;
      parse_class_member();
    }
    advance();
    return {start, last_end_, Shape::kOther};
  }

  void parse_class_member() {
    const std::size_t start = cur_.start;
    auto modifier_applies = [](const Token& next) {
      return !(next.is("(") || next.is("=") || next.is(";") || next.is("}") ||
               next.type == Tok::kEof);
    };
    bool is_static = false;
    bool is_async = false;
    bool is_generator = false;
    UnitKind kind = UnitKind::kMethod;
    if (at_name("static")) {
      const Token next = peek();
      if (next.is("{")) {
        advance();
        FunctionScope scope(*this, {false, false});
        parse_block();
        return;
      }
      if (modifier_applies(next)) {
        advance();
        is_static = true;
      }
    }
    if (at_name("async")) {
      const Token next = peek();
      if (modifier_applies(next) && !next.nl_before) {
        advance();
        is_async = true;
      }
    }
    if (eat("*")) is_generator = true;
    if (!is_async && !is_generator && (at_name("get") || at_name("set"))) {
      if (modifier_applies(peek())) {
        kind = at_name("get") ? UnitKind::kGetter : UnitKind::kSetter;
        advance();
      }
    }
    const PropertyKey key = parse_property_key(true);
    if (at("(")) {
      if (!is_static && kind == UnitKind::kMethod && !is_async && !is_generator &&
          !key.computed && !key.is_private && key.name == "constructor") {
        kind = UnitKind::kConstructor;
      }
      parse_method(start, kind, key.computed ? std::nullopt : key.name, is_async, is_generator);
      return;
    }
    if (is_async || is_generator || kind != UnitKind::kMethod) unexpected();
    if (eat("=")) {
      FunctionScope scope(*this, {false, false});
      parse_assignment_value(false);
    }
    consume_semicolon();
  }

  // ---- expressions -------------------------------------------------------

  Expr parse_expression(bool no_in) {
    Expr e = parse_assignment_value(no_in);
    if (at(",")) {
      while (eat(",")) parse_assignment_value(no_in);
      e = {e.start, last_end_, Shape::kOther};
    }
    return e;
  }

  // For-statement heads, where `[a, b]` or `{a = 1}` may be a pattern.
  Expr parse_expression_allowing_pattern(bool no_in) {
    Expr e = parse_assignment(no_in);
    if (at(",")) {
      reject_cover(e);
      while (eat(",")) parse_assignment_value(no_in);
      e = {e.start, last_end_, Shape::kOther};
    }
    return e;
  }

  Expr parse_assignment_value(bool no_in) {
    Expr e = parse_assignment(no_in);
    reject_cover(e);
    return e;
  }

  Expr parse_assignment(bool no_in) {
    NestingGuard guard(*this);
    const std::size_t start = cur_.start;
    if (fn_.is_generator && at_name("yield")) return parse_yield(no_in);

    if (cur_.type == Tok::kName) {
      if (at_name("async")) {
        const Token next = peek();
        if (next.type == Tok::kName && !next.nl_before && !is_reserved(next.text)) {
          const Token arrow = peek2();
          if (arrow.is("=>") && !arrow.nl_before) {
            advance();
            check_binding_name(cur_);
            advance();
            advance();
            return parse_arrow_body(start, true, no_in);
          }
        }
      }
      if (cur_.escaped || !is_reserved(cur_.text)) {
        const Token next = peek();
        if (next.is("=>") && !next.nl_before) {
          check_binding_name(cur_);
          advance();
          advance();
          return parse_arrow_body(start, false, no_in);
        }
      }
    }

    Expr left = parse_conditional(no_in);
    if (at("=>")) {
      if (cur_.nl_before) fail("line break before '=>'");
      if (left.shape == Shape::kParenCover || left.shape == Shape::kAsyncCallCover) {
        advance();
        return parse_arrow_body(start, left.shape == Shape::kAsyncCallCover, no_in);
      }
      unexpected();
    }
    if (left.must_be_arrow) throw ParseError("arrow parameters without '=>'", left.start);
    if (is_assign_op(cur_)) {
      const bool plain = at("=");
      switch (left.shape) {
        case Shape::kIdentifier:
        case Shape::kMember:
        case Shape::kCall:
        case Shape::kParenCover:
          if (left.cover_init) throw ParseError("invalid assignment target", left.start);
          break;
        case Shape::kObjectLit:
        case Shape::kArrayLit:
          if (!plain) throw ParseError("invalid compound assignment target", left.start);
          break;
        default:
          throw ParseError("invalid assignment target", left.start);
      }
      advance();
      parse_assignment_value(no_in);
      return {start, last_end_, Shape::kOther};
    }
    if (left.cover_init && left.shape != Shape::kObjectLit && left.shape != Shape::kArrayLit) {
      throw ParseError("invalid shorthand property initializer", left.start);
    }
    return left;
  }

  Expr parse_yield(bool no_in) {
    const std::size_t start = cur_.start;
    advance();
    const bool has_argument =
        !cur_.nl_before && cur_.type != Tok::kEof && !at(")") && !at("]") && !at("}") &&
        !at(",") && !at(";") && !at(":") && !at_name("in");
    if (has_argument || at("*")) {
      eat("*");
      parse_assignment_value(no_in);
    }
    return {start, last_end_, Shape::kOther};
  }

  Expr parse_conditional(bool no_in) {
    Expr e = parse_binary(1, no_in);
    if (!at("?")) return e;
    reject_cover(e);
    advance();
    parse_assignment_value(false);
    expect(":");
    parse_assignment_value(no_in);
    return {e.start, last_end_, Shape::kOther};
  }

  int binary_precedence(bool no_in) const {
    if (cur_.type == Tok::kPunct) return punct_precedence(cur_.text);
    if (cur_.type == Tok::kName && !cur_.escaped) {
      if (cur_.text == "instanceof") return 8;
      if (cur_.text == "in" && !no_in) return 8;
    }
    return 0;
  }

  Expr parse_binary(int min_precedence, bool no_in) {
    Expr left = parse_unary();
    for (;;) {
      const int prec = binary_precedence(no_in);
      if (prec == 0 || prec < min_precedence) break;
      reject_cover(left);
      advance();
      const int next_min = prec == kExponentPrecedence ? prec : prec + 1;
      const Expr right = parse_binary(next_min, no_in);
      reject_cover(right);
      left = {left.start, last_end_, Shape::kOther};
    }
    return left;
  }

  Expr parse_unary() {
    NestingGuard guard(*this);
    const std::size_t start = cur_.start;
    const bool prefix_op = (cur_.type == Tok::kPunct &&
                            (at("!") || at("~") || at("+") || at("-") || at("++") || at("--"))) ||
                           at_name("delete") || at_name("void") || at_name("typeof") ||
                           (at_name("await") && await_is_operator());
    if (prefix_op) {
      advance();
      reject_cover(parse_unary());
      return {start, last_end_, Shape::kOther};
    }
    Expr e = parse_lhs();
    if ((at("++") || at("--")) && !cur_.nl_before) {
      reject_cover(e);
      advance();
      return {start, last_end_, Shape::kOther};
    }
    return e;
  }

  Expr parse_lhs() {
    const std::size_t start = cur_.start;
    Expr e;
    if (at_name("new")) {
      e = parse_new();
    } else if (at_name("super")) {
      advance();
      if (!at(".") && !at("[") && !at("(")) unexpected();
      e = {start, last_end_, Shape::kMember};
    } else if (at_name("import")) {
      advance();
      if (eat(".")) {
        expect_name("meta");
        e = {start, last_end_, Shape::kMember};
      } else if (at("(")) {
        parse_arguments();
        e = {start, last_end_, Shape::kCall};
      } else {
        unexpected();
      }
    } else {
      e = parse_primary();
    }
    return parse_tails(e, true);
  }

  Expr parse_new() {
    const std::size_t start = cur_.start;
    advance();
    if (eat(".")) {
      expect_name("target");
      return {start, last_end_, Shape::kMember};
    }
    Expr callee;
    if (at_name("new")) {
      callee = parse_new();
    } else if (at_name("super") || at_name("import")) {
      unexpected();
    } else {
      callee = parse_primary();
    }
    callee = parse_tails(callee, false);
    reject_cover(callee);
    if (at("(")) parse_arguments();
    return {start, last_end_, Shape::kMember};
  }

  Expr parse_tails(Expr e, bool allow_call) {
    bool first = true;
    for (;;) {
      if (at(".")) {
        reject_cover(e);
        advance();
        if (cur_.type != Tok::kName && cur_.type != Tok::kPrivateName) unexpected();
        advance();
        e.shape = Shape::kMember;
      } else if (at("?.")) {
        if (!allow_call) fail("optional chain in new expression");
        reject_cover(e);
        advance();
        if (at("(")) {
          parse_arguments();
          e.shape = Shape::kCall;
        } else if (eat("[")) {
          parse_expression(false);
          expect("]");
          e.shape = Shape::kMember;
        } else if (cur_.type == Tok::kName || cur_.type == Tok::kPrivateName) {
          advance();
          e.shape = Shape::kMember;
        } else {
          unexpected();
        }
      } else if (at("[")) {
        reject_cover(e);
        advance();
        parse_expression(false);
        expect("]");
        e.shape = Shape::kMember;
      } else if (cur_.type == Tok::kTemplate) {
        reject_cover(e);
        parse_template();
        e.shape = Shape::kMember;
      } else if (at("(") && allow_call) {
        const bool async_cover = first && e.shape == Shape::kIdentifier && !cur_.nl_before &&
                                 src_.substr(e.start, e.end - e.start) == "async";
        if (async_cover) {
          const Expr args = parse_arguments_cover();
          e.shape = Shape::kAsyncCallCover;
          e.cover_init = args.cover_init;
          e.must_be_arrow = args.must_be_arrow;
        } else {
          reject_cover(e);
          parse_arguments();
          e.shape = Shape::kCall;
        }
      } else {
        break;
      }
      e.end = last_end_;
      first = false;
    }
    return e;
  }

  void parse_arguments() {
    expect("(");
    while (!at(")")) {
      eat("...");
      parse_assignment_value(false);
      if (!at(")")) expect(",");
    }
    advance();
  }

  // `async(...)`: arguments that may become arrow parameters.
  Expr parse_arguments_cover() {
    Expr r;
    r.start = cur_.start;
    expect("(");
    while (!at(")")) {
      eat("...");
      const Expr e = parse_assignment(false);
      r.cover_init = r.cover_init || e.cover_init;
      if (!at(")")) expect(",");
    }
    advance();
    r.end = last_end_;
    return r;
  }

  void parse_template() {
    while (!cur_.template_tail) {
      advance();
      parse_expression(false);
      if (!at("}")) unexpected();
      cur_ = lex_.rescan_template_continuation(cur_);
    }
    advance();
  }

  Expr parse_primary() {
    NestingGuard guard(*this);
    const Token t = cur_;
    switch (t.type) {
      case Tok::kName: {
        if (!t.escaped) {
          if (t.text == "function") return parse_function(t.start, false, true, true);
          if (t.text == "async" && async_function_ahead()) {
            advance();
            return parse_function(t.start, true, true, true);
          }
          if (t.text == "class") return parse_class(t.start, false, true);
          if (t.text == "this" || t.text == "null" || t.text == "true" || t.text == "false") {
            advance();
            return {t.start, t.end, Shape::kLiteral};
          }
          if (is_reserved(t.text)) unexpected();
        }
        advance();
        return {t.start, t.end, Shape::kIdentifier};
      }
      case Tok::kNumber:
      case Tok::kString:
        advance();
        return {t.start, t.end, Shape::kLiteral};
      case Tok::kTemplate:
        parse_template();
        return {t.start, last_end_, Shape::kLiteral};
      case Tok::kPrivateName:
        advance();
        if (!at_name("in")) unexpected();
        return {t.start, t.end, Shape::kOther};
      case Tok::kPunct:
        if (t.is("/") || t.is("/=")) {
          cur_ = lex_.rescan_regex(t);
          advance();
          return {t.start, last_end_, Shape::kLiteral};
        }
        if (t.is("(")) return parse_paren_cover();
        if (t.is("[")) return parse_array_literal();
        if (t.is("{")) return parse_object_literal();
        unexpected();
      default:
        unexpected();
    }
  }

  Expr parse_paren_cover() {
    Expr r;
    r.start = cur_.start;
    r.shape = Shape::kParenCover;
    advance();
    if (at(")")) {
      advance();
      r.end = last_end_;
      r.must_be_arrow = true;
      return r;
    }
    for (;;) {
      if (eat("...")) {
        parse_binding_target();
        r.must_be_arrow = true;
        break;
      }
      const Expr e = parse_assignment(false);
      r.cover_init = r.cover_init || e.cover_init;
      if (!eat(",")) break;
      if (at(")")) {
        r.must_be_arrow = true;
        break;
      }
    }
    expect(")");
    r.end = last_end_;
    return r;
  }

  Expr parse_array_literal() {
    Expr r;
    r.start = cur_.start;
    r.shape = Shape::kArrayLit;
    advance();
    while (!at("]")) {
      if (eat(",")) continue;
      eat("...");
      const Expr e = parse_assignment(false);
      r.cover_init = r.cover_init || e.cover_init;
      if (!at("]")) expect(",");
    }
    advance();
    r.end = last_end_;
    return r;
  }

  Expr parse_object_literal() {
    Expr r;
    r.start = cur_.start;
    r.shape = Shape::kObjectLit;
    expect("{");
    while (!at("}")) {
      if (eat("...")) {
        const Expr e = parse_assignment(false);
        r.cover_init = r.cover_init || e.cover_init;
      } else if (parse_object_member()) {
        r.cover_init = true;
      }
      if (!at("}")) expect(",");
    }
    advance();
    r.end = last_end_;
    return r;
  }

  // Returns true when the member is a shorthand with initializer.
  bool parse_object_member() {
    const std::size_t start = cur_.start;
    auto modifier_applies = [](const Token& next) {
      return !(next.is(",") || next.is(":") || next.is("(") || next.is("}") || next.is("=") ||
               next.type == Tok::kEof);
    };
    bool is_async = false;
    bool is_generator = false;
    UnitKind kind = UnitKind::kMethod;
    if (at_name("async")) {
      const Token next = peek();
      if (modifier_applies(next) && !next.nl_before) {
        advance();
        is_async = true;
      }
    }
    if (eat("*")) is_generator = true;
    if (!is_async && !is_generator && (at_name("get") || at_name("set"))) {
      if (modifier_applies(peek())) {
        kind = at_name("get") ? UnitKind::kGetter : UnitKind::kSetter;
        advance();
      }
    }
    const Token key_token = cur_;
    const PropertyKey key = parse_property_key(false);
    if (at("(")) {
      parse_method(start, kind, key.computed ? std::nullopt : key.name, is_async, is_generator);
      return false;
    }
    if (is_async || is_generator || kind != UnitKind::kMethod) unexpected();
    if (eat(":")) return parse_assignment(false).cover_init;
    if (!key.identifier) unexpected();
    if (!key_token.escaped && is_reserved(key_token.text)) unexpected();
    if (eat("=")) {
      parse_assignment_value(false);
      return true;
    }
    return false;
  }

  std::string_view src_;
  Lexer lex_;
  Token cur_;
  std::size_t last_end_ = 0;
  FunctionContext fn_;
  Binding binding_ = Binding::kNone;
  int function_depth_ = 0;
  int nesting_ = 0;
  bool is_module_ = false;
  ParseOutput out_;
};

}  // namespace

ParseOutput parse_units(std::string_view source) {
  try {
    return Parser(source, false).run();
  } catch (const ParseError&) {
    // Module code may use top-level await before any import/export makes
    // the goal obvious; retry the way engines that sniff the goal do.
    if (source.find("await") == std::string_view::npos &&
        source.find("import") == std::string_view::npos &&
        source.find("export") == std::string_view::npos) {
      throw;
    }
    return Parser(source, true).run();
  }
}

}  // namespace jscov::js
