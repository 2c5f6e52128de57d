#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace jscov::js {

enum class Tok {
  kEof,
  kName,         // identifiers and keywords alike; the parser decides
  kPrivateName,  // #name
  kPunct,
  kNumber,
  kString,
  kTemplate,  // one template chunk: `...${  or  }...${  or  }...`  or `...`
  kRegex,
};

struct Token {
  Tok type = Tok::kEof;
  std::size_t start = 0;
  std::size_t end = 0;
  bool nl_before = false;
  bool escaped = false;        // identifier spelled with \u escapes
  bool template_tail = false;  // template chunk ends with a backtick
  std::string_view text;

  bool is(std::string_view punct) const { return type == Tok::kPunct && text == punct; }
  bool is_name(std::string_view name) const {
    return type == Tok::kName && !escaped && text == name;
  }
};

// Scans one token at a time starting from pos(). The lexer has no notion of
// syntactic context: a '/' is always returned as punctuation and '}' never
// resumes a template; the parser asks for a rescan when it knows better.
class Lexer {
 public:
  explicit Lexer(std::string_view source) : src_(source) {}

  // `<!--` and line-leading `-->` open single-line comments in scripts.
  void set_html_comments(bool on) { html_comments_ = on; }

  Token next();
  Token rescan_regex(const Token& slash);
  Token rescan_template_continuation(const Token& close_brace);

  std::size_t pos() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }
  std::string_view source() const { return src_; }

  // Length of a hashbang line at offset 0, or 0.
  std::size_t hashbang_length() const;

 private:
  bool skip_trivia();  // returns true when a line terminator was crossed
  Token scan_template_chunk(std::size_t token_start, std::size_t body_start);
  void scan_identifier_rest(Token& tok);
  void scan_number(Token& tok);
  void scan_string(Token& tok, char quote);
  [[noreturn]] void fail(const char* what, std::size_t at) const;

  std::string_view src_;
  std::size_t pos_ = 0;
  bool html_comments_ = true;
};

// Identifier text with \uXXXX and \u{X...} escapes replaced by UTF-8.
std::string decode_identifier(std::string_view text);

// Width in bytes of a line terminator at `at` (LF, CR, CRLF, U+2028/9), or 0.
std::size_t line_terminator_at(std::string_view s, std::size_t at);

}  // namespace jscov::js
