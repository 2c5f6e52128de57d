#include <cstdint>

#include "js/lexer.hpp"

#include <array>

#include "jscov/errors.hpp"

namespace jscov::js {

namespace {

constexpr std::string_view kPunct4 = ">>>=";

constexpr std::array<std::string_view, 10> kPunct3 = {
    "===", "!==", "**=", "<<=", ">>=", ">>>", "...", "&&=", "||=", "?\?=",
};

constexpr std::array<std::string_view, 22> kPunct2 = {
    "=>", "==", "!=", "<=", ">=", "&&", "||", "??", "?.", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "**",
};

constexpr std::string_view kPunct1 = "{}()[];,<>+-*/%&|^!~?:=.@";

unsigned char byte_at(std::string_view s, std::size_t i) {
  return i < s.size() ? static_cast<unsigned char>(s[i]) : 0;
}

// Width of a non-line-terminator whitespace code point at `at`, or 0.
std::size_t whitespace_at(std::string_view s, std::size_t at) {
  const unsigned char c = byte_at(s, at);
  if (c == ' ' || c == '\t' || c == '\v' || c == '\f') return 1;
  if (c < 0x80) return 0;
  const unsigned char c1 = byte_at(s, at + 1);
  const unsigned char c2 = byte_at(s, at + 2);
  if (c == 0xC2 && c1 == 0xA0) return 2;                             // NBSP
  if (c == 0xEF && c1 == 0xBB && c2 == 0xBF) return 3;               // BOM
  if (c == 0xE1 && c1 == 0x9A && c2 == 0x80) return 3;               // U+1680
  if (c == 0xE2 && c1 == 0x80 && (c2 >= 0x80 && c2 <= 0x8A)) return 3;
  if (c == 0xE2 && c1 == 0x80 && c2 == 0xAF) return 3;
  if (c == 0xE2 && c1 == 0x81 && c2 == 0x9F) return 3;
  if (c == 0xE3 && c1 == 0x80 && c2 == 0x80) return 3;
  return 0;
}

std::size_t utf8_width(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 1;
}

bool is_ascii_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '$' || c == '_';
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_hex_digit(unsigned char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

}  // namespace

std::size_t line_terminator_at(std::string_view s, std::size_t at) {
  const unsigned char c = byte_at(s, at);
  if (c == '\n') return 1;
  if (c == '\r') return byte_at(s, at + 1) == '\n' ? 2 : 1;
  if (c == 0xE2 && byte_at(s, at + 1) == 0x80 &&
      (byte_at(s, at + 2) == 0xA8 || byte_at(s, at + 2) == 0xA9)) {
    return 3;
  }
  return 0;
}

void Lexer::fail(const char* what, std::size_t at) const { throw ParseError(what, at); }

std::size_t Lexer::hashbang_length() const {
  if (src_.size() < 2 || src_[0] != '#' || src_[1] != '!') return 0;
  std::size_t i = 2;
  while (i < src_.size() && line_terminator_at(src_, i) == 0) ++i;
  return i;
}

bool Lexer::skip_trivia() {
  bool newline = false;
  if (pos_ == 0) pos_ = hashbang_length();
  const std::size_t line_start = pos_ == 0 ? 0 : std::string_view::npos;
  while (pos_ < src_.size()) {
    if (std::size_t w = whitespace_at(src_, pos_)) {
      pos_ += w;
      continue;
    }
    if (std::size_t w = line_terminator_at(src_, pos_)) {
      pos_ += w;
      newline = true;
      continue;
    }
    const bool html_open = html_comments_ && src_.substr(pos_, 4) == "<!--";
    const bool html_close = html_comments_ && (newline || pos_ == line_start) && src_.substr(pos_, 3) == "-->";
    if ((src_[pos_] == '/' && byte_at(src_, pos_ + 1) == '/') || html_open || html_close) {
      pos_ += 2;
      while (pos_ < src_.size() && line_terminator_at(src_, pos_) == 0) ++pos_;
      continue;
    }
    if (src_[pos_] == '/' && byte_at(src_, pos_ + 1) == '*') {
      const std::size_t open = pos_;
      pos_ += 2;
      for (;;) {
        if (pos_ >= src_.size()) fail("unterminated comment", open);
        if (src_[pos_] == '*' && byte_at(src_, pos_ + 1) == '/') {
          pos_ += 2;
          break;
        }
        if (std::size_t w = line_terminator_at(src_, pos_)) {
          newline = true;
          pos_ += w;
        } else {
          ++pos_;
        }
      }
      continue;
    }
    break;
  }
  return newline;
}

void Lexer::scan_identifier_rest(Token& tok) {
  for (;;) {
    const unsigned char c = byte_at(src_, pos_);
    if (is_ascii_ident_start(c) || is_digit(c)) {
      ++pos_;
    } else if (c == '\\') {
      if (byte_at(src_, pos_ + 1) != 'u') fail("bad escape in identifier", pos_);
      tok.escaped = true;
      pos_ += 2;
      if (byte_at(src_, pos_) == '{') {
        const std::size_t open = pos_;
        ++pos_;
        while (is_hex_digit(byte_at(src_, pos_))) ++pos_;
        if (byte_at(src_, pos_) != '}') fail("bad unicode escape", open);
        ++pos_;
      } else {
        for (int i = 0; i < 4; ++i, ++pos_) {
          if (!is_hex_digit(byte_at(src_, pos_))) fail("bad unicode escape", pos_);
        }
      }
    } else if (c >= 0x80 && whitespace_at(src_, pos_) == 0 &&
               line_terminator_at(src_, pos_) == 0) {
      pos_ += utf8_width(c);
    } else {
      break;
    }
  }
  if (pos_ > src_.size()) pos_ = src_.size();
}

void Lexer::scan_number(Token& tok) {
  auto digits = [&](auto pred) {
    while (pred(byte_at(src_, pos_)) || byte_at(src_, pos_) == '_') ++pos_;
  };
  const unsigned char c0 = byte_at(src_, pos_);
  const unsigned char c1 = byte_at(src_, pos_ + 1) | 0x20;
  if (c0 == '0' && (c1 == 'x' || c1 == 'o' || c1 == 'b')) {
    pos_ += 2;
    const std::size_t first = pos_;
    if (c1 == 'x') {
      digits(is_hex_digit);
    } else {
      digits(is_digit);  // range checked loosely
    }
    if (pos_ == first) fail("missing digits in numeric literal", tok.start);
    if (byte_at(src_, pos_) == 'n') ++pos_;
  } else {
    digits(is_digit);
    bool bigint_ok = true;
    if (byte_at(src_, pos_) == '.') {
      ++pos_;
      digits(is_digit);
      bigint_ok = false;
    }
    if ((byte_at(src_, pos_) | 0x20) == 'e') {
      const std::size_t save = pos_;
      ++pos_;
      if (byte_at(src_, pos_) == '+' || byte_at(src_, pos_) == '-') ++pos_;
      if (!is_digit(byte_at(src_, pos_))) {
        pos_ = save;
        fail("malformed exponent", save);
      }
      digits(is_digit);
      bigint_ok = false;
    }
    if (bigint_ok && byte_at(src_, pos_) == 'n') ++pos_;
  }
  const unsigned char after = byte_at(src_, pos_);
  if (is_ascii_ident_start(after) || is_digit(after) || after == '\\') {
    fail("identifier starts immediately after numeric literal", pos_);
  }
  tok.type = Tok::kNumber;
}

void Lexer::scan_string(Token& tok, char quote) {
  ++pos_;
  for (;;) {
    if (pos_ >= src_.size()) fail("unterminated string literal", tok.start);
    const char c = src_[pos_];
    if (c == quote) {
      ++pos_;
      break;
    }
    if (c == '\\') {
      ++pos_;
      if (std::size_t w = line_terminator_at(src_, pos_)) {
        pos_ += w;
      } else if (pos_ < src_.size()) {
        pos_ += utf8_width(static_cast<unsigned char>(src_[pos_]));
      }
      continue;
    }
    // U+2028/2029 are allowed inside string literals since ES2019.
    if (c == '\n' || c == '\r') fail("unterminated string literal", tok.start);
    ++pos_;
  }
  tok.type = Tok::kString;
}

Token Lexer::scan_template_chunk(std::size_t token_start, std::size_t body_start) {
  Token tok;
  tok.type = Tok::kTemplate;
  tok.start = token_start;
  pos_ = body_start;
  for (;;) {
    if (pos_ >= src_.size()) fail("unterminated template literal", token_start);
    const char c = src_[pos_];
    if (c == '`') {
      ++pos_;
      tok.template_tail = true;
      break;
    }
    if (c == '\\') {
      pos_ += 2;
      continue;
    }
    if (c == '$' && byte_at(src_, pos_ + 1) == '{') {
      pos_ += 2;
      tok.template_tail = false;
      break;
    }
    ++pos_;
  }
  if (pos_ > src_.size()) fail("unterminated template literal", token_start);
  tok.end = pos_;
  tok.text = src_.substr(tok.start, tok.end - tok.start);
  return tok;
}

Token Lexer::next() {
  Token tok;
  tok.nl_before = skip_trivia();
  tok.start = pos_;
  if (pos_ >= src_.size()) {
    tok.type = Tok::kEof;
    tok.end = pos_;
    return tok;
  }
  const unsigned char c = byte_at(src_, pos_);
  const unsigned char c1 = byte_at(src_, pos_ + 1);

  if (is_ascii_ident_start(c) || c == '\\' || c >= 0x80) {
    tok.type = Tok::kName;
    if (c == '\\') {
      scan_identifier_rest(tok);
    } else {
      pos_ += utf8_width(c);
      scan_identifier_rest(tok);
    }
  } else if (c == '#') {
    ++pos_;
    const unsigned char n = byte_at(src_, pos_);
    if (!(is_ascii_ident_start(n) || n == '\\' || n >= 0x80)) fail("bad private name", tok.start);
    scan_identifier_rest(tok);
    tok.type = Tok::kPrivateName;
  } else if (is_digit(c) || (c == '.' && is_digit(c1))) {
    scan_number(tok);
  } else if (c == '"' || c == '\'') {
    scan_string(tok, static_cast<char>(c));
  } else if (c == '`') {
    Token t = scan_template_chunk(tok.start, pos_ + 1);
    t.nl_before = tok.nl_before;
    return t;
  } else {
    tok.type = Tok::kPunct;
    const std::string_view rest = src_.substr(pos_);
    std::size_t len = 0;
    if (rest.starts_with(kPunct4)) {
      len = 4;
    } else {
      for (auto p : kPunct3) {
        if (rest.starts_with(p)) {
          len = 3;
          break;
        }
      }
      if (len == 0) {
        for (auto p : kPunct2) {
          if (rest.starts_with(p)) {
            // `a?.5:b` is a conditional, not optional chaining.
            if (p == "?." && is_digit(byte_at(src_, pos_ + 2))) continue;
            len = 2;
            break;
          }
        }
      }
      if (len == 0 && kPunct1.find(static_cast<char>(c)) != std::string_view::npos) len = 1;
    }
    if (len == 0) fail("unexpected character", pos_);
    pos_ += len;
  }
  tok.end = pos_;
  tok.text = src_.substr(tok.start, tok.end - tok.start);
  return tok;
}

Token Lexer::rescan_regex(const Token& slash) {
  Token tok;
  tok.type = Tok::kRegex;
  tok.start = slash.start;
  tok.nl_before = slash.nl_before;
  pos_ = slash.start + 1;
  bool in_class = false;
  for (;;) {
    if (pos_ >= src_.size() || line_terminator_at(src_, pos_) != 0) {
      fail("unterminated regular expression", slash.start);
    }
    const char c = src_[pos_];
    if (c == '\\') {
      ++pos_;
      if (pos_ >= src_.size() || line_terminator_at(src_, pos_) != 0) {
        fail("unterminated regular expression", slash.start);
      }
      pos_ += utf8_width(static_cast<unsigned char>(src_[pos_]));
      continue;
    }
    if (c == '[') {
      in_class = true;
    } else if (c == ']') {
      in_class = false;
    } else if (c == '/' && !in_class) {
      ++pos_;
      break;
    }
    ++pos_;
  }
  Token flags;
  scan_identifier_rest(flags);
  tok.end = pos_;
  tok.text = src_.substr(tok.start, tok.end - tok.start);
  return tok;
}

Token Lexer::rescan_template_continuation(const Token& close_brace) {
  Token t = scan_template_chunk(close_brace.start, close_brace.start + 1);
  t.nl_before = close_brace.nl_before;
  return t;
}

std::string decode_identifier(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] != '\\' || i + 1 >= text.size() || text[i + 1] != 'u') {
      out += text[i++];
      continue;
    }
    i += 2;
    std::size_t end = i + 4;
    std::size_t digits_start = i;
    if (i < text.size() && text[i] == '{') {
      digits_start = i + 1;
      end = text.find('}', i);
      if (end == std::string_view::npos) return std::string(text);
    }
    std::uint32_t cp = 0;
    for (std::size_t k = digits_start; k < end && k < text.size(); ++k) {
      const char c = text[k];
      cp = cp * 16 + static_cast<std::uint32_t>(c <= '9' ? c - '0' : (c | 0x20) - 'a' + 10);
      if (cp > 0x10FFFF) return std::string(text);
    }
    i = text[i] == '{' ? end + 1 : end;
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }
  return out;
}

}  // namespace jscov::js
