#include "codecs/lexer.hpp"

#include <array>
#include <cctype>
#include <cstdlib>

namespace scenecode::codecs {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

constexpr std::array<std::string_view, 21> kMultiPunct = {
    "...", "===", "!==", "**=", "==", "!=", "<=", ">=", "=>", "**", "&&",
    "||",  "+=",  "-=",  "*=", "/=", "++", "--", "::", "?.", "??"};

class Lexer {
 public:
  Lexer(std::string_view src, LexStyle style) : src_(src), style_(style) {}

  LexResult run() {
    while (pos_ < src_.size()) step();
    push(Tok::end, "");
    return std::move(out_);
  }

 private:
  char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void push(Tok kind, std::string text, double number = 0.0) {
    out_.tokens.push_back(Token{kind, std::move(text), number, tok_line_, tok_col_});
  }

  bool newline_significant() const {
    return style_ == LexStyle::python ? (paren_ + bracket_ + brace_) == 0
                                      : (paren_ + bracket_) == 0;
  }

  void step() {
    tok_line_ = line_;
    tok_col_ = col_;
    const char c = peek();
    if (c == '\n') {
      if (newline_significant() &&
          (out_.tokens.empty() || out_.tokens.back().kind != Tok::newline)) {
        push(Tok::newline, "\n");
      }
      advance();
      return;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      return;
    }
    if (style_ == LexStyle::c_like && c == '/' && peek(1) == '/') return line_comment(2);
    if (style_ == LexStyle::c_like && c == '/' && peek(1) == '*') return block_comment();
    if (c == '#') return line_comment(1);
    if (c == '\\' && peek(1) == '\n') {  // python line continuation
      advance(2);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return number();
    }
    if (c == '"' || c == '\'' || c == '`') return string_literal();
    if (ident_start(c)) return identifier();
    punctuation();
  }

  void line_comment(std::size_t skip) {
    advance(skip);
    const std::size_t start = pos_;
    while (pos_ < src_.size() && peek() != '\n') advance();
    out_.comments.push_back({tok_line_, std::string(src_.substr(start, pos_ - start))});
  }

  void block_comment() {
    advance(2);
    const std::size_t start = pos_;
    while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
    out_.comments.push_back({tok_line_, std::string(src_.substr(start, pos_ - start))});
    advance(2);
  }

  void number() {
    const std::size_t start = pos_;
    double value = 0.0;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance(2);
      const std::size_t digits = pos_;
      while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      std::string hex;
      for (char ch : src_.substr(digits, pos_ - digits)) {
        if (ch != '_') hex += ch;
      }
      value = hex.empty() ? 0.0 : static_cast<double>(std::strtoull(hex.c_str(), nullptr, 16));
    } else {
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      } else if (peek() == '.' && !ident_start(peek(1))) {
        advance();  // "1." style literal
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (std::isdigit(static_cast<unsigned char>(peek(1))) ||
           ((peek(1) == '+' || peek(1) == '-') &&
            std::isdigit(static_cast<unsigned char>(peek(2)))))) {
        advance(2);
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      std::string digits;
      for (char ch : src_.substr(start, pos_ - start)) {
        if (ch != '_') digits += ch;
      }
      value = std::strtod(digits.c_str(), nullptr);
    }
    // C# / JS numeric suffixes
    if (peek() == 'f' || peek() == 'F' || peek() == 'd' || peek() == 'D' || peek() == 'm' ||
        peek() == 'M' || peek() == 'n') {
      if (!ident_char(peek(1))) advance();
    }
    push(Tok::number, std::string(src_.substr(start, pos_ - start)), value);
  }

  void string_literal() {
    const char quote = peek();
    const bool triple = style_ == LexStyle::python && peek(1) == quote && peek(2) == quote;
    advance(triple ? 3 : 1);
    std::string value;
    while (pos_ < src_.size()) {
      const char ch = peek();
      if (triple) {
        if (ch == quote && peek(1) == quote && peek(2) == quote) {
          advance(3);
          break;
        }
      } else if (ch == quote) {
        advance();
        break;
      } else if (ch == '\n' && quote != '`') {
        break;  // unterminated literal ends at the line
      }
      if (ch == '\\' && pos_ + 1 < src_.size()) {
        const char esc = peek(1);
        value += esc == 'n' ? '\n' : (esc == 't' ? '\t' : esc);
        advance(2);
        continue;
      }
      value += ch;
      advance();
    }
    push(Tok::string, std::move(value));
  }

  void identifier() {
    const std::size_t start = pos_;
    while (ident_char(peek())) advance();
    std::string text(src_.substr(start, pos_ - start));
    // python string prefixes: r"..", f'..', b"..", rb'..'
    if ((peek() == '"' || peek() == '\'') && text.size() <= 2 &&
        text.find_first_not_of("rRfFbBuU") == std::string::npos) {
      string_literal();
      return;
    }
    push(Tok::ident, std::move(text));
  }

  void punctuation() {
    for (std::string_view p : kMultiPunct) {
      if (src_.substr(pos_, p.size()) == p) {
        advance(p.size());
        push(Tok::punct, std::string(p));
        return;
      }
    }
    const char c = peek();
    switch (c) {
      case '(': ++paren_; break;
      case ')': if (paren_ > 0) --paren_; break;
      case '[': ++bracket_; break;
      case ']': if (bracket_ > 0) --bracket_; break;
      case '{': ++brace_; break;
      case '}': if (brace_ > 0) --brace_; break;
      default: break;
    }
    advance();
    push(Tok::punct, std::string(1, c));
  }

  std::string_view src_;
  LexStyle style_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int tok_line_ = 1;
  int tok_col_ = 1;
  int paren_ = 0;
  int bracket_ = 0;
  int brace_ = 0;
  LexResult out_;
};

}  // namespace

LexResult lex(std::string_view source, LexStyle style) { return Lexer(source, style).run(); }

}  // namespace scenecode::codecs
